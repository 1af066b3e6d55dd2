#!/usr/bin/env python3
"""Generate a circle instance whose optimal tour length is known exactly.

Cities sit on a circle, so the unique shortest tour visits them in hull
order. With the default radius the true-length gap between the hull tour and
any other tour (at least about two edge lengths) exceeds the worst-case
rounding skew of the integer TSPLIB metric (at most k/2 per tour), so the
hull tour remains optimal under the rounded weights and its rounded length is
THE optimum. The script prints that optimum and embeds it in the COMMENT.

Usage: python tools/make_ring_instance.py [k] [out.tsp]
"""

import math
import sys
from pathlib import Path


def ring_coords(k: int, radius: float = 1000.0):
    return [(radius * math.cos(2 * math.pi * i / k) + 2 * radius,
             radius * math.sin(2 * math.pi * i / k) + 2 * radius)
            for i in range(k)]


def nint(x: float) -> int:
    return int(math.floor(x + 0.5))


def hull_tour_length(coords) -> int:
    k = len(coords)
    total = 0
    for i in range(k):
        xa, ya = coords[i]
        xb, yb = coords[(i + 1) % k]
        total += nint(math.hypot(xa - xb, ya - yb))
    return total


def main() -> int:
    k = int(sys.argv[1]) if len(sys.argv) > 1 else 52
    out = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(f"data/ring{k}.tsp")
    coords = ring_coords(k)
    optimum = hull_tour_length(coords)
    lines = [
        f"NAME : ring{k}",
        "TYPE : TSP",
        f"COMMENT : {k} cities on a circle; optimal tour length {optimum}",
        f"DIMENSION : {k}",
        "EDGE_WEIGHT_TYPE : EUC_2D",
        "NODE_COORD_SECTION",
    ]
    for i, (x, y) in enumerate(coords, start=1):
        lines.append(f"{i} {x!r} {y!r}")
    lines.append("EOF")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} (k={k}, optimum={optimum})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
