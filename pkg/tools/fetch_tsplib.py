#!/usr/bin/env python3
"""Download the eight TSPLIB benchmark instances into data/.

The benchmark files themselves are not redistributed with this repository;
this script fetches them from the canonical TSPLIB mirror (gzipped) and
checks each file's declared DIMENSION. Requires network access.

Usage: python tools/fetch_tsplib.py [data_dir]
"""

import gzip
import sys
import urllib.request
from pathlib import Path

BASE_URL = "http://comopt.ifi.uni-heidelberg.de/software/TSPLIB95/tsp"

INSTANCES = {
    "pcb442": 442,
    "p654": 654,
    "d657": 657,
    "u724": 724,
    "rat783": 783,
    "dsj1000": 1000,
    "pr1002": 1002,
    "vm1084": 1084,
}


def declared_dimension(text: str) -> int:
    for line in text.splitlines():
        if line.upper().startswith("DIMENSION"):
            return int(line.split(":")[1])
    raise ValueError("no DIMENSION header found")


def fetch(name: str, out_dir: Path) -> Path:
    url = f"{BASE_URL}/{name}.tsp.gz"
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        text = gzip.decompress(response.read()).decode("utf-8", "replace")
    dim = declared_dimension(text)
    if dim != INSTANCES[name]:
        raise ValueError(f"{name}: expected dimension {INSTANCES[name]}, got {dim}")
    path = out_dir / f"{name}.tsp"
    path.write_text(text, encoding="utf-8")
    print(f"  -> {path} (dimension {dim})")
    return path


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = []
    for name in INSTANCES:
        target = out_dir / f"{name}.tsp"
        if target.exists():
            print(f"{target} already present, skipping")
            continue
        try:
            fetch(name, out_dir)
        except Exception as exc:
            failures.append(name)
            print(f"  failed: {exc}")
    if failures:
        print(f"could not fetch: {', '.join(failures)}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
