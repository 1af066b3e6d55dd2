"""TSPLIB instance parsing and exact integer edge weights.

Supports the symmetric-TSP subset needed here: EUC_2D, CEIL_2D, ATT and GEO
coordinate instances plus EXPLICIT full-matrix instances. Distances follow the
TSPLIB reference definitions, in particular nint(x) = floor(x + 0.5), so tour
lengths are commensurate with the published optima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

__all__ = [
    "EDGE_WEIGHT_TYPES",
    "TsplibParseError",
    "TspInstance",
    "parse_instance",
    "parse_file",
    "edge_weight",
    "known_optimum",
    "register_optimum",
]

#: supported EDGE_WEIGHT_TYPE values (EXPLICIT requires FULL_MATRIX format)
EDGE_WEIGHT_TYPES = ("EUC_2D", "CEIL_2D", "ATT", "GEO", "EXPLICIT")

#: optimal tour lengths for the benchmark instances used in the experiments
_KNOWN_OPTIMA: dict[str, int] = {
    "pcb442": 50778,
    "p654": 34643,
    "d657": 48912,
    "u724": 41910,
    "rat783": 8806,
    "dsj1000": 18659688,
    "pr1002": 259045,
    "vm1084": 239297,
}

_RUNTIME_OPTIMA: dict[str, int] = {}


def known_optimum(name: str) -> int | None:
    """Return the registered optimal tour length for ``name``, if any."""
    if name in _RUNTIME_OPTIMA:
        return _RUNTIME_OPTIMA[name]
    return _KNOWN_OPTIMA.get(name)


def register_optimum(name: str, value: int) -> None:
    """Register (or override) the optimum for an instance name at runtime."""
    if value <= 0:
        raise ValueError(f"optimum must be positive, got {value}")
    _RUNTIME_OPTIMA[name] = int(value)


class TsplibParseError(ValueError):
    """Malformed or unsupported TSPLIB input.

    Carries the 1-based line number and the header field or section that
    triggered the failure.
    """

    def __init__(self, message: str, *, line_no: int | None = None,
                 fieldname: str | None = None):
        self.line_no = line_no
        self.fieldname = fieldname
        prefix = []
        if line_no is not None:
            prefix.append(f"line {line_no}")
        if fieldname is not None:
            prefix.append(fieldname)
        where = " (" + ", ".join(prefix) + ")" if prefix else ""
        super().__init__(f"{message}{where}")


def _nint(x: float) -> int:
    # TSPLIB nint: floor(x + 0.5)
    return int(math.floor(x + 0.5))


def _euc_2d(xa: float, ya: float, xb: float, yb: float) -> int:
    return _nint(math.hypot(xa - xb, ya - yb))


def _ceil_2d(xa: float, ya: float, xb: float, yb: float) -> int:
    return int(math.ceil(math.hypot(xa - xb, ya - yb)))


def _att(xa: float, ya: float, xb: float, yb: float) -> int:
    r = math.sqrt(((xa - xb) ** 2 + (ya - yb) ** 2) / 10.0)
    t = _nint(r)
    return t + 1 if t < r else t


def _geo_radians(value: float) -> float:
    # coordinates are DDD.MM (degrees and minutes), PI as in the reference code
    pi = 3.141592
    deg = _nint(value)
    minutes = value - deg
    return pi * (deg + 5.0 * minutes / 3.0) / 180.0


def _geo(xa: float, ya: float, xb: float, yb: float) -> int:
    rrr = 6378.388
    lat_a, lon_a = _geo_radians(xa), _geo_radians(ya)
    lat_b, lon_b = _geo_radians(xb), _geo_radians(yb)
    q1 = math.cos(lon_a - lon_b)
    q2 = math.cos(lat_a - lat_b)
    q3 = math.cos(lat_a + lat_b)
    return int(rrr * math.acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0)

_DISTANCE_FUNCS = {
    "EUC_2D": _euc_2d,
    "CEIL_2D": _ceil_2d,
    "ATT": _att,
    "GEO": _geo,
}


@dataclass(eq=False)
class TspInstance:
    """A parsed symmetric TSP instance with integer edge weights.

    Immutable after construction; safe to share across concurrently evolving
    subpopulations. The full distance matrix is materialized lazily and cached
    (automatically for ``edge_weight`` when ``dimension <= matrix_threshold``,
    unconditionally via :meth:`distance_matrix`).
    """

    name: str
    dimension: int
    metric: str
    coords: np.ndarray | None = None            # (dimension, 2) float64
    explicit_weights: np.ndarray | None = None  # (dimension, dimension) int64
    matrix_threshold: int = 2000
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension < 3:
            raise ValueError(f"dimension must be >= 3, got {self.dimension}")
        if self.metric == "EXPLICIT":
            if self.explicit_weights is None:
                raise ValueError("EXPLICIT metric requires a weight matrix")
            self._matrix = self.explicit_weights
        else:
            if self.metric not in _DISTANCE_FUNCS:
                raise ValueError(f"unsupported metric {self.metric!r}")
            if self.coords is None or len(self.coords) != self.dimension:
                raise ValueError("coordinate count must equal dimension")

    @property
    def known_optimum(self) -> int | None:
        return known_optimum(self.name)

    def edge_weight(self, a: int, b: int) -> int:
        """Exact integer weight of edge (a, b); 0-based city indices."""
        k = self.dimension
        if not (0 <= a < k and 0 <= b < k):
            raise IndexError(f"city index out of range: ({a}, {b}), dimension {k}")
        if self._matrix is None and k <= self.matrix_threshold:
            self.distance_matrix()
        if self._matrix is not None:
            return int(self._matrix[a, b])
        if a == b:
            return 0
        xa, ya = self.coords[a]
        xb, yb = self.coords[b]
        return _DISTANCE_FUNCS[self.metric](xa, ya, xb, yb)

    def distance_matrix(self) -> np.ndarray:
        """Full (k, k) int64 weight matrix, computed once and cached.

        O(k^2) memory; callers that only probe a few edges of a very large
        instance should use :meth:`edge_weight` instead.
        """
        if self._matrix is None:
            k = self.dimension
            if self.metric == "EUC_2D" or self.metric == "CEIL_2D":
                x = self.coords[:, 0]
                y = self.coords[:, 1]
                d = np.hypot(x[:, None] - x[None, :], y[:, None] - y[None, :])
                if self.metric == "EUC_2D":
                    m = np.floor(d + 0.5).astype(np.int64)
                else:
                    m = np.ceil(d).astype(np.int64)
            else:
                fn = _DISTANCE_FUNCS[self.metric]
                m = np.zeros((k, k), dtype=np.int64)
                for i in range(k):
                    xi, yi = self.coords[i]
                    for j in range(i + 1, k):
                        w = fn(xi, yi, self.coords[j][0], self.coords[j][1])
                        m[i, j] = w
                        m[j, i] = w
            np.fill_diagonal(m, 0)
            self._matrix = m
        return self._matrix

    def header_lines(self) -> list[str]:
        """Re-serialize the structured header fields (lossless round trip)."""
        return [
            f"NAME : {self.name}",
            f"DIMENSION : {self.dimension}",
            f"EDGE_WEIGHT_TYPE : {self.metric}",
        ]


def edge_weight(inst: TspInstance, a: int, b: int) -> int:
    """Exact integer weight of edge (a, b) in ``inst``."""
    return inst.edge_weight(a, b)


_HEADER_KEYS = {
    "NAME", "TYPE", "COMMENT", "DIMENSION", "CAPACITY",
    "EDGE_WEIGHT_TYPE", "EDGE_WEIGHT_FORMAT", "EDGE_DATA_FORMAT",
    "NODE_COORD_TYPE", "DISPLAY_DATA_TYPE",
}


def parse_instance(source: str | Iterable[str] | IO[str], *,
                   name: str | None = None,
                   matrix_threshold: int = 2000) -> TspInstance:
    """Parse TSPLIB text into a :class:`TspInstance`.

    ``source`` may be a string, an open text file, or any iterable of lines.
    Unknown header keywords are ignored; an ``EOF`` token terminates parsing.
    Raises :class:`TsplibParseError` (with line number and field) on malformed
    headers, unsupported edge weight types, or coordinate count mismatches.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]

    header: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    seen_index: set[int] = set()
    matrix_values: list[int] = []
    section = None
    dimension = None

    def need_dimension(line_no: int, where: str) -> int:
        if dimension is None:
            raise TsplibParseError("DIMENSION must precede this section",
                                   line_no=line_no, fieldname=where)
        return dimension

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        upper = line.upper()
        if upper == "EOF":
            break

        if section == "NODE_COORD_SECTION":
            parts = line.split()
            if len(parts) < 3:
                raise TsplibParseError(f"expected 'index x y', got {line!r}",
                                       line_no=line_no, fieldname="NODE_COORD_SECTION")
            try:
                idx = int(parts[0])
                x, y = float(parts[1]), float(parts[2])
            except ValueError:
                raise TsplibParseError(f"non-numeric coordinate line {line!r}",
                                       line_no=line_no, fieldname="NODE_COORD_SECTION")
            k = need_dimension(line_no, "NODE_COORD_SECTION")
            if not (1 <= idx <= k):
                raise TsplibParseError(f"city index {idx} outside 1..{k}",
                                       line_no=line_no, fieldname="NODE_COORD_SECTION")
            if idx in seen_index:
                raise TsplibParseError(f"duplicate city index {idx}",
                                       line_no=line_no, fieldname="NODE_COORD_SECTION")
            seen_index.add(idx)
            while len(coords) < idx:
                coords.append((0.0, 0.0))
            coords[idx - 1] = (x, y)
            continue

        if section == "EDGE_WEIGHT_SECTION":
            try:
                matrix_values.extend(int(round(float(tok))) for tok in line.split())
            except ValueError:
                raise TsplibParseError(f"non-numeric weight line {line!r}",
                                       line_no=line_no, fieldname="EDGE_WEIGHT_SECTION")
            continue

        if ":" in line:
            key, _, value = line.partition(":")
            key = key.strip().upper()
            value = value.strip()
            if key == "DIMENSION":
                try:
                    dimension = int(value)
                except ValueError:
                    raise TsplibParseError(f"DIMENSION is not an integer: {value!r}",
                                           line_no=line_no, fieldname="DIMENSION")
                if dimension < 3:
                    raise TsplibParseError(f"DIMENSION must be >= 3, got {dimension}",
                                           line_no=line_no, fieldname="DIMENSION")
            elif key == "TYPE":
                if value.upper() not in ("TSP", ""):
                    raise TsplibParseError(f"unsupported TYPE {value!r} (only TSP)",
                                           line_no=line_no, fieldname="TYPE")
            elif key == "EDGE_WEIGHT_TYPE":
                if value.upper() not in EDGE_WEIGHT_TYPES:
                    raise TsplibParseError(
                        f"unsupported EDGE_WEIGHT_TYPE {value!r}",
                        line_no=line_no, fieldname="EDGE_WEIGHT_TYPE")
            elif key == "EDGE_WEIGHT_FORMAT":
                if value.upper() != "FULL_MATRIX":
                    raise TsplibParseError(
                        f"unsupported EDGE_WEIGHT_FORMAT {value!r} (only FULL_MATRIX)",
                        line_no=line_no, fieldname="EDGE_WEIGHT_FORMAT")
            # other keywords (COMMENT, known or unknown) are ignored
            header[key] = value
            continue

        if upper == "NODE_COORD_SECTION":
            need_dimension(line_no, "NODE_COORD_SECTION")
            section = "NODE_COORD_SECTION"
            continue
        if upper == "EDGE_WEIGHT_SECTION":
            need_dimension(line_no, "EDGE_WEIGHT_SECTION")
            section = "EDGE_WEIGHT_SECTION"
            continue
        raise TsplibParseError(f"unrecognized line {line!r}", line_no=line_no)

    n_lines = len(lines)
    if dimension is None:
        raise TsplibParseError("missing DIMENSION", line_no=n_lines,
                               fieldname="DIMENSION")
    ewt = header.get("EDGE_WEIGHT_TYPE", "").upper()
    if not ewt:
        raise TsplibParseError("missing EDGE_WEIGHT_TYPE", line_no=n_lines,
                               fieldname="EDGE_WEIGHT_TYPE")
    inst_name = name if name is not None else header.get("NAME", "unnamed")

    if ewt == "EXPLICIT":
        if header.get("EDGE_WEIGHT_FORMAT", "").upper() != "FULL_MATRIX":
            raise TsplibParseError("EXPLICIT requires EDGE_WEIGHT_FORMAT : FULL_MATRIX",
                                   line_no=n_lines, fieldname="EDGE_WEIGHT_FORMAT")
        if len(matrix_values) != dimension * dimension:
            raise TsplibParseError(
                f"expected {dimension * dimension} weights, got {len(matrix_values)}",
                line_no=n_lines, fieldname="EDGE_WEIGHT_SECTION")
        weights = np.array(matrix_values, dtype=np.int64).reshape(dimension, dimension)
        if (weights < 0).any():
            raise TsplibParseError("negative edge weight", line_no=n_lines,
                                   fieldname="EDGE_WEIGHT_SECTION")
        if not np.array_equal(weights, weights.T):
            raise TsplibParseError("explicit matrix is not symmetric",
                                   line_no=n_lines, fieldname="EDGE_WEIGHT_SECTION")
        return TspInstance(name=inst_name, dimension=dimension, metric="EXPLICIT",
                           explicit_weights=weights, matrix_threshold=matrix_threshold)

    if len(seen_index) != dimension:
        raise TsplibParseError(
            f"expected {dimension} coordinate lines, got {len(seen_index)}",
            line_no=n_lines, fieldname="NODE_COORD_SECTION")
    return TspInstance(name=inst_name, dimension=dimension, metric=ewt,
                       coords=np.array(coords, dtype=np.float64),
                       matrix_threshold=matrix_threshold)


def parse_file(path: str | Path, *, matrix_threshold: int = 2000) -> TspInstance:
    """Parse a ``.tsp`` file; the instance name defaults to the file stem."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        inst = parse_instance(fh, matrix_threshold=matrix_threshold)
    if inst.name == "unnamed":
        inst.name = path.stem
    return inst
