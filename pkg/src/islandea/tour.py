"""Directed cyclic tour representation with cached integer length.

A tour is a permutation of the city indices 0..k-1 read as a directed
Hamiltonian cycle. The direction matters: the genotype diversity measure
compares directed successor functions, so a tour and its reversal are
distinct individuals even though they have equal length on symmetric
instances.
"""

from __future__ import annotations

import numpy as np

from .tsplib import TspInstance

__all__ = ["Tour", "cycle_length", "random_tour"]


def cycle_length(tour: "Tour", inst: TspInstance) -> int:
    """Recompute the full cycle length of ``tour`` under ``inst``'s weights."""
    order = tour.order
    if len(order) != inst.dimension:
        raise ValueError(
            f"tour has {len(order)} cities, instance has {inst.dimension}")
    if inst._matrix is not None or inst.dimension <= inst.matrix_threshold:
        w = inst.distance_matrix()
        return int(w[order, np.roll(order, -1)].sum())
    nxt = np.roll(order, -1)
    return sum(inst.edge_weight(int(a), int(b)) for a, b in zip(order, nxt))


class Tour:
    """Permutation of city indices plus its inverse and cached cycle length."""

    __slots__ = ("instance", "order", "position", "_length")

    def __init__(self, instance: TspInstance, order, *, length: int | None = None,
                 validate: bool = True):
        self.instance = instance
        self.order = np.asarray(order, dtype=np.int64).copy()
        k = instance.dimension
        if validate:
            if self.order.shape != (k,):
                raise ValueError(
                    f"order has shape {self.order.shape}, expected ({k},)")
            seen = np.zeros(k, dtype=bool)
            if (self.order < 0).any() or (self.order >= k).any():
                raise ValueError("order contains out-of-range city indices")
            seen[self.order] = True
            if not seen.all():
                raise ValueError("order is not a permutation of 0..k-1")
        self.position = np.empty(k, dtype=np.int64)
        self.position[self.order] = np.arange(k, dtype=np.int64)
        self._length = cycle_length(self, instance) if length is None else int(length)

    @property
    def length(self) -> int:
        """Cached cycle length; maintained incrementally by mutations."""
        return self._length

    @property
    def dimension(self) -> int:
        return len(self.order)

    def successor(self, city: int) -> int:
        """City that follows ``city`` in cycle order (the last wraps to the first)."""
        k = len(self.order)
        if not 0 <= city < k:
            raise IndexError(f"city {city} out of range 0..{k - 1}")
        p = self.position[city] + 1
        return int(self.order[p - k])

    def predecessor(self, city: int) -> int:
        k = len(self.order)
        if not 0 <= city < k:
            raise IndexError(f"city {city} out of range 0..{k - 1}")
        return int(self.order[self.position[city] - 1])

    def successors(self) -> np.ndarray:
        """Successor function as an array: ``succ[c]`` is the city after c.

        This is the content of the tour's 0/1 connection matrix (one entry
        per row), in O(k) space.
        """
        succ = np.empty_like(self.order)
        succ[self.order] = np.roll(self.order, -1)
        return succ

    def invert_segment(self, from_pos: int, to_pos: int) -> "Tour":
        """Reverse the cyclic block of positions ``from_pos..to_pos`` in place.

        Wrapping is allowed (``from_pos > to_pos`` reverses through the end of
        the order array). The cached length is updated incrementally from the
        two boundary edges, which is exact on symmetric instances. Returns
        ``self``.
        """
        k = len(self.order)
        if not (0 <= from_pos < k and 0 <= to_pos < k):
            raise IndexError(f"positions ({from_pos}, {to_pos}) out of range")
        seg_len = (to_pos - from_pos) % k + 1
        if seg_len == k:
            # whole-cycle reversal: same cycle traversed backwards
            self.order = self.order[::-1].copy()
            self.position[self.order] = np.arange(k, dtype=np.int64)
            return self
        ew = self.instance.edge_weight
        idx = (np.arange(seg_len) + from_pos) % k
        first = int(self.order[idx[0]])
        last = int(self.order[idx[-1]])
        before = int(self.order[(from_pos - 1) % k])
        after = int(self.order[(to_pos + 1) % k])
        delta = (ew(before, last) + ew(first, after)
                 - ew(before, first) - ew(last, after))
        self.order[idx] = self.order[idx[::-1]]
        self.position[self.order[idx]] = idx
        self._length += delta
        return self

    def recompute_length(self) -> int:
        """Cycle length summed from scratch (cross-check for the cache)."""
        return cycle_length(self, self.instance)

    def copy(self) -> "Tour":
        return Tour(self.instance, self.order, length=self._length, validate=False)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Tour)
                and self.instance is other.instance
                and np.array_equal(self.order, other.order))

    def __hash__(self):
        return hash((id(self.instance), self.order.tobytes()))

    def __repr__(self) -> str:
        k = len(self.order)
        head = ",".join(str(c) for c in self.order[:6])
        tail = ",..." if k > 6 else ""
        return f"Tour(k={k}, length={self._length}, order=[{head}{tail}])"


def random_tour(instance: TspInstance, rng: np.random.Generator) -> Tour:
    """Uniformly random tour of ``instance``."""
    return Tour(instance, rng.permutation(instance.dimension), validate=False)
