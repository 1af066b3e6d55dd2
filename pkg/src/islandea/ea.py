"""Sequential EA layer: inver-over variation, segment-transplant crossover,
adaptive rates and the evolutionary-velocity gate.

Selection is strictly parent-versus-offspring: each individual is replaced by
its inver-over offspring only if the offspring is no longer. The transplant
("mapping") operator is a stagnation response, enabled only while the best
length improves slowly, and rewrites the worse member of a random pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import _kernels
from .tour import Tour

if TYPE_CHECKING:
    from .islands import Island

__all__ = [
    "RateSchedule",
    "VelocityState",
    "current_rates",
    "evolutionary_velocity",
    "mapping_allowed",
    "inver_over_step",
    "mapping_operator",
    "evolve_generation",
]


@dataclass
class RateSchedule:
    """Linear schedules for the blind-inversion and transplant rates.

    Over the planned horizon of ``g_total`` generations the mutation rate
    falls from p_mu0 to half of it while the mapping rate rises from p_ma0 to
    three times it.
    """

    g_total: int
    p_mu0: float = 0.02
    p_ma0: float = 0.05
    g_n: int = 0

    def __post_init__(self):
        if self.g_total < 1:
            raise ValueError(f"g_total must be >= 1, got {self.g_total}")
        if not (0.0 <= self.p_mu0 <= 1.0 and 0.0 <= self.p_ma0 <= 1.0):
            raise ValueError("initial rates must lie in [0, 1]")


def current_rates(schedule: RateSchedule) -> tuple[float, float]:
    """Instantaneous (p_mu, p_ma) at the schedule's generation counter.

    Counters past the horizon are clamped to it.
    """
    g = min(max(schedule.g_n, 0), schedule.g_total)
    frac = g / schedule.g_total
    return (schedule.p_mu0 * (1.0 - 0.5 * frac),
            schedule.p_ma0 * (2.0 * frac + 1.0))


@dataclass
class VelocityState:
    """Improvement speed of a subpopulation's best length.

    ``f_b`` is the best length ever seen, ``f_b_prev`` the previous distinct
    best and ``delta_g`` the generations between their appearances. Before the
    first improvement event the velocity is taken as +inf, which keeps the
    transplant operator disabled during the initial descent.
    """

    threshold: float = 5000.0
    f_b: float = math.inf
    f_b_prev: float = math.inf
    delta_g: int = 0
    improvements: int = 0
    last_improvement_gen: int = 0

    def to_buffer(self) -> np.ndarray:
        buf = np.empty(5, dtype=np.float64)
        buf[_kernels.VS_BEST] = self.f_b
        buf[_kernels.VS_PREV] = self.f_b_prev
        buf[_kernels.VS_DELTA_G] = self.delta_g
        buf[_kernels.VS_IMPROVEMENTS] = self.improvements
        buf[_kernels.VS_LAST_GEN] = self.last_improvement_gen
        return buf

    def update_from_buffer(self, buf: np.ndarray) -> None:
        self.f_b = float(buf[_kernels.VS_BEST])
        self.f_b_prev = float(buf[_kernels.VS_PREV])
        self.delta_g = int(buf[_kernels.VS_DELTA_G])
        self.improvements = int(buf[_kernels.VS_IMPROVEMENTS])
        self.last_improvement_gen = int(buf[_kernels.VS_LAST_GEN])


def evolutionary_velocity(state: VelocityState) -> float:
    """Best-length improvement per generation, ``|f_b - f_b_prev| / delta_g``.

    +inf until the first improvement event exists.
    """
    if state.improvements < 1:
        return math.inf
    if state.delta_g < 1:
        raise ValueError(
            f"delta_g must be >= 1 once an improvement exists, got {state.delta_g}")
    return abs(state.f_b - state.f_b_prev) / state.delta_g


def mapping_allowed(state: VelocityState) -> bool:
    """Transplants run only while the velocity is strictly below the threshold."""
    return evolutionary_velocity(state) < state.threshold


def inver_over_step(parent: Tour, pool: Sequence[Tour], p_mu: float,
                    rng: np.random.Generator) -> Tour:
    """One inver-over offspring of ``parent`` against ``pool``, with selection.

    Guided picks read the successor of the current city in a random pool
    member other than the parent (the parent is matched by object identity).
    The offspring is returned if its length does not exceed the parent's,
    otherwise the parent survives unchanged. At most k inversions are applied
    per offspring.
    """
    if len(pool) < 2:
        raise ValueError(f"pool must contain at least 2 tours, got {len(pool)}")
    if not 0.0 <= p_mu <= 1.0:
        raise ValueError(f"p_mu must lie in [0, 1], got {p_mu}")
    k = parent.dimension
    child_order = parent.order.copy()
    child_pos = parent.position.copy()
    pool_orders = np.stack([t.order for t in pool])
    pool_pos = np.stack([t.position for t in pool])
    self_idx = next((i for i, t in enumerate(pool) if t is parent), -1)
    w = parent.instance.distance_matrix()
    undo = np.empty(k, dtype=np.int64), np.empty(k, dtype=np.int64)
    new_len, _ = _kernels.inver_over_inplace(
        child_order, child_pos, parent.length, pool_orders, pool_pos,
        self_idx, p_mu, k, w, rng, undo[0], undo[1])
    if new_len <= parent.length:
        return Tour(parent.instance, child_order, length=int(new_len),
                    validate=False)
    return parent


def mapping_operator(a: Tour, b: Tour, rng: np.random.Generator) -> Tour:
    """Transplant a same-anchor, same-size segment from the better tour.

    The worse (longer) of the two receives a random cyclic segment; the
    better tour's segment with the same first city and size replaces it, and
    duplicates are repaired through the position-wise mapping between the old
    and new segment. On equal lengths the second argument counts as worse.
    Returns the repaired tour; the inputs are unchanged.
    """
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    worse, better = (a, b) if a.length > b.length else (b, a)
    k = worse.dimension
    seg_start = int(rng.integers(0, k))
    seg_len = 2 + int(rng.integers(0, k - 2))
    order = worse.order.copy()
    pos = worse.position.copy()
    w = worse.instance.distance_matrix()
    donor = np.empty(k, dtype=np.int64)
    old_seg = np.empty(k, dtype=np.int64)
    donor_slot = np.full(k, -1, dtype=np.int64)
    new_len = _kernels.mapping_transplant(
        order, pos, better.order, better.position, seg_start, seg_len, w,
        donor, old_seg, donor_slot)
    return Tour(worse.instance, order, length=int(new_len), validate=False)


def evolve_generation(island: "Island", inst=None, schedule: RateSchedule | None = None,
                      velocity: VelocityState | None = None,
                      rng: np.random.Generator | None = None) -> "Island":
    """Advance one island by a single generation.

    Runs the inver-over sweep over every individual, then at most one
    velocity-gated transplant on a uniformly chosen pair, updates the
    velocity state if the island best improved, and increments the schedule
    counter. ``schedule``, ``velocity`` and ``rng`` default to the island's
    own state.
    """
    return island.evolve(1, instance=inst, schedule=schedule,
                         velocity=velocity, rng=rng)
