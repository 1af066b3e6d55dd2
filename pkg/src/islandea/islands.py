"""Island scheduler: synchronous rounds of evolution plus ring migration.

All subpopulations evolve the same number of generations between barriers;
at each barrier every island sends random emigrant copies around a
unidirectional ring and then decides about its own inbox. In ``classic`` mode
the inbox always enters; in ``gated`` mode it enters with probability
p = (1 - d**alpha)**beta computed from the receiving island's resident
diversity, and is discarded as a whole otherwise.

Both modes draw the gate variate and record the same diversity traces, so a
classic run and a gated run whose parameters force p = 1 consume identical
random streams and produce bit-identical results. That turns the mode
comparison into a controlled experiment: the two algorithms differ only in
whether the gate is applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .diversity import DiversityParams, diversity_from_orders, success_probability
from .ea import RateSchedule, VelocityState
from .tour import Tour
from .tsplib import TspInstance

__all__ = [
    "MODES",
    "MigrationPolicy",
    "Island",
    "MigrationOutcome",
    "RunResult",
    "CostModelInputs",
    "ring_target",
    "select_emigrants",
    "replace_with_immigrants",
    "migration_round",
    "run_dea",
    "overhead_model",
]

MODES = ("classic", "gated")


@dataclass(frozen=True)
class MigrationPolicy:
    """Topology, cadence and gate settings for migration."""

    interval: int
    rounds: int
    mode: str = "gated"
    size: int = 1
    topology: str = "ring"
    diversity: DiversityParams = field(default_factory=DiversityParams)

    def __post_init__(self):
        if self.interval < 1:
            raise ValueError(f"interval must be >= 1, got {self.interval}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.size < 1:
            raise ValueError(f"migration size must be >= 1, got {self.size}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.topology != "ring":
            raise ValueError(f"only the ring topology is supported, got {self.topology!r}")


def ring_target(island: int, n: int) -> int:
    """Receiver of ``island``'s emigrants on the unidirectional ring."""
    if n < 2:
        raise ValueError(f"a ring needs at least 2 islands, got {n}")
    if not 0 <= island < n:
        raise ValueError(f"island index {island} out of range 0..{n - 1}")
    return (island + 1) % n


class Island:
    """One subpopulation: tours as contiguous arrays plus per-island state.

    The population lives in (ni, k) order/position arrays with cached int64
    lengths so the evolution kernels can run without conversion; the ``tours``
    property materializes Tour snapshots for inspection. Each island owns an
    independent random generator, its rate schedule and its velocity state.
    """

    __slots__ = ("id", "instance", "orders", "positions", "lengths", "rng",
                 "schedule", "velocity", "inbox", "_undo_from", "_undo_to",
                 "_donor", "_old_seg", "_donor_slot")

    def __init__(self, island_id: int, instance: TspInstance, orders: np.ndarray,
                 rng: np.random.Generator, schedule: RateSchedule,
                 velocity_threshold: float = 5000.0):
        ni, k = orders.shape
        if k != instance.dimension:
            raise ValueError(
                f"orders have {k} cities, instance has {instance.dimension}")
        self.id = island_id
        self.instance = instance
        self.orders = np.ascontiguousarray(orders, dtype=np.int64)
        self.positions = np.empty_like(self.orders)
        cols = np.arange(k, dtype=np.int64)
        for i in range(ni):
            self.positions[i, self.orders[i]] = cols
        w = instance.distance_matrix()
        self.lengths = np.array(
            [_kernels.cycle_length(self.orders[i], w) for i in range(ni)],
            dtype=np.int64)
        self.rng = rng
        self.schedule = schedule
        self.velocity = VelocityState(threshold=velocity_threshold,
                                      f_b=float(self.lengths.min()))
        self.inbox: list[Tour] = []
        self._undo_from = np.empty(k, dtype=np.int64)
        self._undo_to = np.empty(k, dtype=np.int64)
        self._donor = np.empty(k, dtype=np.int64)
        self._old_seg = np.empty(k, dtype=np.int64)
        self._donor_slot = np.full(k, -1, dtype=np.int64)

    @classmethod
    def random(cls, island_id: int, instance: TspInstance, size: int,
               rng: np.random.Generator, schedule: RateSchedule,
               velocity_threshold: float = 5000.0) -> "Island":
        if size < 1:
            raise ValueError(f"island size must be >= 1, got {size}")
        k = instance.dimension
        orders = np.stack([rng.permutation(k) for _ in range(size)])
        return cls(island_id, instance, orders, rng, schedule, velocity_threshold)

    @property
    def size(self) -> int:
        return self.orders.shape[0]

    @property
    def tours(self) -> list[Tour]:
        """Snapshot of the population as independent Tour objects."""
        return [self.member(i) for i in range(self.size)]

    def member(self, index: int) -> Tour:
        return Tour(self.instance, self.orders[index],
                    length=int(self.lengths[index]), validate=False)

    def best_index(self) -> int:
        return int(np.argmin(self.lengths))

    def best_length(self) -> int:
        return int(self.lengths.min())

    def set_member(self, index: int, tour: Tour) -> None:
        if tour.dimension != self.orders.shape[1]:
            raise ValueError("tour dimension does not match the island")
        self.orders[index] = tour.order
        self.positions[index] = tour.position
        self.lengths[index] = tour.length

    def evolve(self, n_gens: int, instance: TspInstance | None = None,
               schedule: RateSchedule | None = None,
               velocity: VelocityState | None = None,
               rng: np.random.Generator | None = None) -> "Island":
        """Run ``n_gens`` generations of the EA on this island in place."""
        if self.size < 2:
            raise ValueError("evolution needs a population of at least 2")
        inst = instance if instance is not None else self.instance
        rs = schedule if schedule is not None else self.schedule
        vs = velocity if velocity is not None else self.velocity
        gen = rng if rng is not None else self.rng
        w = inst.distance_matrix()
        k = self.orders.shape[1]
        buf = vs.to_buffer()
        _kernels.evolve_interval(
            self.orders, self.positions, self.lengths, w, gen, n_gens,
            rs.g_n, rs.g_total, rs.p_mu0, rs.p_ma0, vs.threshold, buf,
            k, self._undo_from, self._undo_to, self._donor, self._old_seg,
            self._donor_slot)
        vs.update_from_buffer(buf)
        rs.g_n += n_gens
        return self


def select_emigrants(island: Island, s: int,
                     rng: np.random.Generator | None = None) -> list[Tour]:
    """Copies of ``s`` distinct residents chosen uniformly at random."""
    if s > island.size:
        raise ValueError(f"cannot emigrate {s} of {island.size} residents")
    gen = rng if rng is not None else island.rng
    picks = gen.choice(island.size, size=s, replace=False)
    return [island.member(int(i)) for i in picks]


def replace_with_immigrants(island: Island, migrants: Sequence[Tour],
                            rng: np.random.Generator | None = None) -> Island:
    """Overwrite one uniformly chosen resident per migrant (no repeats)."""
    m = len(migrants)
    if m == 0:
        return island
    if m > island.size:
        raise ValueError(f"cannot place {m} migrants into {island.size} residents")
    gen = rng if rng is not None else island.rng
    targets = gen.choice(island.size, size=m, replace=False)
    for t_idx, migrant in zip(targets, migrants):
        island.set_member(int(t_idx), migrant)
    return island


@dataclass(frozen=True)
class MigrationOutcome:
    island: int
    d: float
    p: float
    accepted: bool


def migration_round(islands: Sequence[Island],
                    policy: MigrationPolicy) -> list[MigrationOutcome]:
    """One synchronous migration round over all islands.

    Emigrant copies are published first, then every island decides about its
    inbox: diversity d is measured over the residents (inbox excluded), the
    gate probability p follows from the policy, and a single uniform draw
    accepts or discards the whole inbox. Classic mode ignores the gate but
    performs the same diversity computation and consumes the same draw, so
    paired-seed runs of the two modes stay comparable.
    """
    n = len(islands)
    if n < 2:
        raise ValueError(f"migration needs at least 2 islands, got {n}")
    g0 = islands[0].schedule.g_n
    for isl in islands:
        if isl.schedule.g_n != g0:
            raise ValueError("islands are not synchronized at the migration barrier")

    for pos, isl in enumerate(islands):
        islands[ring_target(pos, n)].inbox = select_emigrants(isl, policy.size)

    outcomes = []
    for pos, isl in enumerate(islands):
        inbox = isl.inbox
        isl.inbox = []
        report = diversity_from_orders(isl.orders, isl.best_index(),
                                       policy.diversity.measure)
        p = success_probability(report.d, policy.diversity)
        r = isl.rng.random()
        accepted = True if policy.mode == "classic" else bool(r < p)
        if accepted:
            replace_with_immigrants(isl, inbox)
        outcomes.append(MigrationOutcome(island=pos, d=report.d, p=p,
                                         accepted=accepted))
    return outcomes


@dataclass(eq=False)
class RunResult:
    """Outcome of one run: global best plus per-round traces."""

    best_order: np.ndarray
    best_length: int
    best_trace: np.ndarray       # (rounds,) global best-so-far after each round
    diversity_trace: np.ndarray  # (rounds, n_islands)
    p_trace: np.ndarray          # (rounds, n_islands)
    accept_trace: np.ndarray     # (rounds, n_islands) bool
    n_islands: int
    island_size: int
    generations: int             # per island

    def __eq__(self, other) -> bool:
        return (isinstance(other, RunResult)
                and self.best_length == other.best_length
                and self.n_islands == other.n_islands
                and self.island_size == other.island_size
                and self.generations == other.generations
                and np.array_equal(self.best_order, other.best_order)
                and np.array_equal(self.best_trace, other.best_trace)
                and np.array_equal(self.diversity_trace, other.diversity_trace)
                and np.array_equal(self.p_trace, other.p_trace)
                and np.array_equal(self.accept_trace, other.accept_trace))


def run_dea(inst: TspInstance, policy: MigrationPolicy, n_islands: int = 16,
            island_size: int = 100, seed=0, *, velocity_threshold: float = 5000.0,
            p_mu0: float = 0.02, p_ma0: float = 0.05) -> RunResult:
    """Run the full distributed EA and return the best tour found.

    ``seed`` feeds a SeedSequence whose children become the per-island
    streams, so results are reproducible bit-for-bit for a fixed seed and
    independent of how islands are scheduled. ``seed`` may be an int or a
    sequence of ints.
    """
    if n_islands < 2:
        raise ValueError(f"need at least 2 islands, got {n_islands}")
    if island_size < 2:
        raise ValueError(f"need at least 2 tours per island, got {island_size}")
    inst.distance_matrix()
    g_total = policy.interval * policy.rounds
    streams = np.random.SeedSequence(seed).spawn(n_islands)
    islands = [
        Island.random(i, inst, island_size,
                      np.random.Generator(np.random.PCG64(streams[i])),
                      RateSchedule(g_total=g_total, p_mu0=p_mu0, p_ma0=p_ma0),
                      velocity_threshold)
        for i in range(n_islands)
    ]

    best_length = None
    best_order = None
    for isl in islands:
        b = isl.best_index()
        if best_length is None or isl.lengths[b] < best_length:
            best_length = int(isl.lengths[b])
            best_order = isl.orders[b].copy()

    rounds = policy.rounds
    best_trace = np.empty(rounds, dtype=np.int64)
    diversity_trace = np.empty((rounds, n_islands))
    p_trace = np.empty((rounds, n_islands))
    accept_trace = np.empty((rounds, n_islands), dtype=bool)

    for rnd in range(rounds):
        for isl in islands:
            isl.evolve(policy.interval)
            b = isl.best_index()
            if isl.lengths[b] < best_length:
                best_length = int(isl.lengths[b])
                best_order = isl.orders[b].copy()
        for outcome in migration_round(islands, policy):
            diversity_trace[rnd, outcome.island] = outcome.d
            p_trace[rnd, outcome.island] = outcome.p
            accept_trace[rnd, outcome.island] = outcome.accepted
        best_trace[rnd] = best_length

    return RunResult(best_order=best_order, best_length=best_length,
                     best_trace=best_trace, diversity_trace=diversity_trace,
                     p_trace=p_trace, accept_trace=accept_trace,
                     n_islands=n_islands, island_size=island_size,
                     generations=g_total)


@dataclass(frozen=True)
class CostModelInputs:
    """Per-operation timings for the analytical overhead model.

    ``gated_migration_time`` may not exceed ``classic_migration_time``: a
    gated round does at most the work of an ungated one.
    """

    evolve_time: float            # one generation of evolutionary operators
    diversity_time: float         # one diversity computation
    gated_migration_time: float   # one migration round, gate applied
    classic_migration_time: float  # one migration round, no gate
    interval: int
    generations: int

    def __post_init__(self):
        for name in ("evolve_time", "diversity_time", "gated_migration_time",
                     "classic_migration_time"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.gated_migration_time > self.classic_migration_time:
            raise ValueError(
                "gated_migration_time must not exceed classic_migration_time")
        if self.interval < 1:
            raise ValueError(f"interval must be >= 1, got {self.interval}")
        if self.generations < 0:
            raise ValueError(f"generations must be >= 0, got {self.generations}")


def overhead_model(c: CostModelInputs) -> tuple[Fraction, Fraction, Fraction]:
    """Closed-form run times of the gated and classic schedulers.

    Returns (t_gated, t_classic, delta) where
    ``t_gated = (evolve + (diversity + gated_migration) / interval) * generations``,
    ``t_classic = (evolve + classic_migration / interval) * generations`` and
    ``delta = (diversity + gated_migration - classic_migration) / interval *
    generations``. Computed in exact rational arithmetic, so
    ``delta == t_gated - t_classic`` holds identically.
    """
    dt_e = Fraction(c.evolve_time)
    dt_d = Fraction(c.diversity_time)
    dt_m = Fraction(c.gated_migration_time)
    dt_mc = Fraction(c.classic_migration_time)
    i = Fraction(c.interval)
    g = Fraction(c.generations)
    t_gated = (dt_e + (dt_d + dt_m) / i) * g
    t_classic = (dt_e + dt_mc / i) * g
    delta = (dt_d + dt_m - dt_mc) / i * g
    return t_gated, t_classic, delta
