"""Packing solver: find one complete labeling per family, or sweep them all.

pack() drives the bitmask backtracking engine and never trusts it: every
labeling it reports as packed is re-verified edge by edge through the
packing module first.  sweep() runs a whole enumeration of families,
optionally across a process pool; reports are merged by family index so
the parallel output is identical to the serial one.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import islice

from ._search import TREE_ORDERS, search
from .errors import BoundExceededError, TreePackError
from .functree import AugTreeFamily, family_count, family_enumerate, local_compose
from .packing import Labeling, _labeling_from_injections, is_complete

PACKED = "packed"
EXHAUSTED = "exhausted"
TIMED_OUT = "timed-out"

SWEEP_MAX_N = 8


@dataclass(frozen=True)
class SolveConfig:
    """Search options; identical configs give identical SolveResults.

    ``seed`` is recorded for reproducibility of future stochastic
    strategies; the present search is deterministic and never draws from
    it.
    """

    tree_order: str = "largest-first"
    time_limit_ms: int | None = None
    symmetry_pruning: bool = True
    seed: int = 0
    classical_mode: bool = False

    def __post_init__(self) -> None:
        if self.tree_order not in TREE_ORDERS:
            raise ValueError(f"unknown tree order {self.tree_order!r}")
        if self.time_limit_ms is not None and self.time_limit_ms <= 0:
            raise ValueError("time limit must be positive when present")


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one pack() call.

    ``symmetry_factor`` is the exact solution-count multiplier removed by
    the pruning cuts, so an exhausted claim can be re-run unpruned and
    compared.  Packed results always carry a verified labeling.
    """

    status: str
    labeling: Labeling | None
    nodes_expanded: int
    elapsed_ms: float
    symmetry_factor: int = 1


@dataclass(frozen=True)
class FamilyOutcome:
    index: int
    status: str
    nodes: int
    millis: float


@dataclass(frozen=True)
class SweepReport:
    n: int
    total: int
    packed: int
    exhausted: int
    timed_out: int
    nodes_total: int
    elapsed_ms: float
    rows: tuple[FamilyOutcome, ...] = field(repr=False)


def pack(
    family: AugTreeFamily,
    config: SolveConfig | None = None,
    *,
    _blocked_pairs=(),
) -> SolveResult:
    """First complete labeling of one family, or an exhaustion/timeout claim.

    ``_blocked_pairs`` pre-consumes edges and exists purely so tests can
    reach the exhausted branch; valid families always pack.
    """
    cfg = config or SolveConfig()
    t0 = time.perf_counter()
    outcome = search(
        family,
        tree_order=cfg.tree_order,
        symmetry_pruning=cfg.symmetry_pruning,
        classical=cfg.classical_mode,
        first_only=True,
        time_limit_s=None if cfg.time_limit_ms is None else cfg.time_limit_ms / 1000.0,
        blocked_pairs=_blocked_pairs,
    )
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    if outcome.solutions:
        labeling = _labeling_from_injections(family.n, outcome.solutions[0])
        if not is_complete(family, labeling, classical=cfg.classical_mode):
            raise TreePackError("engine produced a non-complete labeling")
        return SolveResult(
            status=PACKED,
            labeling=labeling,
            nodes_expanded=outcome.nodes,
            elapsed_ms=elapsed_ms,
            symmetry_factor=outcome.symmetry_factor,
        )
    status = TIMED_OUT if outcome.timed_out else EXHAUSTED
    return SolveResult(
        status=status,
        labeling=None,
        nodes_expanded=outcome.nodes,
        elapsed_ms=elapsed_ms,
        symmetry_factor=outcome.symmetry_factor,
    )


def star_identity_labeling(n: int) -> Labeling:
    """The identity labeling, complete for the all-star family on any n."""
    return Labeling.identity(n)


# =====================================================================
# Sweeps over every family of a given size
# =====================================================================

def _sweep_chunk(args) -> list[FamilyOutcome]:
    n, start, stop, cfg = args
    rows = []
    for index, family in enumerate(
        islice(family_enumerate(n), start, stop), start=start
    ):
        res = pack(family, cfg)
        rows.append(
            FamilyOutcome(
                index=index, status=res.status, nodes=res.nodes_expanded,
                millis=res.elapsed_ms,
            )
        )
    return rows


def sweep(
    n: int,
    config: SolveConfig | None = None,
    *,
    workers: int = 1,
    max_n: int = SWEEP_MAX_N,
) -> SweepReport:
    """pack() every family on Z_n and tally the outcomes.

    Refuses n beyond ``max_n`` (the enumeration is a product of
    factorials; n = 8 already means 1.7e9 families).  ``workers`` > 1
    splits the enumeration index range over a process pool.
    """
    if n > max_n:
        raise BoundExceededError(
            f"sweep over {family_count(n)} families at n={n} exceeds the cap {max_n}"
        )
    cfg = config or SolveConfig()
    total = family_count(n)
    t0 = time.perf_counter()
    if workers <= 1:
        rows = _sweep_chunk((n, 0, total, cfg))
    else:
        chunk = max(1, -(-total // (workers * 4)))
        jobs = [
            (n, start, min(start + chunk, total), cfg)
            for start in range(0, total, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sweep_chunk, jobs))
        rows = [row for part in parts for row in part]
        rows.sort(key=lambda r: r.index)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    by_status = {PACKED: 0, EXHAUSTED: 0, TIMED_OUT: 0}
    for row in rows:
        by_status[row.status] += 1
    return SweepReport(
        n=n,
        total=total,
        packed=by_status[PACKED],
        exhausted=by_status[EXHAUSTED],
        timed_out=by_status[TIMED_OUT],
        nodes_total=sum(r.nodes for r in rows),
        elapsed_ms=elapsed_ms,
        rows=tuple(rows),
    )


# =====================================================================
# Composition-guided ordering heuristic
# =====================================================================

def star_distance(tree) -> int:
    """Number of one-step leaf compositions until the component is a star."""
    d = 0
    t = tree
    while any(t.map[v] != t.root for v in t.component() if v != t.root):
        t = local_compose(t)
        d += 1
    return d


def composition_guided_order(family: AugTreeFamily) -> list[int]:
    """Slots with at least one edge, farthest-from-star first.

    Advisory only: pack() never consults it.  Distance is the number of
    sibling-leaf composition steps to reach the star of the same size;
    ties break toward the smaller slot index.
    """
    slots = [k for k in range(family.n) if family.trees[k].m >= 2]
    return sorted(slots, key=lambda k: (-star_distance(family.trees[k]), k))
