"""Labelings that pack a tree family edge-disjointly into looped K_n.

A labeling assigns one permutation of Z_n to each slot of a family.  Slot
k contributes the arcs (sigma_k(v), sigma_k(g_k(v))) of its root-at-k
tree, one per component vertex, the root's arc being a loop.  The
labeling is *complete* when the underlying unordered edges — n loops plus
binomial(n, 2) pairs — are pairwise distinct, i.e. they tile the complete
graph with a loop at every vertex.  Phi(family) is the set of complete
labelings; its members restricted to the components ("essential"
injections) determine membership, the remaining values being free fills.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._search import search
from .errors import (
    BoundExceededError,
    DimensionMismatchError,
    NotAutomorphismError,
    NotCompleteError,
)
from .functree import (
    AugFuncTree,
    AugTreeFamily,
    Mapping,
    check_permutation,
    conjugate,
)

# Full enumeration of essential injections is exponential in n; these caps
# keep the exhaustive modes inside interactive budgets (~seconds).
PHI_ESSENTIAL_MAX_N = 6
PHI_FULL_COUNT_MAX_N = 4


@dataclass(frozen=True)
class Labeling:
    """One permutation of Z_n per slot, slot k relabeling tree k."""

    n: int
    sigmas: tuple[Mapping, ...]

    def __post_init__(self) -> None:
        sigmas = tuple(check_permutation(s, self.n) for s in self.sigmas)
        if len(sigmas) != self.n:
            raise DimensionMismatchError(
                f"labeling on Z_{self.n} needs {self.n} permutations, got {len(sigmas)}"
            )
        object.__setattr__(self, "sigmas", sigmas)

    @classmethod
    def identity(cls, n: int) -> "Labeling":
        return cls(n=n, sigmas=tuple(tuple(range(n)) for _ in range(n)))


@dataclass(frozen=True)
class EdgeOrientation:
    """An orientation of looped K_n: all n loops plus one direction per pair."""

    n: int
    arcs: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        arcs = frozenset((int(a), int(b)) for a, b in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        seen = set()
        for a, b in arcs:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise NotCompleteError(f"arc ({a},{b}) outside Z_{self.n}")
            edge = (a, b) if a <= b else (b, a)
            if edge in seen:
                raise NotCompleteError(f"edge {edge} oriented twice")
            seen.add(edge)
        want = self.n * (self.n + 1) // 2
        if len(seen) != want:
            raise NotCompleteError(
                f"{len(seen)} distinct edges, an orientation of looped K_{self.n} has {want}"
            )

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)


# =====================================================================
# Arc extraction and completeness
# =====================================================================

def induced_edges(tree: AugFuncTree, sigma) -> list[tuple[int, int]]:
    """Arcs of a relabeled tree, one per component vertex, ascending.

    ``tree`` is used as given (callers pass the root-at-k form), so the
    arc for vertex v is (sigma(v), sigma(tree.map(v))); the root yields
    the loop.
    """
    sigma = check_permutation(sigma, tree.n)
    return [(sigma[v], sigma[tree.map[v]]) for v in tree.component()]


def _pair_bit(a: int, b: int, n: int) -> int:
    if a > b:
        a, b = b, a
    return 1 << (a * n + b)

def is_complete(family: AugTreeFamily, labeling: Labeling, classical: bool = False) -> bool:
    """True iff the labeling's arcs tile looped K_n edge-disjointly.

    The arcs of slot k are read from the stored root-0 tree through the
    (0 k) swap, avoiding any tree reconstruction: this is the hot
    verification path.  ``classical`` drops the n loops and only asks the
    binomial(n, 2) proper edges to be distinct.
    """
    if labeling.n != family.n:
        raise DimensionMismatchError(
            f"labeling on Z_{labeling.n} against family on Z_{family.n}"
        )
    n = family.n
    seen = 0
    for k in range(n):
        h = family.trees[k].map
        sig = labeling.sigmas[k]
        start = 1 if classical else 0
        for v in range(start, k + 1):
            cv = k if v == 0 else 0 if v == k else v
            w = h[v]
            cw = k if w == 0 else 0 if w == k else w
            bit = _pair_bit(sig[cv], sig[cw], n)
            if seen & bit:
                return False
            seen |= bit
    return True


def orientation(family: AugTreeFamily, labeling: Labeling) -> EdgeOrientation:
    """The arc set of a complete labeling; NotCompleteError on any clash."""
    if labeling.n != family.n:
        raise DimensionMismatchError(
            f"labeling on Z_{labeling.n} against family on Z_{family.n}"
        )
    arcs: list[tuple[int, int]] = []
    seen = 0
    for k in range(family.n):
        for a, b in induced_edges(family.slot_form(k), labeling.sigmas[k]):
            bit = _pair_bit(a, b, family.n)
            if seen & bit:
                raise NotCompleteError(
                    f"slot {k} reuses edge {(min(a, b), max(a, b))}"
                )
            seen |= bit
            arcs.append((a, b))
    return EdgeOrientation(n=family.n, arcs=frozenset(arcs))


# =====================================================================
# Phi enumeration
# =====================================================================

def _labeling_from_injections(n: int, injections) -> Labeling:
    """Extend per-slot component injections to permutations, unused values
    filled ascending into the positions above the component."""
    sigmas = []
    for k, phi in enumerate(injections):
        sig = [-1] * n
        for v in range(k + 1):
            cv = k if v == 0 else 0 if v == k else v
            sig[cv] = phi[v]
        fill = sorted(set(range(n)) - set(phi))
        for pos in range(k + 1, n):
            sig[pos] = fill.pop(0)
        sigmas.append(tuple(sig))
    return Labeling(n=n, sigmas=tuple(sigmas))


def phi_enumerate(family: AugTreeFamily, mode: str = "essential") -> tuple[list[Labeling], int]:
    """All essential members of Phi, plus a count.

    ``essential`` counts labelings up to the free values outside each
    component (each listed member extends its injections by the ascending
    fill).  ``full-count`` returns the same member list but the count of
    the whole of Phi, which is the essential count times
    prod_k (n-k-1)!.  Bounds: n <= 6 / n <= 4 (BoundExceededError).
    """
    n = family.n
    if mode not in ("essential", "full-count"):
        raise ValueError(f"unknown phi_enumerate mode {mode!r}")
    cap = PHI_ESSENTIAL_MAX_N if mode == "essential" else PHI_FULL_COUNT_MAX_N
    if n > cap:
        raise BoundExceededError(
            f"phi_enumerate({mode}) is exhaustive; n={n} exceeds the cap {cap}"
        )
    outcome = search(
        family,
        tree_order="largest-first",
        symmetry_pruning=False,
        classical=False,
        first_only=False,
    )
    members = sorted(
        (_labeling_from_injections(n, sol) for sol in outcome.solutions),
        key=lambda lab: lab.sigmas,
    )
    count = len(members)
    if mode == "full-count":
        count *= math.prod(math.factorial(n - k - 1) for k in range(n))
    return members, count


# =====================================================================
# Closure checks
# =====================================================================

def closure_check(family: AugTreeFamily, labeling: Labeling, tau, slot: int) -> bool:
    """Does right-composing one slot with a tree symmetry keep completeness?

    ``tau`` must commute with the slot's root-at-k map and fix its
    component setwise (NotAutomorphismError otherwise: a symmetry that
    moved the component would drag the slot's loop off its vertex).  The
    input labeling itself must be complete.
    """
    n = family.n
    tau = check_permutation(tau, n)
    g = family.slot_form(slot)
    if conjugate(g.map, tau) != g.map:
        raise NotAutomorphismError(
            f"permutation does not commute with the slot-{slot} map"
        )
    comp = set(g.component())
    if {tau[v] for v in comp} != comp:
        raise NotAutomorphismError(
            f"permutation does not preserve the slot-{slot} component"
        )
    if not is_complete(family, labeling):
        raise NotCompleteError("closure_check needs a complete labeling")
    sig = labeling.sigmas[slot]
    composed = tuple(sig[tau[v]] for v in range(n))
    sigmas = list(labeling.sigmas)
    sigmas[slot] = composed
    return is_complete(family, Labeling(n=n, sigmas=tuple(sigmas)))


def diagonal_relabel(labeling: Labeling, gamma) -> Labeling:
    """Left-compose every slot with one permutation of the vertex labels."""
    gamma = check_permutation(gamma, labeling.n)
    return Labeling(
        n=labeling.n,
        sigmas=tuple(tuple(gamma[x] for x in sig) for sig in labeling.sigmas),
    )
