"""Completeness semantics, Phi enumeration, closure invariants."""

import itertools
import random

import pytest

from treepack import (
    DimensionMismatchError,
    EdgeOrientation,
    Labeling,
    NotAPermutationError,
    NotAutomorphismError,
    NotCompleteError,
    closure_check,
    diagonal_relabel,
    family_enumerate,
    generate_family,
    induced_edges,
    is_complete,
    orientation,
    phi_enumerate,
    star_family,
)
from treepack.solver import pack, star_identity_labeling


def complete_oracle(family, labeling, classical=False):
    """Straight reimplementation of the tiling condition.

    Collect the unordered pair {sigma_k(v), sigma_k(g_k(v))} for every
    component vertex of every slot; complete means all pairs distinct and
    (in the looped reading) every one of the n(n+1)/2 pairs present.
    """
    n = family.n
    pairs = []
    for k in range(n):
        g = family.slot_form(k).map
        sig = labeling.sigmas[k]
        for v in range(k + 1):
            a, b = sig[v], sig[g[v]]
            pair = (min(a, b), max(a, b))
            if classical and a == b:
                continue
            pairs.append(pair)
    want = n * (n - 1) // 2 if classical else n * (n + 1) // 2
    return len(pairs) == want and len(set(pairs)) == want


def all_labelings(n):
    perms = list(itertools.permutations(range(n)))
    for combo in itertools.product(perms, repeat=n):
        yield Labeling(n=n, sigmas=combo)


# --- arcs and completeness ----------------------------------------------


def test_induced_edges_star_slot():
    fam = star_family(4)
    arcs = induced_edges(fam.slot_form(2), (3, 1, 0, 2))
    # component 0,1,2 of the root-at-2 star: everything points at 2 -> 0
    assert arcs == [(3, 0), (1, 0), (0, 0)]


def test_is_complete_matches_oracle_exhaustively_n3():
    for fam in family_enumerate(3):
        for lab in all_labelings(3):
            assert is_complete(fam, lab) == complete_oracle(fam, lab)
            assert is_complete(fam, lab, classical=True) == complete_oracle(
                fam, lab, classical=True
            )


def test_is_complete_matches_oracle_on_random_labelings():
    rng = random.Random(2024)
    for trial in range(200):
        n = rng.randrange(2, 9)
        fam = generate_family(n, "mixed", seed=trial)
        sig = []
        for _ in range(n):
            row = list(range(n))
            rng.shuffle(row)
            sig.append(tuple(row))
        lab = Labeling(n=n, sigmas=tuple(sig))
        assert is_complete(fam, lab) == complete_oracle(fam, lab)


def test_solver_output_passes_oracle():
    for seed in range(20):
        fam = generate_family(7, "random-uniform", seed=seed)
        res = pack(fam)
        assert res.status == "packed"
        assert complete_oracle(fam, res.labeling)


def test_star_identity_is_complete_up_to_30():
    for n in range(1, 31):
        assert is_complete(star_family(n), star_identity_labeling(n))


def test_classical_mode_ignores_loop_collisions():
    # slot 0 puts its loop on 0, slot 1 (sigma = swap) puts its loop on 0
    # too: dead in the looped reading, fine classically since the single
    # proper edge {0,1} is all that is asked for
    fam = star_family(2)
    lab = Labeling(n=2, sigmas=((0, 1), (1, 0)))
    assert not is_complete(fam, lab)
    assert is_complete(fam, lab, classical=True)
    assert complete_oracle(fam, lab, classical=True)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        is_complete(star_family(3), Labeling.identity(4))


# --- orientation --------------------------------------------------------


def test_orientation_arcs_and_not_complete():
    fam = star_family(3)
    orient = orientation(fam, star_identity_labeling(3))
    assert len(orient.arcs) == 6
    assert orient.sorted_arcs() == sorted(orient.arcs)
    bad = Labeling(n=3, sigmas=((1, 0, 2), (0, 1, 2), (0, 1, 2)))
    if not is_complete(fam, bad):
        with pytest.raises(NotCompleteError):
            orientation(fam, bad)


def test_edge_orientation_validation():
    EdgeOrientation(n=2, arcs=frozenset({(0, 0), (1, 0), (1, 1)}))
    with pytest.raises(NotCompleteError):
        EdgeOrientation(n=2, arcs=frozenset({(0, 0), (1, 1)}))  # missing pair
    with pytest.raises(NotCompleteError):
        EdgeOrientation(n=2, arcs=frozenset({(0, 0), (0, 1), (1, 0), (1, 1)}))


# --- Phi ----------------------------------------------------------------


def test_phi_enumerate_against_brute_force():
    """Independent derivation: filter every labeling of Z_3 through the
    oracle, collapse to the essential injection prefixes, compare."""
    for fam in family_enumerate(3):
        members, count = phi_enumerate(fam, mode="essential")
        assert count == len(members)
        brute = set()
        for lab in all_labelings(3):
            if complete_oracle(fam, lab):
                brute.add(tuple(lab.sigmas[k][: k + 1] for k in range(3)))
        assert {
            tuple(m.sigmas[k][: k + 1] for k in range(3)) for m in members
        } == brute
        assert len(members) == len(brute)


def test_phi_full_count_multiplier():
    fam = next(family_enumerate(3))
    _, essential = phi_enumerate(fam, mode="essential")
    _, full = phi_enumerate(fam, mode="full-count")
    assert full == essential * 2  # times prod (n-k-1)! = 2!*1!*0!


def test_phi_members_are_complete_and_sorted():
    fam = next(family_enumerate(4))
    members, _ = phi_enumerate(fam, mode="essential")
    assert all(is_complete(fam, m) for m in members)
    keys = [m.sigmas for m in members]
    assert keys == sorted(keys)


def test_phi_enumerate_bounds():
    from treepack import BoundExceededError

    with pytest.raises(BoundExceededError):
        phi_enumerate(star_family(7), mode="essential")
    with pytest.raises(BoundExceededError):
        phi_enumerate(star_family(5), mode="full-count")


# --- closure ------------------------------------------------------------


def test_closure_under_leaf_transposition():
    """Swapping two sibling leaves of one slot keeps completeness."""
    fam = star_family(3)
    lab = star_identity_labeling(3)
    # slot 2's star rooted at 2 has leaves 0 and 1
    assert closure_check(fam, lab, (1, 0, 2), slot=2)


def test_closure_rejects_non_automorphism():
    fam = star_family(3)
    lab = star_identity_labeling(3)
    with pytest.raises(NotAutomorphismError):
        closure_check(fam, lab, (0, 2, 1), slot=2)  # moves the component


def test_closure_exhaustive_small():
    """Every Phi member of every n=3 family, every sibling-leaf swap."""
    from treepack.functree import leaf_sibling_groups

    for fam in family_enumerate(3):
        members, _ = phi_enumerate(fam, mode="essential")
        for lab in members:
            for k in range(3):
                rooted = fam.slot_form(k)
                for grp in leaf_sibling_groups(rooted):
                    for a, b in itertools.combinations(grp, 2):
                        tau = list(range(3))
                        tau[a], tau[b] = tau[b], tau[a]
                        assert closure_check(fam, lab, tuple(tau), slot=k)


def test_diagonal_relabel_preserves_completeness():
    rng = random.Random(77)
    for seed in range(15):
        fam = generate_family(6, "mixed", seed=seed)
        res = pack(fam)
        gamma = list(range(6))
        rng.shuffle(gamma)
        moved = diagonal_relabel(res.labeling, tuple(gamma))
        assert is_complete(fam, moved)


def test_labeling_validation():
    with pytest.raises(NotAPermutationError):
        Labeling(n=2, sigmas=((0, 0), (0, 1)))
    with pytest.raises(DimensionMismatchError):
        Labeling(n=3, sigmas=((0, 1, 2),))
