"""Tree representation, generators, enumeration, composition."""

import itertools
import math
import random

import pytest

from treepack import (
    AugFuncTree,
    AugTreeFamily,
    BadSizeError,
    InvalidFamilyError,
    NotAPermutationError,
    NotATreeError,
    OutOfRangeError,
    SingletonTreeError,
    build_tree,
    canonical_form,
    compose_square,
    conjugate,
    family_count,
    family_enumerate,
    generate,
    generate_family,
    is_functional_tree,
    iterate,
    leaf_sibling_groups,
    local_compose,
    sibling_leaf_set,
    star_family,
)
from treepack.functree import GENERATOR_KINDS


def brute_is_tree(g):
    # the defining property, written as directly as possible: the
    # (n-1)-fold composition collapses everything to one vertex
    n = len(g)
    image = set(range(n))
    for _ in range(max(n - 1, 0)):
        image = {g[v] for v in image}
    return len(image) == 1


def test_iterate_matches_repeated_application():
    g = (2, 0, 2, 2, 1)
    h = tuple(range(5))
    for j in range(6):
        assert iterate(g, j) == h
        h = tuple(g[x] for x in h)


def test_is_functional_tree_agrees_with_brute_force_exhaustively():
    """Every self-map of Z_m for m <= 4, both predicates, plus Cayley's
    count m^(m-1) of rooted labeled trees as an external anchor."""
    for m in range(1, 5):
        trees = 0
        for g in itertools.product(range(m), repeat=m):
            mine = is_functional_tree(g)
            assert mine == brute_is_tree(g), g
            trees += mine
        assert trees == m ** (m - 1)


def test_conjugate_is_a_group_action():
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randrange(2, 8)
        g = tuple(rng.randrange(n) for _ in range(n))
        a = list(range(n))
        b = list(range(n))
        rng.shuffle(a)
        rng.shuffle(b)
        ab = tuple(a[b[v]] for v in range(n))
        assert conjugate(conjugate(g, tuple(b)), tuple(a)) == conjugate(g, ab)
    assert conjugate((0, 0, 1), (0, 1, 2)) == (0, 0, 1)


def test_conjugate_preserves_treeness():
    rng = random.Random(12)
    for _ in range(30):
        m = rng.randrange(1, 7)
        t = generate("random-uniform", m, seed=rng.randrange(10**6))
        gamma = list(range(m))
        rng.shuffle(gamma)
        assert is_functional_tree(conjugate(t.map, tuple(gamma)))


# --- construction -----------------------------------------------------


def test_build_tree_example():
    t = build_tree([0, 0, 1, 1], 6)
    assert t.m == 4 and t.n == 6 and t.root == 0
    assert t.map == (0, 0, 1, 1, 4, 5)
    assert t.component() == (0, 1, 2, 3)
    assert t.depth_map() == {0: 0, 1: 1, 2: 2, 3: 2}
    assert t.children(1) == (2, 3)
    assert not t.is_spanning()
    assert build_tree([0]).map == (0,)


def test_build_tree_rejects_cycles_and_bad_roots():
    with pytest.raises(NotATreeError):
        build_tree([1, 0, 0])  # two-cycle
    with pytest.raises(NotATreeError):
        build_tree([0, 1, 1])  # two fixed points
    with pytest.raises(OutOfRangeError):
        build_tree([0, 3], 4)  # parent outside the component
    with pytest.raises(BadSizeError):
        build_tree([], 3)
    with pytest.raises(BadSizeError):
        build_tree([0, 0, 0], 2)


def test_augfunctree_rejects_moved_outside_vertices():
    with pytest.raises(NotATreeError):
        AugFuncTree(n=3, m=2, map=(0, 0, 0), root=0)


# --- generators --------------------------------------------------------


def test_generators_deterministic_and_valid():
    rng = random.Random(99)
    for kind in GENERATOR_KINDS:
        for _ in range(10):
            m = rng.randrange(1, 9)
            n = m + rng.randrange(0, 4)
            seed = rng.randrange(10**9)
            a = generate(kind, m, n, seed=seed)
            b = generate(kind, m, n, seed=seed)
            assert a == b
            assert a.m == m and a.n == n and a.root == 0
            # treeness is a property of the component, the rest are loops
            assert is_functional_tree(a.map[:m])
            for u in range(1, m):
                assert a.map[u] < u  # semigroup form
            assert a.map[m:] == tuple(range(m, n))


def test_generate_star_and_path_shapes():
    star = generate("star", 5)
    assert star.map == (0, 0, 0, 0, 0)
    path = generate("path", 5)
    assert path.map == (0, 0, 1, 2, 3)
    assert max(path.depth_map().values()) == 4


def test_generate_unknown_kind():
    with pytest.raises(ValueError):
        generate("balanced", 3)


def test_uniform_generator_covers_the_breadth_first_forms():
    """Sanity, not statistics.  Canonicalization relabels level order, so
    parent labels are nondecreasing along the component; at m=4 exactly
    five semigroup forms are monotone like that, and 300 seeded draws
    should find every one of them."""
    seen = {generate("random-uniform", 4, seed=s).map for s in range(300)}
    assert seen == {
        (0, 0, 0, 0),
        (0, 0, 0, 1),
        (0, 0, 0, 2),
        (0, 0, 1, 1),
        (0, 0, 1, 2),
    }


# --- canonical form and composition ------------------------------------


def test_canonical_form_witness():
    rng = random.Random(5)
    for _ in range(20):
        m = rng.randrange(1, 7)
        n = m + rng.randrange(0, 3)
        t = generate("random-uniform", m, n, seed=rng.randrange(10**6))
        gamma = list(range(n))
        rng.shuffle(gamma)
        scrambled = AugFuncTree(
            n=n,
            m=m,
            map=conjugate(t.map, tuple(gamma)),
            root=gamma[t.root],
        )
        canon, witness = canonical_form(scrambled)
        assert canon.root == 0
        assert conjugate(scrambled.map, witness) == canon.map
        for u in range(1, m):
            assert canon.map[u] < u


def test_sibling_leaf_set_and_local_compose():
    # two leaves 2,3 under vertex 1; deepest reference picks them
    t = build_tree([0, 0, 1, 1])
    leaves = sibling_leaf_set(t)
    assert leaves == frozenset({2, 3})
    stepped = local_compose(t)
    assert stepped.map == (0, 0, 0, 0)  # both hop to the grandparent
    with pytest.raises(SingletonTreeError):
        sibling_leaf_set(build_tree([0], 3))


def test_leaf_sibling_groups_partition_leaves():
    t = build_tree([0, 0, 1, 1, 0, 4, 4])
    groups = leaf_sibling_groups(t)
    flat = [v for grp in groups for v in grp]
    assert len(flat) == len(set(flat))
    for grp in groups:
        parents = {t.map[v] for v in grp}
        assert len(parents) == 1
        assert all(not t.children(v) for v in grp)


def test_compose_square_halves_depth_until_star():
    t = build_tree([0, 0, 1, 2, 3, 4, 5, 6])  # path of depth 7
    depths = []
    while True:
        depths.append(max(t.depth_map().values()))
        nxt = compose_square_tree(t)
        if nxt == t:
            break
        t = nxt
    assert depths == [7, 4, 2, 1]  # ceil-halving, star is the fixed point
    assert t.map == (0,) * 8


def compose_square_tree(t):
    # squaring a single tree via the family API on a one-size family is
    # clumsy; do it directly to keep the oracle honest
    g2 = tuple(t.map[t.map[v]] for v in range(t.n))
    return AugFuncTree(n=t.n, m=t.m, map=g2, root=t.root)


def test_compose_square_family_matches_per_tree():
    fam = generate_family(5, "mixed", seed=31)
    sq = compose_square(fam)
    for k in range(5):
        t = fam.trees[k]
        assert sq.trees[k].map == tuple(t.map[t.map[v]] for v in range(5))


# --- families ----------------------------------------------------------


def test_family_count_frozen_values():
    assert [family_count(n) for n in range(1, 7)] == [1, 1, 2, 12, 288, 34560]


def test_family_enumerate_complete_and_ordered():
    fams = list(family_enumerate(4))
    assert len(fams) == 12
    assert len(set(fams)) == 12
    keys = [tuple(t.map for t in f.trees) for f in fams]
    assert keys == sorted(keys)
    for f in fams:
        for k, t in enumerate(f.trees):
            assert t.m == k + 1 and t.root == 0


def test_star_family_and_generate_family():
    fam = star_family(6)
    assert all(t.map[: t.m] == (0,) * t.m for t in fam.trees)
    a = generate_family(7, "mixed", seed=4)
    b = generate_family(7, "mixed", seed=4)
    assert a == b
    assert a != generate_family(7, "mixed", seed=5)


def test_family_validation():
    t1 = build_tree([0], 3)
    t2 = build_tree([0, 0], 3)
    t3 = build_tree([0, 0, 1], 3)
    AugTreeFamily(n=3, trees=(t1, t2, t3))  # fine
    with pytest.raises(InvalidFamilyError):
        AugTreeFamily(n=3, trees=(t1, t2))  # missing a size
    with pytest.raises(InvalidFamilyError):
        AugTreeFamily(n=3, trees=(t1, t3, t2))  # sizes out of order
    with pytest.raises(BadSizeError):
        AugTreeFamily(n=0, trees=())


def test_slot_form_conjugates_root_to_k():
    fam = generate_family(6, "random-recursive", seed=8)
    for k in range(6):
        rooted = fam.slot_form(k)
        assert rooted.root == k
        assert rooted.map[k] == k
        assert sorted(rooted.component()) == list(range(k + 1))
        # conjugating back by the same swap recovers the stored tree
        swap = list(range(6))
        swap[0], swap[k] = k, 0
        assert conjugate(rooted.map, tuple(swap)) == fam.trees[k].map


def test_with_tree_replaces_one_slot():
    fam = star_family(4)
    path3 = build_tree([0, 0, 1], 4)
    out = fam.with_tree(2, path3)
    assert out.trees[2] == path3
    assert out.trees[3] == fam.trees[3]
    with pytest.raises(InvalidFamilyError):
        fam.with_tree(1, path3)  # wrong component size for the slot


def test_check_permutation_errors():
    from treepack.functree import check_permutation

    assert check_permutation([2, 0, 1], 3) == (2, 0, 1)
    with pytest.raises(NotAPermutationError):
        check_permutation([0, 0, 1], 3)
    with pytest.raises(NotAPermutationError):
        check_permutation([0, 1], 3)
