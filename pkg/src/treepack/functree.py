"""Functional trees: self-maps of Z_n that collapse to a single root.

A self-map g of Z_n = {0, ..., n-1} is stored as a tuple of images, so
``g[v]`` is where v points.  Such a map describes a rooted spanning tree
exactly when the (n-1)-fold iterate sends every vertex to one point, the
root, which is then the unique fixed point.  An *augmented* tree relaxes
this: a component of m vertices carries the tree structure while every
vertex outside it sits on its own loop.  Sequences of augmented trees with
component sizes 1, 2, ..., n (one tree per size, in a canonical
parent-decreasing form) are the families the rest of the package packs
into the looped complete graph and certifies algebraically.

Conventions used throughout:

* stored families keep every root at vertex 0 with ``map[u] < u`` inside
  the component ("semigroup form"); the packing semantics for slot k wants
  the root at vertex k, obtained by conjugating with the transposition
  (0 k) — see :meth:`AugTreeFamily.slot_form`;
* a one-vertex component is a bare loop, so edge-oriented operations
  (sibling leaves, local composition) refuse it with SingletonTreeError.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import product

from .errors import (
    BadSizeError,
    InvalidFamilyError,
    NotAPermutationError,
    NotATreeError,
    OutOfRangeError,
    SingletonTreeError,
)

Mapping = tuple[int, ...]

GENERATOR_KINDS = ("star", "path", "caterpillar", "random-recursive", "random-uniform")


# =====================================================================
# Plain self-map operations
# =====================================================================

def _check_self_map(g) -> Mapping:
    g = tuple(g)
    if not g:
        raise BadSizeError("a self-map needs at least one vertex")
    n = len(g)
    for v, w in enumerate(g):
        if not isinstance(w, int) or isinstance(w, bool) or not 0 <= w < n:
            raise OutOfRangeError(f"map value {w!r} at vertex {v} is outside Z_{n}")
    return g


def iterate(g, j: int) -> Mapping:
    """j-fold composition of g with itself; j = 0 gives the identity."""
    g = _check_self_map(g)
    if j < 0:
        raise ValueError("iteration count must be non-negative")
    cur = tuple(range(len(g)))
    for _ in range(j):
        cur = tuple(g[v] for v in cur)
    return cur


def is_functional_tree(g) -> bool:
    """True iff the (n-1)-fold iterate of g has a one-point image."""
    g = _check_self_map(g)
    return len(set(iterate(g, len(g) - 1))) == 1


def conjugate(g, gamma) -> Mapping:
    """Relabel a self-map by a permutation: vertex gamma(v) points to gamma(g(v))."""
    g = _check_self_map(g)
    gamma = check_permutation(gamma, len(g))
    out = [0] * len(g)
    for v, w in enumerate(g):
        out[gamma[v]] = gamma[w]
    return tuple(out)


def check_permutation(p, n: int) -> Mapping:
    p = tuple(p)
    if len(p) != n or sorted(p) != list(range(n)):
        raise NotAPermutationError(f"{p!r} is not a permutation of Z_{n}")
    return p


def _component_depths(g: Mapping, root: int, members: frozenset[int]) -> dict[int, int]:
    """Distance to the root for every member, following the map.

    Raises NotATreeError when a member's orbit cycles or escapes the
    member set before reaching the root.  O(len(members)) overall.
    """
    depth = {root: 0}
    for start in members:
        path: list[int] = []
        on_path: set[int] = set()
        v = start
        while v not in depth:
            if v in on_path or v not in members:
                raise NotATreeError(
                    f"vertex {start} does not reach the root {root}"
                )
            on_path.add(v)
            path.append(v)
            v = g[v]
        d = depth[v]
        for u in reversed(path):
            d += 1
            depth[u] = d
    return depth


# =====================================================================
# Augmented functional trees
# =====================================================================

@dataclass(frozen=True)
class AugFuncTree:
    """An m-vertex functional tree inside Z_n, every other vertex a loop.

    ``m == n`` is the plain spanning functional tree.  The component is
    the set of non-fixed vertices together with the root; validation
    checks that it has exactly m vertices all of which reach the root.
    Instances are immutable and safe to share between families.
    """

    n: int
    m: int
    map: Mapping
    root: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise BadSizeError("ambient vertex count must be positive")
        if not 1 <= self.m <= self.n:
            raise BadSizeError(f"component size {self.m} not within 1..{self.n}")
        g = _check_self_map(self.map)
        if len(g) != self.n:
            raise BadSizeError(f"map has {len(g)} entries, expected {self.n}")
        object.__setattr__(self, "map", g)
        if not 0 <= self.root < self.n:
            raise OutOfRangeError(f"root {self.root} outside Z_{self.n}")
        if g[self.root] != self.root:
            raise NotATreeError(f"root {self.root} is not a fixed point")
        members = frozenset(v for v in range(self.n) if g[v] != v) | {self.root}
        if len(members) != self.m:
            raise NotATreeError(
                f"component has {len(members)} vertices, expected {self.m}"
            )
        _component_depths(g, self.root, members)

    # -- structure -----------------------------------------------------

    def component(self) -> tuple[int, ...]:
        return tuple(sorted(
            v for v in range(self.n) if self.map[v] != v or v == self.root
        ))

    def depth_map(self) -> dict[int, int]:
        """Component vertex -> distance to the root."""
        members = frozenset(self.component())
        return _component_depths(self.map, self.root, members)

    def children(self, v: int) -> tuple[int, ...]:
        """Component vertices pointing at v, the root's self-edge excluded."""
        return tuple(sorted(
            u for u in self.component() if self.map[u] == v and u != v
        ))

    def is_spanning(self) -> bool:
        return self.m == self.n


def build_tree(parents, n: int | None = None) -> AugFuncTree:
    """Tree from a parent array on Z_m, augmented with loops up to Z_n.

    ``parents[v]`` is the vertex v points to; the unique fixed entry is
    the root.  Raises OutOfRangeError for entries outside Z_m,
    NotATreeError when the array carries a cycle or falls apart, and
    BadSizeError when m is empty or exceeds n.
    """
    parents = list(parents)
    m = len(parents)
    if n is None:
        n = m
    if m < 1 or m > n:
        raise BadSizeError(f"parent array of length {m} does not fit in Z_{n}")
    for v, p in enumerate(parents):
        if not isinstance(p, int) or isinstance(p, bool) or not 0 <= p < m:
            raise OutOfRangeError(f"parent {p!r} of vertex {v} is outside Z_{m}")
    roots = [v for v, p in enumerate(parents) if p == v]
    if len(roots) != 1:
        raise NotATreeError(
            f"parent array has {len(roots)} fixed points, a tree needs exactly one"
        )
    full = tuple(parents) + tuple(range(m, n))
    return AugFuncTree(n=n, m=m, map=full, root=roots[0])


def sibling_leaf_set(tree: AugFuncTree) -> frozenset[int]:
    """Leaves sharing a parent with a deepest vertex.

    The deepest vertex with the largest label is taken as the reference
    leaf; the set collects every non-root preimage of its parent.  All
    members sit at maximum depth, hence are leaves (asserted).
    """
    if tree.m == 1:
        raise SingletonTreeError("a one-vertex tree has no sibling leaves")
    depths = tree.depth_map()
    maxd = max(depths.values())
    ref = max(v for v, d in depths.items() if d == maxd)
    target = tree.map[ref]
    leaves = frozenset(
        v for v in depths if tree.map[v] == target and v != tree.root
    )
    assert all(not tree.children(v) for v in leaves), "non-leaf sibling"
    return leaves


def local_compose(tree: AugFuncTree) -> AugFuncTree:
    """One composition step: sibling leaves of the deepest vertex hop to
    their grandparent; everything else keeps its image."""
    leaves = sibling_leaf_set(tree)  # SingletonTreeError for m == 1
    g = tree.map
    new = tuple(g[g[v]] if v in leaves else g[v] for v in range(tree.n))
    return AugFuncTree(n=tree.n, m=tree.m, map=new, root=tree.root)


def canonical_form(tree: AugFuncTree) -> tuple[AugFuncTree, Mapping]:
    """Relabel breadth-first so the component becomes Z_m in semigroup form.

    Returns ``(relabeled, gamma)`` where gamma is the witnessing
    permutation of Z_n: ``conjugate(tree.map, gamma) == relabeled.map``.
    The root gets label 0, children are visited in ascending original
    order, and vertices outside the component take the remaining labels
    in ascending original order.
    """
    new_label: dict[int, int] = {tree.root: 0}
    queue = [tree.root]
    while queue:
        v = queue.pop(0)
        for u in tree.children(v):
            new_label[u] = len(new_label)
            queue.append(u)
    outside = (v for v in range(tree.n) if v not in new_label)
    for v in sorted(outside):
        new_label[v] = len(new_label)
    gamma = tuple(new_label[v] for v in range(tree.n))
    relabeled = AugFuncTree(
        n=tree.n, m=tree.m, map=conjugate(tree.map, gamma), root=0
    )
    return relabeled, gamma


# =====================================================================
# Generators
# =====================================================================

def generate(kind: str, m: int, n: int | None = None, seed: int = 0) -> AugFuncTree:
    """Seeded tree generator; identical arguments give identical trees.

    Kinds: ``star``, ``path``, ``caterpillar`` (seeded spine length,
    leaves on seeded spine vertices), ``random-recursive`` (vertex u picks
    a uniform parent below it, uniform over semigroup-form trees) and
    ``random-uniform`` (uniform labeled rooted tree, decoded from a
    Pruefer sequence, then canonicalized).  Output is always in
    semigroup form.
    """
    if n is None:
        n = m
    if m < 1 or m > n:
        raise BadSizeError(f"component size {m} not within 1..{n}")
    rng = random.Random(seed)
    if kind == "star":
        parents = [0] * m
    elif kind == "path":
        parents = [0] + [v - 1 for v in range(1, m)]
    elif kind == "caterpillar":
        spine = rng.randint(1, m)
        parents = [0] + [v - 1 for v in range(1, spine)]
        parents += [rng.randrange(spine) for _ in range(m - spine)]
    elif kind == "random-recursive":
        parents = [0] + [rng.randrange(v) for v in range(1, m)]
    elif kind == "random-uniform":
        parent_map, root = _uniform_rooted_tree(m, rng)
        raw = AugFuncTree(
            n=n, m=m, map=tuple(parent_map) + tuple(range(m, n)), root=root
        )
        return canonical_form(raw)[0]
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return build_tree(parents, n)


def _uniform_rooted_tree(m: int, rng: random.Random) -> tuple[list[int], int]:
    """Uniform rooted labeled tree on Z_m as (parent map, root).

    Pruefer decoding gives the uniform unrooted tree (m^(m-2) of them);
    an independent uniform root choice lifts that to all m^(m-1) rooted
    trees.
    """
    if m == 1:
        return [0], 0
    seq = [rng.randrange(m) for _ in range(m - 2)]
    degree = [1] * m
    for v in seq:
        degree[v] += 1
    edges: list[tuple[int, int]] = []
    candidates = sorted(v for v in range(m) if degree[v] == 1)
    for v in seq:
        leaf = candidates.pop(0)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            # keep the candidate list sorted; insertion point found linearly
            i = 0
            while i < len(candidates) and candidates[i] < v:
                i += 1
            candidates.insert(i, v)
    edges.append((candidates[0], candidates[1]))
    root = rng.randrange(m)
    adj: dict[int, list[int]] = {v: [] for v in range(m)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [0] * m
    parent[root] = root
    stack = [root]
    seen = {root}
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                parent[u] = v
                stack.append(u)
    return parent, root


def star_family(n: int) -> AugTreeFamily:
    """The family whose size-(k+1) slot is a star: identity labels pack it."""
    return AugTreeFamily(
        n=n, trees=tuple(generate("star", k + 1, n) for k in range(n))
    )


def generate_family(n: int, kind: str = "random-uniform", seed: int = 0) -> AugTreeFamily:
    """Seeded family: one generated tree per component size 1..n.

    ``kind`` may be any single generator kind or ``mixed``, which picks a
    kind per slot.  Per-slot sub-seeds are drawn from one stream, so the
    family is a pure function of (n, kind, seed).
    """
    if n < 1:
        raise BadSizeError("a family needs at least one vertex")
    rng = random.Random(seed)
    trees = []
    for k in range(n):
        slot_kind = rng.choice(GENERATOR_KINDS) if kind == "mixed" else kind
        trees.append(generate(slot_kind, k + 1, n, seed=rng.randrange(2**62)))
    return AugTreeFamily(n=n, trees=tuple(trees))


# =====================================================================
# Families
# =====================================================================

@dataclass(frozen=True)
class AugTreeFamily:
    """One augmented tree per component size 1..n, all in semigroup form.

    Slot k holds the tree with component Z_(k+1): root 0, every other
    component vertex pointing strictly downward, identity outside.  The
    family therefore fixes exactly the data the packing solver and the
    certificate consume.
    """

    n: int
    trees: tuple[AugFuncTree, ...]

    def __post_init__(self) -> None:
        trees = tuple(self.trees)
        object.__setattr__(self, "trees", trees)
        if self.n < 1:
            raise BadSizeError("a family needs at least one vertex")
        if len(trees) != self.n:
            raise InvalidFamilyError(
                f"family on Z_{self.n} needs {self.n} trees, got {len(trees)}"
            )
        for k, t in enumerate(trees):
            if not isinstance(t, AugFuncTree):
                raise InvalidFamilyError(f"slot {k} is not an AugFuncTree")
            if t.n != self.n:
                raise InvalidFamilyError(
                    f"slot {k} lives in Z_{t.n}, family in Z_{self.n}"
                )
            if t.m != k + 1 or t.root != 0:
                raise InvalidFamilyError(
                    f"slot {k} must have component size {k + 1} rooted at 0"
                )
            for u in range(self.n):
                w = t.map[u]
                if u <= k and not (w < u or u == 0):
                    raise InvalidFamilyError(
                        f"slot {k} is not in semigroup form at vertex {u}"
                    )
                if u > k and w != u:
                    raise InvalidFamilyError(
                        f"slot {k} moves vertex {u} outside its component"
                    )

    def slot_form(self, k: int) -> AugFuncTree:
        """Slot k conjugated by the transposition (0 k): root moves to k.

        This is the form the packing semantics reads arcs from; the
        component is still Z_(k+1).
        """
        if not 0 <= k < self.n:
            raise OutOfRangeError(f"slot {k} outside Z_{self.n}")
        if k == 0:
            return self.trees[0]
        swap = list(range(self.n))
        swap[0], swap[k] = k, 0
        return AugFuncTree(
            n=self.n,
            m=k + 1,
            map=conjugate(self.trees[k].map, tuple(swap)),
            root=k,
        )

    def with_tree(self, k: int, tree: AugFuncTree) -> AugTreeFamily:
        """Copy of the family with slot k replaced (revalidated)."""
        trees = list(self.trees)
        trees[k] = tree
        return AugTreeFamily(n=self.n, trees=tuple(trees))


def compose_square(family: AugTreeFamily) -> AugTreeFamily:
    """Square every slot's map: each vertex hops to its grandparent."""
    trees = tuple(
        AugFuncTree(
            n=t.n, m=t.m, map=tuple(t.map[t.map[v]] for v in range(t.n)), root=t.root
        )
        for t in family.trees
    )
    return AugTreeFamily(n=family.n, trees=trees)


def family_count(n: int) -> int:
    """Number of distinct families on Z_n: product of (m-1)! over sizes m."""
    return math.prod(math.factorial(m - 1) for m in range(1, n + 1))


def family_enumerate(n: int):
    """Yield every family on Z_n, ordered lexicographically by parent arrays.

    Trees are prebuilt once per size and shared between the yielded
    families (they are immutable), so a full n = 6 sweep materializes
    34560 families cheaply.
    """
    if n < 1:
        raise BadSizeError("a family needs at least one vertex")
    per_size: list[list[AugFuncTree]] = []
    for m in range(1, n + 1):
        choices = product(*(range(u) for u in range(1, m)))
        per_size.append([build_tree((0,) + tail, n) for tail in choices])
    for combo in product(*per_size):
        yield AugTreeFamily(n=n, trees=tuple(combo))


def leaf_sibling_groups(tree: AugFuncTree) -> list[tuple[int, ...]]:
    """Maximal groups of >= 2 leaves sharing a parent, ascending.

    Used for search-space pruning (group images may be demanded in
    ascending order) and to enumerate the leaf-swap symmetries.
    """
    groups = []
    for v in tree.component():
        kids = tree.children(v)
        leaf_kids = tuple(u for u in kids if not tree.children(u))
        if len(leaf_kids) >= 2:
            groups.append(leaf_kids)
    return groups
