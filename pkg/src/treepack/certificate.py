"""Exact polynomial certificate for packability.

Give slot k one variable per vertex, written x[k][v], plus a single shared
variable y.  Two polynomial ingredients encode completeness:

* the product of per-slot Vandermonde determinants, which vanishes exactly
  when some slot assigns two vertices the same value, and
* for every pair of arcs taken from two different slots, the difference of
  their monic edge quadratics (y - a)(y - b) - (y - c)(y - d), which is
  the zero polynomial in y exactly when the two arcs coincide as unordered
  pairs.

Their product, evaluated at a permutation sequence, is a nonzero
polynomial in y precisely when the sequence is a complete labeling; its
canonical representative of degree < n per variable on the integer
lattice is nonzero precisely when some complete labeling exists.  That
representative is computed here two independent ways (a sum over the
complete labelings, and brute-force Lagrange interpolation over the whole
lattice) so the two can be cross-checked.

All arithmetic is exact — integer where possible, Fraction elsewhere.
Zero testing is literal, which is the entire point; nothing here may
float.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import gcd

from .errors import (
    BoundExceededError,
    DimensionMismatchError,
    OutOfRangeError,
    ValidationError,
)
from .functree import (
    AugTreeFamily,
    check_permutation,
    compose_square,
    family_enumerate,
    local_compose,
)
from .packing import Labeling, phi_enumerate

# === feasibility bounds =================================================
# The objects grow super-exponentially, so every exhaustive mode carries
# an explicit cap with its cost formula rather than discovering the limit
# by running out of memory.

LAGRANGE_EXPAND_MAX_VARS = 9  # expansion holds up to n^vars monomials
CANONICAL_PHI_MAX_N = 3  # phi-sum walks |Phi| <= (n!)^n certificate terms
CANONICAL_LATTICE_MAX_N = 2  # lattice mode interpolates n^(n*n) points
SUPPORT_CHECK_MAX_N = 3
COMPOSITION_CHECK_MAX_N = 6  # families alone number prod (m-1)! = 34560 at 6

CANONICAL_REP_MODES = ("phi-sum", "lattice")

# A monomial is a tuple of (variable id, exponent) pairs sorted by id with
# all exponents positive; the empty tuple is the constant monomial.
# Variable ids: x[k][v] <-> k*n + v, and y <-> n*n.
Monomial = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class YPoly:
    """Dense integer polynomial in the single variable y."""

    coeffs: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        cs = list(self.coeffs)
        if not cs:
            cs = [0]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(int(c) for c in cs))

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def degree(self) -> int:
        """Degree, with the convention that the zero polynomial has -1."""
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def evaluate(self, y):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc


def _ymul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, z in enumerate(b):
                out[i + j] += x * z
    return out


@dataclass(frozen=True)
class SparsePoly:
    """Sparse polynomial over x[k][v] (k, v in Z_n) and y, exact rational.

    ``n`` fixes the variable universe and the lattice the canonical forms
    live on; terms map monomials to nonzero Fractions.  Instances are
    value-like: construction normalizes, equality is term-for-term.
    """

    n: int
    terms: dict[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"lattice size must be positive, got {self.n}")
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in self.terms.items():
            coef = Fraction(coef)
            if not coef:
                continue
            parts = tuple(sorted((int(v), int(e)) for v, e in mono))
            for vid, e in parts:
                if not 0 <= vid <= self.n * self.n:
                    raise OutOfRangeError(f"variable id {vid} outside universe")
                if e <= 0:
                    raise ValidationError("exponents must be positive")
            clean[parts] = coef
        object.__setattr__(self, "terms", clean)

    # --- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "SparsePoly":
        return cls(n=n, terms={})

    @classmethod
    def const(cls, n: int, value) -> "SparsePoly":
        return cls(n=n, terms={(): Fraction(value)})

    @classmethod
    def variable(cls, n: int, vid: int) -> "SparsePoly":
        return cls(n=n, terms={((vid, 1),): Fraction(1)})

    @classmethod
    def x(cls, n: int, k: int, v: int) -> "SparsePoly":
        return cls.variable(n, k * n + v)

    @classmethod
    def y(cls, n: int) -> "SparsePoly":
        return cls.variable(n, n * n)

    # --- ring operations --------------------------------------------------

    def _require_same_universe(self, other: "SparsePoly") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(
                f"mixed lattice sizes {self.n} and {other.n}"
            )

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.n, other)
        self._require_same_universe(other)
        out = dict(self.terms)
        for mono, coef in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coef
        return SparsePoly(n=self.n, terms=out)

    def __neg__(self):
        return SparsePoly(
            n=self.n, terms={m: -c for m, c in self.terms.items()}
        )

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.n, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return SparsePoly(
                n=self.n,
                terms={m: c * Fraction(other) for m, c in self.terms.items()},
            )
        self._require_same_universe(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return SparsePoly(n=self.n, terms=out)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if power < 0:
            raise ValidationError("negative polynomial powers are undefined here")
        out = SparsePoly.const(self.n, 1)
        for _ in range(power):
            out = out * self
        return out

    # --- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> tuple[int, ...]:
        seen = {vid for mono in self.terms for vid, _ in mono}
        return tuple(sorted(seen))

    def degree_in(self, vid: int) -> int:
        best = 0
        for mono in self.terms:
            for v, e in mono:
                if v == vid and e > best:
                    best = e
        return best

    def evaluate(self, point, y=0) -> Fraction:
        """Exact value at a lattice point, with y given separately."""
        acc = Fraction(0)
        for c in reversed(self.eval_x(point)):
            acc = acc * y + c
        return acc

    def _compiled(self):
        # terms flattened for the evaluation hot path: one common
        # denominator, integer numerators, y split out.  Cached on the
        # instance (terms never mutate after __post_init__); the cache is
        # not a dataclass field, so equality and repr ignore it.
        cache = getattr(self, "_eval_cache", None)
        if cache is None:
            denom = 1
            for coef in self.terms.values():
                denom = denom * coef.denominator // gcd(denom, coef.denominator)
            y_id = self.n * self.n
            rows = []
            max_exp = [0] * (self.n * self.n)
            for mono, coef in self.terms.items():
                num = coef.numerator * (denom // coef.denominator)
                ydeg = 0
                pairs = []
                for vid, e in mono:
                    if vid == y_id:
                        ydeg = e
                    else:
                        pairs.append((vid, e))
                        if e > max_exp[vid]:
                            max_exp[vid] = e
                rows.append((ydeg, num, tuple(pairs)))
            ytop = max((r[0] for r in rows), default=0)
            cache = (denom, tuple(rows), tuple(max_exp), ytop)
            object.__setattr__(self, "_eval_cache", cache)
        return cache

    def eval_x(self, point) -> tuple[Fraction, ...]:
        """Substitute the x variables only; returns dense y coefficients
        (low power first, trailing zeros stripped, `(0,)` for zero)."""
        vals = _check_point(point, self.n)
        flat = [v for row in vals for v in row]
        denom, rows, max_exp, ytop = self._compiled()
        powers = []
        for vid, top in enumerate(max_exp):
            row = [1] * (top + 1)
            for e in range(1, top + 1):
                row[e] = row[e - 1] * flat[vid]
            powers.append(row)
        acc = [0] * (ytop + 1)
        for ydeg, num, pairs in rows:
            for vid, e in pairs:
                num *= powers[vid][e]
            acc[ydeg] += num
        while len(acc) > 1 and acc[-1] == 0:
            acc.pop()
        return tuple(Fraction(c, denom) for c in acc)

    def permute_slots(self, perms) -> "SparsePoly":
        """Substitute x[k][v] -> x[k][perms[k][v]], leaving y alone."""
        n = self.n
        ps = [check_permutation(p, n) for p in perms]
        if len(ps) != n:
            raise DimensionMismatchError(
                f"need one permutation per slot ({n}), got {len(ps)}"
            )
        y_id = n * n
        out: dict[Monomial, Fraction] = {}
        for mono, coef in self.terms.items():
            nm = tuple(
                sorted(
                    (vid, e) if vid == y_id
                    else ((vid // n) * n + ps[vid // n][vid % n], e)
                    for vid, e in mono
                )
            )
            out[nm] = out.get(nm, Fraction(0)) + coef
        return SparsePoly(n=n, terms=out)

    # --- canonical text ---------------------------------------------------

    def var_name(self, vid: int) -> str:
        if vid == self.n * self.n:
            return "y"
        return f"x[{vid // self.n}][{vid % self.n}]"

    def to_text(self) -> str:
        """Canonical form: graded-lex term order, `coeff * x[k][v]^e * y^e`."""
        if not self.terms:
            return "0"
        def grade(item):
            mono, _ = item
            return (-sum(e for _, e in mono), mono)
        chunks = []
        for mono, coef in sorted(self.terms.items(), key=grade):
            parts = [str(coef)]
            for vid, e in mono:
                parts.append(
                    self.var_name(vid) if e == 1 else f"{self.var_name(vid)}^{e}"
                )
            chunks.append(" * ".join(parts))
        return " + ".join(chunks)


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    acc = dict(m1)
    for vid, e in m2:
        acc[vid] = acc.get(vid, 0) + e
    return tuple(sorted(acc.items()))


# === lattice points =====================================================


def _check_point(point, n: int | None = None):
    """Validate an assignment of a value in Z_n to every x[k][v]."""
    rows = tuple(tuple(int(x) for x in row) for row in point)
    if n is None:
        n = len(rows)
    if len(rows) != n:
        raise DimensionMismatchError(
            f"lattice point needs {n} rows, got {len(rows)}"
        )
    for k, row in enumerate(rows):
        if len(row) != n:
            raise DimensionMismatchError(
                f"row {k} has {len(row)} entries, expected {n}"
            )
        for v, value in enumerate(row):
            if not 0 <= value < n:
                raise OutOfRangeError(
                    f"x[{k}][{v}] = {value} outside Z_{n}"
                )
    return rows


def vertex_poly_eval(point) -> int:
    """Product over slots of the Vandermonde of that slot's values.

    Zero exactly when some slot repeats a value.  For a full permutation
    per slot the magnitude is the superfactorial power (prod j!)^n, a fact
    the test suite leans on as an independent cross-check.
    """
    rows = _check_point(point)
    n = len(rows)
    out = 1
    for row in rows:
        for u in range(n):
            for v in range(u + 1, n):
                out *= row[v] - row[u]
    return out


def _slot_arcs(family: AugTreeFamily, k: int) -> list[tuple[int, int]]:
    # arcs of slot k in root-at-k coordinates: (parent, child) per vertex
    g = family.slot_form(k).map
    return [(g[v], v) for v in range(k + 1)]


def edge_poly_eval(family: AugTreeFamily, point) -> YPoly:
    """Product over cross-slot arc pairs of their quadratic differences.

    Each arc (p, c) of slot k owns the monic quadratic
    (y - x[k][p])(y - x[k][c]); for slots i < j the factor is the later
    slot's quadratic minus the earlier one's, which is linear in y and
    vanishes identically exactly when the two arcs collide as unordered
    pairs.  The empty product (n = 1) is the constant 1.
    """
    rows = _check_point(point, family.n)
    n = family.n
    arcs = [_slot_arcs(family, k) for k in range(n)]
    acc = [1]
    for i in range(n):
        for j in range(i + 1, n):
            for (pu, cu) in arcs[i]:
                c, d = rows[i][pu], rows[i][cu]
                for (pv, cv) in arcs[j]:
                    a, b = rows[j][pv], rows[j][cv]
                    if a * b == c * d and a + b == c + d:
                        return YPoly((0,))  # identical unordered arc pair
                    acc = _ymul(acc, [a * b - c * d, c + d - a - b])
    return YPoly(tuple(acc))


def certificate_eval(family: AugTreeFamily, point) -> YPoly:
    """Vandermonde times edge product: nonzero iff the point is in Phi."""
    v = vertex_poly_eval(_check_point(point, family.n))
    if v == 0:
        return YPoly((0,))
    e = edge_poly_eval(family, point)
    return YPoly(tuple(v * c for c in e.coeffs))


# === Lagrange bases =====================================================


def _basis_variables(f):
    """Split `f` into (n, [(vid, value), ...]) for point or single mapping."""
    seq = tuple(f)
    if not seq:
        raise ValidationError("empty basis index")
    if isinstance(seq[0], int):
        n = len(seq)
        vals = [(i, int(x)) for i, x in enumerate(seq)]
    else:
        rows = _check_point(seq)
        n = len(rows)
        vals = [(k * n + v, rows[k][v]) for k in range(n) for v in range(n)]
    for vid, value in vals:
        if not 0 <= value < n:
            raise OutOfRangeError(f"basis value {value} outside Z_{n}")
    return n, vals


def lagrange_basis(f, point=None, expand: bool = False):
    """Lagrange basis through `f`: evaluate at a point, or expand fully.

    `f` is either a full lattice point (one mapping per slot) or a single
    mapping over Z_n.  Exactly one mode must be requested: `point=` gives
    the exact rational value (1 at f, 0 at every other lattice point), and
    `expand=True` gives the SparsePoly, capped at LAGRANGE_EXPAND_MAX_VARS
    variables because the expansion can carry n^vars monomials.
    """
    n, vals = _basis_variables(f)
    if (point is None) == (not expand):
        raise ValidationError("choose exactly one of point= or expand=True")

    if point is not None:
        _, pvals = _basis_variables(point)
        if len(pvals) != len(vals):
            raise DimensionMismatchError("point shape differs from basis index")
        at = dict(pvals)
        out = Fraction(1)
        for vid, fv in vals:
            xv = at[vid]
            for j in range(n):
                if j != fv:
                    out *= Fraction(xv - j, fv - j)
                    if not out:
                        return out
        return out

    if len(vals) > LAGRANGE_EXPAND_MAX_VARS:
        raise BoundExceededError(
            f"{len(vals)} variables exceed the expansion cap "
            f"{LAGRANGE_EXPAND_MAX_VARS}"
        )
    numer, denom = _basis_numerator(vals, n)
    return SparsePoly(
        n=n, terms={m: Fraction(c, denom) for m, c in numer.items()}
    )


def _basis_numerator(vals, n: int) -> tuple[dict[Monomial, int], int]:
    """Integer expansion of prod (x - j) plus the common denominator."""
    acc: dict[Monomial, int] = {(): 1}
    denom = 1
    for vid, fv in vals:
        uni = [1]  # prod over j != fv of (x - j), low degree first
        for j in range(n):
            if j == fv:
                continue
            denom *= fv - j
            uni = [0] + uni  # times x, then subtract j times the old poly
            for e in range(len(uni) - 1):
                uni[e] -= j * uni[e + 1]
        nxt: dict[Monomial, int] = {}
        for mono, c in acc.items():
            for e, u in enumerate(uni):
                if not u:
                    continue
                key = mono + ((vid, e),) if e else mono
                nxt[key] = nxt.get(key, 0) + c * u
        acc = nxt
    return acc, denom


# === canonical representative ===========================================


def _phi_full(family: AugTreeFamily):
    """All complete labelings, including ways to place the unused values."""
    members, _ = phi_enumerate(family, mode="essential")
    n = family.n
    for lab in members:
        pools = []
        for k in range(n):
            sig = lab.sigmas[k]
            head = sig[: k + 1]
            rest = [x for x in range(n) if x not in head]
            pools.append([head + tail for tail in permutations(rest)])
        for combo in product(*pools):
            yield Labeling(n=n, sigmas=tuple(combo))


def canonical_rep(family: AugTreeFamily, mode: str = "phi-sum") -> SparsePoly:
    """The unique degree < n per-variable polynomial matching the
    certificate on every lattice point.

    phi-sum mode sums certificate-value times Lagrange basis over the
    complete labelings; lattice mode interpolates over every one of the
    n^(n*n) lattice points.  Both land on the same polynomial — off-Phi
    points contribute nothing because the certificate vanishes there —
    and the test suite insists on term-for-term agreement.
    """
    if mode not in CANONICAL_REP_MODES:
        raise ValidationError(f"unknown canonical_rep mode {mode!r}")
    n = family.n
    y_id = n * n

    if mode == "phi-sum":
        if n > CANONICAL_PHI_MAX_N:
            raise BoundExceededError(
                f"phi-sum canonical form capped at n = {CANONICAL_PHI_MAX_N}"
            )
        # every slot of a full labeling uses each value exactly once, so
        # all basis denominators coincide and integer accumulation works
        d_slot = 1
        for fv in range(n):
            for j in range(n):
                if j != fv:
                    d_slot *= fv - j
        denom = d_slot**n
        acc: dict[Monomial, int] = {}
        for lab in _phi_full(family):
            cert = certificate_eval(family, lab.sigmas)
            if cert.is_zero():  # pragma: no cover - Phi members never vanish
                continue
            vals = [(k * n + v, lab.sigmas[k][v]) for k in range(n) for v in range(n)]
            numer, _ = _basis_numerator(vals, n)
            for t, c in enumerate(cert.coeffs):
                if not c:
                    continue
                for mono, a in numer.items():
                    key = mono + ((y_id, t),) if t else mono
                    acc[key] = acc.get(key, 0) + c * a
        return SparsePoly(
            n=n, terms={m: Fraction(c, denom) for m, c in acc.items() if c}
        )

    if n > CANONICAL_LATTICE_MAX_N:
        raise BoundExceededError(
            f"lattice canonical form capped at n = {CANONICAL_LATTICE_MAX_N} "
            f"(n^(n*n) points)"
        )
    total: dict[Monomial, Fraction] = {}
    for rows in product(product(range(n), repeat=n), repeat=n):
        cert = certificate_eval(family, rows)
        if cert.is_zero():
            continue
        vals = [(k * n + v, rows[k][v]) for k in range(n) for v in range(n)]
        numer, denom = _basis_numerator(vals, n)
        for t, c in enumerate(cert.coeffs):
            if not c:
                continue
            for mono, a in numer.items():
                key = mono + ((y_id, t),) if t else mono
                total[key] = total.get(key, Fraction(0)) + Fraction(c * a, denom)
    return SparsePoly(n=n, terms=total)


# === reduction and the small mechanical checks ==========================


def poly_reduce(p: SparsePoly, variables=None) -> SparsePoly:
    """Canonical representative of `p` modulo the falling factorials.

    Every occurrence of x^n (x in the listed variables, n the lattice
    size) is rewritten to x^n minus the falling factorial x(x-1)...(x-n+1),
    which has degree n-1 and the same values on Z_n; repeating this leaves
    degree < n in each listed variable and never changes any lattice
    evaluation.  Defaults to the x variables of `p`; y is left alone
    unless listed explicitly, since y is not a lattice coordinate.
    """
    n = p.n
    if variables is None:
        vset = frozenset(v for v in p.variables() if v != n * n)
    else:
        vset = frozenset(int(v) for v in variables)
    fall = [1]  # falling factorial, low degree first
    for t in range(n):
        fall = [0] + fall
        for e in range(len(fall) - 1):
            fall[e] -= t * fall[e + 1]
    # x^n = fall(x) + r(x) with deg r < n, i.e. r = x^n - fall
    r = [-c for c in fall[:n]]
    work = dict(p.terms)
    out: dict[Monomial, Fraction] = {}
    while work:
        mono, coef = work.popitem()
        if not coef:
            continue
        hit = None
        for vid, e in mono:
            if e >= n and vid in vset:
                hit = (vid, e)
                break
        if hit is None:
            out[mono] = out.get(mono, Fraction(0)) + coef
            continue
        vid, e = hit
        rest = tuple(pair for pair in mono if pair[0] != vid)
        for t, rc in enumerate(r):
            if not rc:
                continue
            ne = e - n + t
            nm = tuple(sorted(rest + ((vid, ne),))) if ne else rest
            work[nm] = work.get(nm, Fraction(0)) + coef * rc
    return SparsePoly(n=n, terms={m: c for m, c in out.items() if c})


def nonvanishing_equivalence_check(family: AugTreeFamily) -> bool:
    """Does `canonical form is nonzero` agree with `Phi is nonempty`?

    Expected true for every family; a false return means one of the two
    pipelines (polynomial or combinatorial) has a bug, which is the whole
    reason this function exists.
    """
    if family.n > CANONICAL_PHI_MAX_N:
        raise BoundExceededError(
            f"equivalence check capped at n = {CANONICAL_PHI_MAX_N}"
        )
    rep = canonical_rep(family, mode="phi-sum")
    _, count = phi_enumerate(family, mode="essential")
    return (not rep.is_zero()) == (count > 0)


def monomial_support_check(sigma) -> bool:
    """Every monomial of the expanded basis for a single permutation must
    touch at least n-1 distinct variables, and the only variable a
    monomial may skip is the one the permutation sends to zero."""
    sig = tuple(int(x) for x in sigma)
    n = len(sig)
    if n > SUPPORT_CHECK_MAX_N:
        raise BoundExceededError(
            f"support check capped at n = {SUPPORT_CHECK_MAX_N}"
        )
    check_permutation(sig, n)
    expanded = lagrange_basis(sig, expand=True)
    skippable = sig.index(0)
    allvars = set(range(n))
    for mono in expanded.terms:
        seen = {vid for vid, _ in mono}
        if len(seen) < n - 1:
            return False
        missing = allvars - seen
        if missing and missing != {skippable}:
            return False
    return True


def variable_dependency_check(p: SparsePoly, power: int) -> bool:
    """Reducing a power of `p` must not drag in outside variables."""
    if power < 0:
        raise ValidationError("power must be nonnegative")
    support = set(p.variables())
    reduced = poly_reduce(p**power, support)
    return set(reduced.variables()) <= support


def poly_aut_check(p: SparsePoly, perms) -> bool:
    """Literal test: does slot-wise variable permutation fix `p` term-for-term?

    Mind the sign: an odd permutation of one slot's variables negates that
    slot's Vandermonde factor, so canonical certificate forms typically
    flip sign (and this returns False) even when the permutation respects
    the tree.  Orbit-level invariance is the packing module's
    closure_check; this is the stricter polynomial identity.
    """
    return p.permute_slots(perms) == p


# === composition implication ============================================


@dataclass(frozen=True)
class CompositionReport:
    """Outcome of checking `squared packable implies original packable`."""

    n: int
    families_checked: int
    steps_checked: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _phi_nonempty(family: AugTreeFamily) -> bool:
    if family.n <= CANONICAL_PHI_MAX_N:
        return not canonical_rep(family, mode="phi-sum").is_zero()
    # past the polynomial caps the solver is the practical oracle
    from .solver import PACKED, SolveConfig, pack

    return pack(family, SolveConfig()).status == PACKED


def composition_implication_check(n: int) -> CompositionReport:
    """Exhaustively confirm that squaring a family never creates
    packability out of nothing: if the fully squared family packs, so does
    the original, and likewise for each single-slot squaring step."""
    if n > COMPOSITION_CHECK_MAX_N:
        raise BoundExceededError(
            f"composition check capped at n = {COMPOSITION_CHECK_MAX_N}"
        )
    families = 0
    steps = 0
    violations: list[str] = []
    for index, fam in enumerate(family_enumerate(n)):
        families += 1
        base = _phi_nonempty(fam)
        squared = compose_square(fam)
        if squared != fam:
            if _phi_nonempty(squared) and not base:
                violations.append(f"family {index}: full squaring")
        for k in range(n):
            if fam.trees[k].m == 1:
                continue  # no edge to contract
            stepped = local_compose(fam.trees[k])
            if stepped == fam.trees[k]:
                continue
            steps += 1
            if _phi_nonempty(fam.with_tree(k, stepped)) and not base:
                violations.append(f"family {index}: slot {k}")
    return CompositionReport(
        n=n,
        families_checked=families,
        steps_checked=steps,
        violations=tuple(violations),
    )
