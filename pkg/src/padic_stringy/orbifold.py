"""Linear quotient singularities, fermionic shifts and orbifold volumes.

The 1-dimensional building block is the set S(d, e) = {z^d t^e : z in O_F}
with the orbifold weight |x|^((1-d)/d) dx. Its volume is evaluated at
finite level: residue classes mod t^k with valuation < k are either inside
S or disjoint from it, and the remainder of S (valuation >= k) is the scaled
copy t^(dJ) S, whose volume is q^(-J) vol(S). Solving that linear relation
gives the volume exactly from the finitely many classes mod t^k.

Volumes at a fixed q are ``QValue`` elements of Q(p^(1/N)); closed forms are
``QExp`` polynomials evaluated at the same q.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import (
    ModelTooLarge,
    PrecisionTooLow,
    RootsOfUnityMissing,
    SingularReduction,
    ZeroToPrecision,
)
from .exact import QExp, QValue
from .ff import FieldSpec, field_of_size
from .galois import (
    FinAbGroup,
    LinearModel,
    TorsorClass,
    _coordinate_fixed_count,
    kummer_class,
    multiplier_exponent,
)
from .localfield import LocalFieldSpec, TruncatedLaurentSeries, local_field


@dataclass(frozen=True)
class LinearCyclicAction:
    """Z/d acting on A^n by diag(zeta^e_1, ..., zeta^e_n), 1 <= e_i <= d."""

    d: int
    weights: tuple[int, ...]
    q: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(e) for e in self.weights))
        if self.d < 1:
            raise ValueError("d must be positive")
        for e in self.weights:
            if not 1 <= e <= self.d:
                raise ValueError(f"weight {e} outside 1..{self.d}")
        p = field_of_size(self.q).p
        if self.d % p == 0:
            raise ValueError(f"p = {p} divides d = {self.d}")
        if (self.q - 1) % self.d:
            raise RootsOfUnityMissing(f"d = {self.d} does not divide q-1 = {self.q - 1}")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def is_trivial(self) -> bool:
        return all(e == self.d for e in self.weights)

    def as_model(self) -> LinearModel:
        group = FinAbGroup.cyclic(self.d)
        if not group.factors:
            return LinearModel(group, tuple(() for _ in self.weights), self.q)
        return LinearModel(group, tuple((e % self.d,) for e in self.weights), self.q)


def as_model(action) -> LinearModel:
    if isinstance(action, LinearModel):
        return action
    if isinstance(action, LinearCyclicAction):
        return action.as_model()
    raise TypeError(f"unsupported action type {type(action).__name__}")


@dataclass(frozen=True)
class ShiftRecord:
    element: tuple[int, ...]
    fixed_dim: int
    F: Fraction
    w: Fraction

    @property
    def j(self) -> int:
        """Power of the generator, for cyclic groups."""
        return self.element[0] if self.element else 0


def _eigen_fractions(model: LinearModel, gamma, xi_exponent: int) -> list[Fraction]:
    """Eigenvalue exponents of gamma as fractions in [0,1) relative to xi^c."""
    N = model.group.exponent
    if math.gcd(xi_exponent, N) != 1:
        raise ValueError(f"xi exponent {xi_exponent} not coprime to {N}")
    cinv = pow(xi_exponent, -1, N) if N > 1 else 0
    return [(model.character(i)(gamma) * cinv) % 1 for i in range(model.n)]


def shifts(action, xi_exponent: int = 1) -> list[ShiftRecord]:
    """Fermionic shift F and weight w of every group element."""
    model = as_model(action)
    out = []
    for gamma in model.group.elements():
        fr = _eigen_fractions(model, gamma, xi_exponent)
        F = sum(fr, Fraction(0))
        w = sum((f if f else Fraction(1) for f in fr), Fraction(0))
        fixed = sum(1 for f in fr if f == 0)
        out.append(ShiftRecord(gamma, fixed, F, w))
    return out


# -- specialization ------------------------------------------------------------

@dataclass(frozen=True)
class Specialization:
    torsor: TorsorClass
    inertia_power: int
    stratum: str  # "origin" or "free"
    coarse_residue: int  # residue of u; 0 for the origin

    @property
    def sector_weight(self) -> int:
        """e in 1..d with u in O_F^d t^e (d when the sector is the identity)."""
        d = self.torsor.owner.exponent
        return self.inertia_power or d


def specialize_1d(u: TruncatedLaurentSeries, d: int) -> Specialization:
    """Specialisation of a point u of A^1/mu_d = A^1 (u = x^d)."""
    if u.is_zero():
        raise ZeroToPrecision("generic point is not in the free locus")
    if (u.owner.q - 1) % d:
        raise RootsOfUnityMissing(f"{d} does not divide q-1 = {u.owner.q - 1}")
    cls = kummer_class(u, d)
    j = cls.ram[0] if cls.ram else 0
    if u.val > 0:
        return Specialization(cls, j, "origin", 0)
    return Specialization(cls, j, "free", u.coeffs[0])


# -- 1-dimensional blocks ---------------------------------------------------------

def default_precision(d: int, e: int) -> int:
    return e + 2 * d


def _in_sector(x: TruncatedLaurentSeries, d: int, e: int) -> bool:
    """x in O_F^d t^e, tested through its Kummer class and valuation."""
    if x.val < e:
        return False
    if d == 1:
        return True
    cls = kummer_class(x, d)
    return cls.unr == (0,) and cls.ram == (e % d,)


def _finite_level_1d(d: int, e: int, q: int, k: int, exhaustive: bool) -> QValue:
    K = local_field(q, k)
    f = K.residue
    if k <= e:
        raise PrecisionTooLow(f"precision {k} leaves no classes of valuation >= {e}")
    # classes mod t^k with valuation v in [e, k): weight q^(-k) |x|^((1-d)/d)
    weight_count: dict[int, int] = {}
    if exhaustive:
        if q ** (k - e) > 2_000_000:
            raise ModelTooLarge(f"{q}^{k - e} residue classes")
        for digits in itertools.product(range(q), repeat=k - e):
            x = K.series({e + i: c for i, c in enumerate(digits)}, k)
            if x.is_zero():
                continue
            if _in_sector(x, d, e):
                weight_count[x.val] = weight_count.get(x.val, 0) + 1
    else:
        for v in range(e, k):
            for c in range(1, q):
                x = K.series({v: c}, k)
                if _in_sector(x, d, e):
                    weight_count[v] = weight_count.get(v, 0) + q ** (k - v - 1)
    finite = QValue.zero(q)
    for v, count in weight_count.items():
        finite = finite + QValue.power(q, Fraction(v * (d - 1), d) - k) * count
    J = -(-(k - e) // d)
    tail_factor = 1 - Fraction(1, q**J)
    return finite / tail_factor


@lru_cache(maxsize=None)
def orb_fiber_volume_1d(d: int, e: int, q: int, k: int | None = None, exhaustive: bool = False) -> QValue:
    """Orbifold volume of {z^d t^e : z in O_F} at finite level k.

    The value is recomputed at k+1; a change raises PrecisionTooLow.
    """
    if (q - 1) % d:
        raise RootsOfUnityMissing(f"{d} does not divide q-1 = {q - 1}")
    if not 0 <= e <= d:
        raise ValueError(f"e = {e} outside 0..{d}")
    k = default_precision(d, e) if k is None else k
    here = _finite_level_1d(d, e, q, k, exhaustive)
    there = _finite_level_1d(d, e, q, k + 1, exhaustive)
    if here != there:
        raise PrecisionTooLow(f"volume changes between precision {k} and {k + 1}")
    return here


def closed_form_1d(d: int, e: int) -> QExp:
    return QExp.monomial(Fraction(-e, d), Fraction(1, d))


def _disc_volume(q: int, k: int) -> QValue:
    """Haar volume of a residue disc c + tO_F, counted at level k."""
    return QValue.rational(q, Fraction(q ** (k - 1), q**k))


# -- n-dimensional fibres ------------------------------------------------------------

@dataclass(frozen=True)
class FiberTarget:
    """A point e(x) of the inertia stack: torsor class plus stratum point support.

    ``support`` lists the coordinates where the reduced point is nonzero; it
    must lie in the fixed locus of the inertia element ``torsor.ram``.
    """

    torsor: TorsorClass
    support: tuple[int, ...] = ()


def _block_data(model: LinearModel, gamma, xi_exponent: int = 1):
    N = model.group.exponent
    fr = _eigen_fractions(model, gamma, xi_exponent)
    return N, [int(f * N) if f else N for f in fr]


def orb_fiber_volume(action, target: FiberTarget, k: int | None = None) -> QValue:
    """mu_orb of the fibre of the specialisation map over ``target``."""
    model = as_model(action)
    gamma = target.torsor.ram
    if target.torsor.owner != model.group:
        raise ValueError("target torsor class belongs to a different group")
    fixed = set(model.fixed_coordinates(gamma))
    if not set(target.support) <= fixed:
        raise ValueError("stratum point is not in the fixed locus of the inertia element")
    N, exps = _block_data(model, gamma)
    q = model.q
    vol = QValue.rational(q, 1)
    for i, e in enumerate(exps):
        if i in target.support:
            kk = 1 if k is None else k
            vol = vol * _disc_volume(q, max(kk, 1))
        else:
            vol = vol * (orb_fiber_volume_1d(N, e, q, k) * N)
    return vol / model.stabilizer_order(target.support)


def orb_fiber_volume_closed(action, target: FiberTarget) -> QValue:
    """q^(-w)/|Aut(x)| evaluated at the action's q."""
    model = as_model(action)
    w = next(r.w for r in shifts(model) if r.element == target.torsor.ram)
    return QExp.monomial(-w).at(model.q) / model.stabilizer_order(target.support)


def _subsets(items: Sequence[int]):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def orb_sector_volumes(action, k: int | None = None) -> dict[tuple[int, ...], QValue]:
    """Volume of X(O_F)^# split by inertia element gamma.

    For each gamma and each unramified class, the twisted stratum points are
    grouped by support; their number comes from counting fixed points of the
    twisted Frobenius coordinatewise.
    """
    model = as_model(action)
    g = model.group
    q = model.q
    N = g.exponent
    out: dict[tuple[int, ...], QValue] = {}
    for gamma in g.elements():
        fixed = model.fixed_coordinates(gamma)
        total = QValue.zero(q)
        for unr in g.elements():
            torsor = TorsorClass(g, unr, gamma, q)
            for support in _subsets(fixed):
                points = 1
                for i in support:
                    kk = multiplier_exponent(model, unr, i)
                    points *= _coordinate_fixed_count(q, N, kk, 1, iterate=False) - 1
                if not points:
                    continue
                orbits = Fraction(points * model.stabilizer_order(support), g.order)
                if orbits.denominator != 1:
                    raise AssertionError("orbit count is not an integer")
                total = total + orb_fiber_volume(model, FiberTarget(torsor, support), k) * orbits
        out[gamma] = total
    return out


def orb_total_volume(action, k: int | None = None) -> QValue:
    total = None
    for v in orb_sector_volumes(action, k).values():
        total = v if total is None else total + v
    return total


# -- Weil volumes of smooth models ---------------------------------------------------------

@dataclass(frozen=True)
class PolySystem:
    """Polynomials with integer coefficients in ``nvars`` variables.

    Each polynomial is a tuple of (coefficient, exponent-tuple) terms.
    """

    nvars: int
    polys: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]
    names: tuple[str, ...] = ()

    @classmethod
    def parse(cls, exprs: Sequence[str], variables: Sequence[str] | None = None) -> "PolySystem":
        import sympy

        parsed = [sympy.sympify(e.replace("^", "**")) for e in exprs]
        if variables is None:
            syms = sorted(set().union(*(p.free_symbols for p in parsed)), key=lambda s: s.name)
        else:
            syms = [sympy.Symbol(v) for v in variables]
        if not syms:
            raise ValueError("no variables")
        polys = []
        for expr in parsed:
            poly = sympy.Poly(expr, *syms)
            terms = []
            for exps, c in poly.terms():
                if not c.is_integer:
                    raise ValueError(f"non-integer coefficient {c} in {expr}")
                terms.append((int(c), tuple(int(x) for x in exps)))
            polys.append(tuple(terms))
        return cls(len(syms), tuple(polys), tuple(s.name for s in syms))

    @property
    def dim(self) -> int:
        return self.nvars - len(self.polys)

    def derivative(self, which: int, var: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
        out = []
        for c, exps in self.polys[which]:
            if exps[var]:
                new = list(exps)
                new[var] -= 1
                out.append((c * exps[var], tuple(new)))
        return tuple(out)


def _series_mul(f: FieldSpec, a: list[int], b: list[int], k: int) -> list[int]:
    out = [0] * k
    for i, x in enumerate(a):
        if x:
            for j in range(k - i):
                y = b[j]
                if y:
                    out[i + j] = f.add(out[i + j], f.mul(x, y))
    return out


def _eval_series(f: FieldSpec, poly, point: Sequence[list[int]], k: int) -> list[int]:
    total = [0] * k
    cache: dict[tuple[int, int], list[int]] = {}
    for c, exps in poly:
        term = [0] * k
        term[0] = f.element(c % f.p).index
        if not term[0]:
            continue
        for var, e in enumerate(exps):
            if e:
                key = (var, e)
                if key not in cache:
                    acc = [1] + [0] * (k - 1)
                    for _ in range(e):
                        acc = _series_mul(f, acc, point[var], k)
                    cache[key] = acc
                term = _series_mul(f, term, cache[key], k)
        total = [f.add(x, y) for x, y in zip(total, term)]
    return total


def _rank(f: FieldSpec, rows: list[list[int]]) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = f.inv(rows[rank][col])
        rows[rank] = [f.mul(x, inv) for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [f.sub(x, f.mul(factor, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class WeilReport:
    point_count: int
    dim: int
    level_counts: tuple[int, ...]
    volumes: tuple[Fraction, ...]
    closed_form: Fraction

    @property
    def passed(self) -> bool:
        return all(v == self.closed_form for v in self.volumes)


def weil_volume(system: PolySystem, q: int, k: int = 3) -> WeilReport:
    """#X(O/t^j)/q^(j dim) for j = 1..k, against #X(F_q)/q^dim.

    Points mod t^j are enumerated by lifting the points mod t^(j-1) in all
    q^nvars ways; nothing beyond reduction compatibility is assumed.
    """
    f = field_of_size(q)
    n = system.nvars
    residues = list(itertools.product(range(q), repeat=n))
    if len(residues) > 2_000_000:
        raise ModelTooLarge(f"{q}^{n} residue points")
    level = []
    for pt in residues:
        series = [[c] for c in pt]
        if all(_eval_series(f, poly, series, 1)[0] == 0 for poly in system.polys):
            level.append(pt)
    base_points = list(level)
    jac = [[system.derivative(i, v) for v in range(n)] for i in range(len(system.polys))]
    for pt in base_points:
        series = [[c] for c in pt]
        rows = [[_eval_series(f, d, series, 1)[0] for d in row] for row in jac]
        if rows and _rank(f, rows) < len(system.polys):
            raise SingularReduction(f"Jacobian drops rank at {pt} over F_{q}")
    counts = [len(level)]
    current = [tuple((c,) for c in pt) for pt in base_points]
    for j in range(2, k + 1):
        nxt = []
        for pt in current:
            for delta in residues:
                cand = tuple(coords + (dc,) for coords, dc in zip(pt, delta))
                series = [list(c) for c in cand]
                if all(_eval_series(f, poly, series, j)[j - 1] == 0 for poly in system.polys):
                    nxt.append(cand)
            if len(nxt) > 2_000_000:
                raise ModelTooLarge("too many lifted points")
        current = nxt
        counts.append(len(current))
    dim = system.dim
    vols = tuple(Fraction(c, q ** (j * dim)) for j, c in enumerate(counts, start=1))
    return WeilReport(counts[0], dim, tuple(counts), vols, Fraction(counts[0], q**dim))


def builtin_weil_models() -> dict[str, PolySystem]:
    return {
        "affine line": PolySystem(1, (), ("x",)),
        "circle x^2+y^2=1": PolySystem.parse(["x^2 + y^2 - 1"], ["x", "y"]),
        "hyperbola xy=1": PolySystem.parse(["x*y - 1"], ["x", "y"]),
        "parabola y=x^2": PolySystem.parse(["y - x^2"], ["x", "y"]),
        "cubic y^2=x^3+x+1": PolySystem.parse(["y^2 - x^3 - x - 1"], ["x", "y"]),
        "twisted cubic": PolySystem.parse(["y - x^2", "z - x^3"], ["x", "y", "z"]),
    }


def builtin_actions() -> dict[str, LinearModel | LinearCyclicAction]:
    return {
        "A2/Z2 (1,1) q=5": LinearCyclicAction(2, (1, 1), 5),
        "A1/Z2 (1) q=9": LinearCyclicAction(2, (1,), 9),
        "A1/Z2 (1) q=5": LinearCyclicAction(2, (1,), 5),
        "A1/Z3 (1) q=7": LinearCyclicAction(3, (1,), 7),
        "A2/Z3 (1,2) q=7": LinearCyclicAction(3, (1, 2), 7),
        "A2/Z3 (1,1) q=7": LinearCyclicAction(3, (1, 1), 7),
        "A2/Z4 (1,3) q=5": LinearCyclicAction(4, (1, 3), 5),
        "A2/Z4 (1,2) q=13": LinearCyclicAction(4, (1, 2), 13),
        "A3/Z2 (1,1,2) q=5": LinearCyclicAction(2, (1, 1, 2), 5),
        "A2/Z6 (1,5) q=7": LinearCyclicAction(6, (1, 5), 7),
        "A2/Z2xZ2 q=5": LinearModel(FinAbGroup((2, 2)), ((1, 0), (0, 1)), 5),
        "A3/Z2xZ2 q=5": LinearModel(FinAbGroup((2, 2)), ((1, 0), (0, 1), (1, 1)), 5),
        "trivial on A2 q=5": LinearCyclicAction(1, (1, 1), 5),
    }
