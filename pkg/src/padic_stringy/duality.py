"""Elliptic curves over F_q as sources of unramified Galois modules.

E[n] with its Frobenius matrix models a finite etale module M over
F = F_q((t)) with good reduction; the local Euler characteristic formula
and the self-dual isogeny identity are then checked as finite-group
cardinalities. Points over extensions F_(q^M) are found by sampling random
points and projecting into the n-primary part, using the group order from
the trace recursion.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Sequence

from sympy import factorint

from .errors import SingularCurve, TooLarge, TorsionFieldTooLarge
from .exact import Cyclo
from .ff import MAX_FIELD_SIZE, FieldSpec, embed_prime_field_poly, ff_make_field, field_of_size
from .galois import Character

Point = tuple[int, int] | None  # None is the point at infinity


class _Curve:
    """Weierstrass arithmetic over one field, coefficients given as indices there."""

    def __init__(self, f: FieldSpec, a: Sequence[int]):
        self.f = f
        self.a1, self.a2, self.a3, self.a4, self.a6 = a
        self._c = {k: f.element(k % f.p).index for k in (2, 3)}
        self._artin_schreier: dict[int, int] | None = None

    def on_curve(self, P: Point) -> bool:
        if P is None:
            return True
        f = self.f
        x, y = P
        lhs = f.add(f.mul(y, y), f.mul(y, f.add(f.mul(self.a1, x), self.a3)))
        return lhs == self._rhs(x)

    def _rhs(self, x: int) -> int:
        f = self.f
        x2 = f.mul(x, x)
        return f.add(f.add(f.mul(x2, x), f.mul(self.a2, x2)), f.add(f.mul(self.a4, x), self.a6))

    def neg(self, P: Point) -> Point:
        if P is None:
            return None
        f = self.f
        x, y = P
        return (x, f.sub(f.neg(y), f.add(f.mul(self.a1, x), self.a3)))

    def add(self, P: Point, Q: Point) -> Point:
        if P is None:
            return Q
        if Q is None:
            return P
        f = self.f
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if f.add(f.add(y1, y2), f.add(f.mul(self.a1, x2), self.a3)) == 0:
                return None
            num = f.sub(
                f.add(f.add(f.mul(self._c[3], f.mul(x1, x1)), f.mul(f.mul(self._c[2], self.a2), x1)), self.a4),
                f.mul(self.a1, y1),
            )
            den = f.add(f.add(f.mul(self._c[2], y1), f.mul(self.a1, x1)), self.a3)
        else:
            num = f.sub(y2, y1)
            den = f.sub(x2, x1)
        lam = f.div(num, den)
        x3 = f.sub(f.sub(f.sub(f.add(f.mul(lam, lam), f.mul(self.a1, lam)), self.a2), x1), x2)
        y3 = f.sub(f.sub(f.neg(f.mul(lam, f.sub(x3, x1))), y1), f.add(f.mul(self.a1, x3), self.a3))
        return (x3, y3)

    def mul(self, k: int, P: Point) -> Point:
        if k < 0:
            return self.mul(-k, self.neg(P))
        R = None
        while k:
            if k & 1:
                R = self.add(R, P)
            P = self.add(P, P)
            k >>= 1
        return R

    def ys(self, x: int) -> list[int]:
        """All y with (x, y) on the curve."""
        f = self.f
        b = f.add(f.mul(self.a1, x), self.a3)
        c = self._rhs(x)
        if f.p != 2:
            disc = f.add(f.mul(b, b), f.mul(f.element(4 % f.p).index, c))
            half = f.inv(self._c[2])
            if disc == 0:
                return [f.mul(f.neg(b), half)]
            lg = f.log(disc)
            if lg % 2:
                return []
            s = f.exp(lg // 2)
            return [f.mul(f.sub(s, b), half), f.mul(f.sub(f.neg(s), b), half)]
        if b == 0:
            return [f.pow(c, f.q // 2)]
        z = self._as_table().get(f.div(c, f.mul(b, b)))
        if z is None:
            return []
        return [f.mul(b, z), f.mul(b, f.add(z, 1))]

    def _as_table(self) -> dict[int, int]:
        if self._artin_schreier is None:
            f = self.f
            table: dict[int, int] = {}
            for z in range(f.q):
                table.setdefault(f.add(f.mul(z, z), z), z)
            self._artin_schreier = table
        return self._artin_schreier

    def points(self) -> list[Point]:
        pts: list[Point] = [None]
        for x in range(self.f.q):
            pts.extend((x, y) for y in self.ys(x))
        return pts

    def random_point(self, rng: random.Random) -> Point:
        while True:
            x = rng.randrange(self.f.q)
            ys = self.ys(x)
            if ys:
                return (x, rng.choice(ys))


@dataclass(frozen=True)
class EllipticCurveModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over ``field`` (indices)."""

    field: FieldSpec
    coeffs: tuple[int, int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != 5:
            raise ValueError("expected [a1, a2, a3, a4, a6]")
        if self.discriminant() == 0:
            raise SingularCurve(f"{list(self.coeffs)} is singular over {self.field}")

    @classmethod
    def over(cls, q: int, coeffs: Sequence[int]) -> "EllipticCurveModel":
        f = field_of_size(q)
        return cls(f, tuple(f.element(c).index if f.m == 1 else int(c) for c in coeffs))

    @property
    def q(self) -> int:
        return self.field.q

    def discriminant(self) -> int:
        f = self.field
        a1, a2, a3, a4, a6 = self.coeffs
        c = lambda k: f.element(k % f.p).index
        m, ad, sb = f.mul, f.add, f.sub
        b2 = ad(m(a1, a1), m(c(4), a2))
        b4 = ad(m(c(2), a4), m(a1, a3))
        b6 = ad(m(a3, a3), m(c(4), a6))
        b8 = sb(ad(ad(m(m(a1, a1), a6), m(m(c(4), a2), a6)), m(a2, m(a3, a3))), ad(m(m(a1, a3), a4), m(a4, a4)))
        d = sb(sb(sb(f.neg(m(m(b2, b2), b8)), m(c(8), m(b4, m(b4, b4)))), m(c(27), m(b6, b6))), f.neg(m(c(9), m(b2, m(b4, b6)))))
        return d

    @cached_property
    def base(self) -> _Curve:
        return _Curve(self.field, self.coeffs)

    def over_extension(self, M: int) -> tuple[_Curve, Callable[[int], int]]:
        """The curve over F_(q^M) together with the embedding of F_q."""
        f = self.field
        if f.q**M > MAX_FIELD_SIZE:
            raise TooLarge(f"{f.q}^{M} exceeds {MAX_FIELD_SIZE}")
        big = ff_make_field(f.p, f.m * M)
        emb = embed_prime_field_poly(big, f)
        return _Curve(big, [emb(a) for a in self.coeffs]), emb

    def __str__(self) -> str:
        return f"E{list(self.coeffs)}/F_{self.q}"


def trace_of_frobenius(E: EllipticCurveModel) -> int:
    return E.q + 1 - ec_count(E, 1)


def count_from_trace(q: int, a: int, m: int) -> int:
    """#E(F_(q^m)) from a = q + 1 - #E(F_q) via s_m = a s_(m-1) - q s_(m-2)."""
    s_prev, s = 2, a
    for _ in range(m - 1):
        s_prev, s = s, a * s - q * s_prev
    return q**m + 1 - s


@lru_cache(maxsize=None)
def ec_count(E: EllipticCurveModel, m: int = 1) -> int:
    """Exhaustive projective point count over F_(q^m)."""
    curve = E.base if m == 1 else E.over_extension(m)[0]
    return sum(len(curve.ys(x)) for x in range(curve.f.q)) + 1


def _point_order(curve: _Curve, P: Point, multiple: int) -> int:
    order = multiple
    for ell, _ in factorint(multiple).items():
        while order % ell == 0 and curve.mul(order // ell, P) is None:
            order //= ell
    return order


def ec_group(E: EllipticCurveModel) -> tuple[int, ...]:
    """Invariant factors (d1, d2) with d1 | d2 of E(F_q); trivial factors dropped."""
    curve = E.base
    pts = curve.points()
    N = len(pts)
    exponent = 1
    for P in pts:
        exponent = math.lcm(exponent, _point_order(curve, P, N))
    d1 = N // exponent
    return tuple(d for d in (d1, exponent) if d > 1)


# -- torsion modules -------------------------------------------------------------------

def _mat_mul(A, B, n):
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) % n for j in range(len(B[0])))
        for i in range(len(A))
    )


def _mat_det2(A, n):
    return (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % n


def _apply(A, v, n):
    return tuple(sum(A[i][j] * v[j] for j in range(len(v))) % n for i in range(len(A)))


@dataclass(frozen=True)
class UnramifiedModule:
    """(Z/n)^r with Frobenius ``sigma`` (acting on column vectors) over F_q."""

    n: int
    sigma: tuple[tuple[int, ...], ...]
    q: int

    def __post_init__(self):
        sig = tuple(tuple(int(x) % self.n for x in row) for row in self.sigma)
        object.__setattr__(self, "sigma", sig)
        p = field_of_size(self.q).p
        if math.gcd(self.n, p) != 1:
            raise ValueError(f"gcd(n, p) = gcd({self.n}, {p}) != 1")
        if any(len(row) != len(sig) for row in sig):
            raise ValueError("sigma must be square")
        if len(self._image(sig)) != self.n**self.rank:
            raise ValueError("sigma is not invertible mod n")

    @property
    def rank(self) -> int:
        return len(self.sigma)

    def vectors(self):
        return itertools.product(range(self.n), repeat=self.rank)

    def _image(self, A) -> set:
        return {_apply(A, v, self.n) for v in self.vectors()}

    def _kernel_size(self, A) -> int:
        zero = (0,) * self.rank
        return sum(1 for v in self.vectors() if _apply(A, v, self.n) == zero)

    def _shift(self, c: int):
        return tuple(
            tuple((self.sigma[i][j] - (c if i == j else 0)) % self.n for j in range(self.rank))
            for i in range(self.rank)
        )

    def sigma_inverse(self):
        for cand in itertools.product(range(self.n), repeat=self.rank**2):
            A = tuple(tuple(cand[i * self.rank:(i + 1) * self.rank]) for i in range(self.rank))
            if _mat_mul(self.sigma, A, self.n) == tuple(
                tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)
            ):
                return A
        raise AssertionError("sigma not invertible")

    def dual(self) -> "UnramifiedModule":
        """Hom(M, mu_n): Frobenius acts by q (sigma^-1)^T."""
        inv = self.sigma_inverse()
        r = self.rank
        sig = tuple(tuple(self.q * inv[j][i] % self.n for j in range(r)) for i in range(r))
        return UnramifiedModule(self.n, sig, self.q)

    def invariants_size(self) -> int:
        return self._kernel_size(self._shift(1))


def h1_size(module: UnramifiedModule) -> int:
    """|coker(sigma - 1)| * |ker(sigma - q)| for the tame presentation with trivial inertia."""
    if module.n == 1 or module.rank == 0:
        return 1
    coker = module.n**module.rank // len(module._image(module._shift(1)))
    return coker * module._kernel_size(module._shift(module.q))


@dataclass(frozen=True)
class EulerReport:
    h1: int
    invariants: int
    dual_invariants: int

    @property
    def passed(self) -> bool:
        return self.h1 == self.invariants * self.dual_invariants


def check_euler(module: UnramifiedModule) -> EulerReport:
    if module.rank == 0 or module.n == 1:
        return EulerReport(1, 1, 1)
    return EulerReport(h1_size(module), module.invariants_size(), module.dual().invariants_size())


MAX_TORSION_ATTEMPTS = 400


def _full_torsion(curve: _Curve, N: int, n: int, rng: random.Random) -> tuple[Point, Point] | None:
    """A basis (T1, T2) of E[n] inside E(F_Q) with #E(F_Q) = N, or None if E[n] is not rational."""
    if N % (n * n):
        return None
    primes = set(factorint(n))
    Np = math.prod(ell**e for ell, e in factorint(N).items() if ell in primes)
    cof = N // Np

    def sample():
        return curve.mul(cof, curve.random_point(rng))

    # exponent B of the n-primary part S = Z/A x Z/B
    best, B = None, 1
    for _ in range(40):
        s = sample()
        o = _point_order(curve, s, Np)
        if o > B:
            best, B = s, o
    A = Np // B
    if A % n:
        return None
    P = best
    T1 = curve.mul(B // n, P)
    AP = curve.mul(A, P)
    multiples_AP = {}
    R = None
    for k in range(B // A):
        multiples_AP[R] = k
        R = curve.add(R, AP)
    span = _span(curve, [T1], n)
    for _ in range(MAX_TORSION_ATTEMPTS):
        s = sample()
        k = multiples_AP.get(curve.mul(A, s))
        if k is None:
            raise AssertionError("A*S is not generated by A*P")
        s4 = curve.mul(A // n, curve.add(s, curve.neg(curve.mul(k, P))))
        if s4 not in span:
            cand = _span(curve, [T1, s4], n)
            if len(cand) == n * n and _point_order(curve, s4, n) == n:
                return T1, s4
    raise TorsionFieldTooLarge(f"could not find a basis of E[{n}] after {MAX_TORSION_ATTEMPTS} samples")


def _span(curve: _Curve, gens: list[Point], n: int) -> dict[Point, tuple[int, ...]]:
    out: dict[Point, tuple[int, ...]] = {}
    for coeffs in itertools.product(range(n), repeat=len(gens)):
        R = None
        for c, g in zip(coeffs, gens):
            R = curve.add(R, curve.mul(c, g))
        out.setdefault(R, coeffs)
    return out


@dataclass(frozen=True)
class TorsionModuleReport:
    module: UnramifiedModule
    degree: int  # E[n] is defined over F_(q^degree)
    trace: int
    det_ok: bool
    trace_ok: bool


def ec_torsion_module_report(E: EllipticCurveModel, n: int, seed: int = 0) -> TorsionModuleReport:
    if math.gcd(n, E.field.p) != 1:
        raise ValueError(f"gcd(n, p) != 1 for n = {n}")
    q = E.q
    a = trace_of_frobenius(E)
    if n == 1:
        return TorsionModuleReport(UnramifiedModule(1, ((0,),), q), 1, a, True, True)
    rng = random.Random(seed)
    M = 1
    while True:
        if q**M > MAX_FIELD_SIZE:
            raise TorsionFieldTooLarge(f"E[{n}] of {E} is not rational over any F_{q}^M within {MAX_FIELD_SIZE}")
        if (q**M - 1) % n == 0:
            curve = E.base if M == 1 else E.over_extension(M)[0]
            basis = _full_torsion(curve, count_from_trace(q, a, M), n, rng)
            if basis is not None:
                break
        M += 1
    T1, T2 = basis
    f = curve.f
    table = _span(curve, [T1, T2], n)

    def frob(P: Point) -> Point:
        return None if P is None else (f.pow(P[0], q), f.pow(P[1], q))

    cols = [table[frob(T)] for T in (T1, T2)]
    sigma = tuple(tuple(cols[j][i] for j in range(2)) for i in range(2))
    module = UnramifiedModule(n, sigma, q)
    det_ok = _mat_det2(sigma, n) == q % n
    trace_ok = (sigma[0][0] + sigma[1][1]) % n == a % n
    return TorsionModuleReport(module, M, a, det_ok, trace_ok)


def ec_torsion_module(E: EllipticCurveModel, n: int, seed: int = 0) -> UnramifiedModule:
    rep = ec_torsion_module_report(E, n, seed)
    if not (rep.det_ok and rep.trace_ok):
        raise AssertionError(f"Frobenius on E[{n}] fails det/trace congruences for {E}")
    return rep.module


@dataclass(frozen=True)
class SelfDualReport:
    cokernel: int  # |E(F_q)/nE(F_q)|
    kernel: int  # |E[n](F_q)|

    @property
    def passed(self) -> bool:
        return self.cokernel == self.kernel


def check_selfdual(E: EllipticCurveModel, n: int) -> SelfDualReport:
    """[n] on E(F_q): |coker| against |ker|.

    Over F_q((t)) with good reduction and p not dividing n, both sides agree
    with their residue-field values since the formal group is uniquely
    n-divisible.
    """
    if math.gcd(n, E.field.p) != 1:
        raise ValueError(f"gcd(n, p) != 1 for n = {n}")
    curve = E.base
    pts = curve.points()
    image = {curve.mul(n, P) for P in pts}
    kernel = sum(1 for P in pts if curve.mul(n, P) is None)
    return SelfDualReport(len(pts) // len(image), kernel)


def f_alpha_model(t: Character, xi0: Fraction | int = 0) -> Callable[[Sequence[int]], Cyclo]:
    """a -> xi0 * exp(2 pi i t(a)), with xi0 = exp(2 pi i xi0) given as a fraction."""
    base = Cyclo.root(Fraction(xi0))

    def f(a: Sequence[int]) -> Cyclo:
        return base * Cyclo.root(t(a))

    return f


# -- curve battery ------------------------------------------------------------------------

def smooth_curves(q: int):
    """Smooth Weierstrass curves over F_q, coefficients [a1,a2,a3,a4,a6] in lexicographic order."""
    f = field_of_size(q)
    for coeffs in itertools.product(range(q), repeat=5):
        try:
            yield EllipticCurveModel(f, coeffs)
        except SingularCurve:
            continue


@dataclass(frozen=True)
class BatteryEntry:
    curve: EllipticCurveModel
    n: int
    torsion: TorsionModuleReport
    euler: EulerReport
    selfdual: SelfDualReport

    @property
    def passed(self) -> bool:
        return self.torsion.det_ok and self.torsion.trace_ok and self.euler.passed and self.selfdual.passed


def curve_battery(q: int, n: int, size: int = 20, seed: int = 0) -> tuple[list[BatteryEntry], int]:
    """The first ``size`` curves whose E[n] lies within desk scale, and the number skipped."""
    out: list[BatteryEntry] = []
    skipped = 0
    for E in smooth_curves(q):
        if len(out) >= size:
            break
        try:
            rep = ec_torsion_module_report(E, n, seed)
        except TorsionFieldTooLarge:
            skipped += 1
            continue
        out.append(BatteryEntry(E, n, rep, check_euler(rep.module), check_selfdual(E, n)))
    return out, skipped
