"""Finite abelian groups, characters, H^1(F, Gamma) and twisting.

H^1(F, Gamma) for F = F_q((t)) with exponent(Gamma) | q-1 is modelled as
Gamma (+) Gamma: the first summand classifies unramified torsors, the second
is Hom(mu(F), Gamma) identified with Gamma by evaluating at the canonical
primitive root of unity.

Two kinds of Gamma-variety are supported for twisting and point counts:

* ``LinearModel`` -- a diagonal action on A^n over F_q given by one character
  per coordinate; gamma acts on x_i by zeta^(N * chi_i(gamma)).
* ``PointSetModel`` -- an explicit finite set standing in for M(F_q-bar),
  with commuting permutations for the generators of Gamma and for Frobenius.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import (
    BadCharacteristic,
    ModelTooLarge,
    OwnerMismatch,
    RootsOfUnityMissing,
    TooLarge,
)
from .ff import FieldSpec, embed_prime_field_poly, ff_make_field, field_of_size
from .localfield import LocalFieldSpec, TruncatedLaurentSeries, ls_power_class

MAX_POINTS = 250_000


@dataclass(frozen=True)
class FinAbGroup:
    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(d) for d in self.factors))
        for d in self.factors:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise ValueError(f"invariant factors must divide each other: {self.factors}")

    @classmethod
    def parse(cls, text: str) -> "FinAbGroup":
        """Parse ``"Z/2 x Z/4"``; ``"1"`` or ``""`` is the trivial group."""
        text = text.strip()
        if text in ("", "1", "0", "trivial"):
            return cls(())
        factors = []
        for part in re.split(r"\s*[x×*]\s*", text):
            m = re.fullmatch(r"Z/(\d+)", part.strip())
            if not m:
                raise ValueError(f"cannot parse group factor {part!r}")
            d = int(m.group(1))
            if d > 1:
                factors.append(d)
        return cls(tuple(factors))

    @classmethod
    def cyclic(cls, d: int) -> "FinAbGroup":
        return cls((d,) if d > 1 else ())

    def __str__(self) -> str:
        return " x ".join(f"Z/{d}" for d in self.factors) or "1"

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.factors))

    def normalize(self, a: Sequence[int]) -> tuple[int, ...]:
        if len(a) != self.rank:
            raise ValueError(f"element {tuple(a)} has wrong length for {self}")
        return tuple(x % d for x, d in zip(a, self.factors))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a) -> tuple[int, ...]:
        return tuple(-x % d for x, d in zip(a, self.factors))

    def scale(self, k: int, a) -> tuple[int, ...]:
        return tuple(k * x % d for x, d in zip(a, self.factors))

    def element_order(self, a) -> int:
        return math.lcm(1, *(d // math.gcd(x, d) for x, d in zip(a, self.factors)))

    def characters(self) -> Iterator["Character"]:
        for e in self.elements():
            yield Character(self, e)

    def dual_character(self, a) -> "Character":
        """The fixed isomorphism Gamma -> Gamma*, a -> (b -> sum a_i b_i / d_i)."""
        return Character(self, self.normalize(a))


@dataclass(frozen=True)
class Character:
    owner: FinAbGroup
    exps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exps", self.owner.normalize(self.exps))

    def __call__(self, a) -> Fraction:
        """Value in Q/Z, represented in [0, 1)."""
        total = sum(Fraction(x * e, d) for x, e, d in zip(a, self.exps, self.owner.factors))
        return total % 1

    def is_trivial(self) -> bool:
        return not any(self.exps)

    @property
    def order(self) -> int:
        return self.owner.element_order(self.exps)

    def __add__(self, other: "Character") -> "Character":
        if other.owner != self.owner:
            raise OwnerMismatch("characters of different groups")
        return Character(self.owner, self.owner.add(self.exps, other.exps))

    def __neg__(self) -> "Character":
        return Character(self.owner, self.owner.neg(self.exps))

    def __mul__(self, k: int) -> "Character":
        return Character(self.owner, self.owner.scale(k, self.exps))

    __rmul__ = __mul__


# -- H^1(F, Gamma) ----------------------------------------------------------------

@dataclass(frozen=True)
class TorsorClass:
    owner: FinAbGroup
    unr: tuple[int, ...]
    ram: tuple[int, ...]
    q: int

    def __post_init__(self):
        object.__setattr__(self, "unr", self.owner.normalize(self.unr))
        object.__setattr__(self, "ram", self.owner.normalize(self.ram))
        _check_admissible(self.owner, self.q)

    def __add__(self, other: "TorsorClass") -> "TorsorClass":
        if (other.owner, other.q) != (self.owner, self.q):
            raise OwnerMismatch("torsor classes over different groups or fields")
        g = self.owner
        return TorsorClass(g, g.add(self.unr, other.unr), g.add(self.ram, other.ram), self.q)

    def __neg__(self) -> "TorsorClass":
        g = self.owner
        return TorsorClass(g, g.neg(self.unr), g.neg(self.ram), self.q)

    def is_unramified(self) -> bool:
        return not any(self.ram)

    def is_trivial(self) -> bool:
        return not any(self.ram) and not any(self.unr)


def _check_admissible(group: FinAbGroup, q: int):
    p = field_of_size(q).p
    if group.order % p == 0:
        raise BadCharacteristic(f"|Gamma| = {group.order} is divisible by p = {p}")
    if (q - 1) % group.exponent:
        raise RootsOfUnityMissing(f"exponent {group.exponent} does not divide q-1 = {q - 1}")


def h1_enumerate(group: FinAbGroup, F: LocalFieldSpec | int) -> list[TorsorClass]:
    q = F if isinstance(F, int) else F.q
    _check_admissible(group, q)
    return [TorsorClass(group, u, r, q) for u in group.elements() for r in group.elements()]


def h1_pairing(a: TorsorClass, b: TorsorClass) -> Fraction:
    """<(x,f),(y,g)> = f(y) - g(x) in Q/Z, with Gamma ~ Gamma* the dual basis map."""
    if (a.owner, a.q) != (b.owner, b.q):
        raise OwnerMismatch("pairing of torsor classes over different groups or fields")
    g = a.owner
    f_of_y = g.dual_character(a.ram)(b.unr)
    g_of_x = g.dual_character(b.ram)(a.unr)
    return (f_of_y - g_of_x) % 1


def kummer_class(x: TruncatedLaurentSeries, d: int) -> TorsorClass:
    """Class of the mu_d-torsor of d-th roots of x, as an element of H^1(F, Z/d)."""
    q = x.owner.q
    group = FinAbGroup.cyclic(d)
    if (q - 1) % d:
        raise RootsOfUnityMissing(f"{d} does not divide q-1 = {q - 1}")
    v, k = ls_power_class(x, d)
    if d == 1:
        return TorsorClass(group, (), (), q)
    return TorsorClass(group, (k,), (v,), q)


# -- Gamma-varieties ----------------------------------------------------------------

@dataclass(frozen=True)
class LinearModel:
    """Diagonal action of ``group`` on A^n over F_q, one character per coordinate."""

    group: FinAbGroup
    chars: tuple[tuple[int, ...], ...]
    q: int

    def __post_init__(self):
        object.__setattr__(self, "chars", tuple(self.group.normalize(c) for c in self.chars))
        _check_admissible(self.group, self.q)

    @property
    def n(self) -> int:
        return len(self.chars)

    def character(self, i: int) -> Character:
        return Character(self.group, self.chars[i])

    def restrict(self, coords: Sequence[int]) -> "LinearModel":
        return LinearModel(self.group, tuple(self.chars[i] for i in coords), self.q)

    def fixed_coordinates(self, gamma) -> list[int]:
        return [i for i in range(self.n) if self.character(i)(gamma) == 0]

    def stabilizer_order(self, support: Sequence[int]) -> int:
        """Order of the stabiliser of any point with the given nonzero coordinates."""
        return sum(1 for g in self.group.elements() if all(self.character(i)(g) == 0 for i in support))

    def is_faithful(self) -> bool:
        return self.stabilizer_order(range(self.n)) == 1


@dataclass(frozen=True)
class PointSetModel:
    """Finite stand-in for M(F_q-bar): generator permutations and a Frobenius permutation."""

    group: FinAbGroup
    generators: tuple[tuple[int, ...], ...]
    frobenius: tuple[int, ...]
    q: int = 0  # informational only

    def __post_init__(self):
        npts = len(self.frobenius)
        if sorted(self.frobenius) != list(range(npts)):
            raise ValueError("frobenius is not a permutation")
        if len(self.generators) != self.group.rank:
            raise ValueError("need one permutation per invariant factor")
        for perm, d in zip(self.generators, self.group.factors):
            if sorted(perm) != list(range(npts)):
                raise ValueError("generator is not a permutation")
            if _perm_power(perm, d) != tuple(range(npts)):
                raise ValueError(f"generator permutation does not have order dividing {d}")
            if _compose(perm, self.frobenius) != _compose(self.frobenius, perm):
                raise ValueError("group action and Frobenius do not commute")
        for a, b in itertools.combinations(self.generators, 2):
            if _compose(a, b) != _compose(b, a):
                raise ValueError("generator permutations do not commute")

    @property
    def size(self) -> int:
        return len(self.frobenius)

    def act(self, gamma) -> tuple[int, ...]:
        perm = tuple(range(self.size))
        for g, k in zip(self.generators, gamma):
            perm = _compose(_perm_power(g, k), perm)
        return perm


GammaVarietyAction = LinearModel | PointSetModel


def _compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """a after b."""
    return tuple(a[b[i]] for i in range(len(b)))


def _perm_power(a: Sequence[int], k: int) -> tuple[int, ...]:
    out = tuple(range(len(a)))
    for _ in range(k):
        out = _compose(a, out)
    return out


# -- enumeration of F_q-bar points of linear models -------------------------------

@dataclass(frozen=True)
class _BigField:
    """F_Q containing F_q, used to enumerate q-power Frobenius in log coordinates."""

    small: FieldSpec
    big: FieldSpec

    @property
    def Q(self) -> int:
        return self.big.q


@lru_cache(maxsize=None)
def _big_field(q: int, degree: int) -> _BigField:
    small = field_of_size(q)
    try:
        big = ff_make_field(small.p, small.m * degree)
    except TooLarge as exc:
        raise ModelTooLarge(f"enumeration field F_{q}^{degree} exceeds desk scale") from exc
    return _BigField(small, big)


@lru_cache(maxsize=None)
def _root_log_in(q: int, degree: int, N: int) -> int:
    """log in F_Q of the image of the canonical primitive N-th root of unity of F_q."""
    bf = _big_field(q, degree)
    zeta = bf.small.exp((q - 1) // N) if N > 1 else 1
    embed = _embedding(q, degree)
    return bf.big.log(embed(zeta))


@lru_cache(maxsize=None)
def _embedding(q: int, degree: int):
    bf = _big_field(q, degree)
    return embed_prime_field_poly(bf.big, bf.small)


def multiplier_exponent(model: LinearModel, gamma, i: int) -> int:
    """k with gamma acting on x_i by zeta_N^k, N = exponent(Gamma)."""
    N = model.group.exponent
    return int(model.character(i)(gamma) * N)


def _coordinate_fixed_count(q: int, N: int, k: int, m: int, iterate: bool) -> int:
    """Fixed points in F_q-bar of a twisted Frobenius on one coordinate.

    ``iterate=True``: the map (x -> zeta_N^(-k) x^q) applied m times.
    ``iterate=False``: the single map x -> zeta_N^(-k) x^(q^m).
    Points are enumerated in log coordinates over the smallest F_(q^L)
    that contains every fixed point.
    """
    twist = k * m if iterate else k
    order = N // math.gcd(N, twist % N) if N > 1 else 1
    L = m * order
    try:
        bf = _big_field(q, L)
    except ModelTooLarge:
        return _coordinate_fixed_count_congruence(q, N, k, m, L, iterate)
    n = bf.Q - 1
    lz = _root_log_in(q, L, N) if N > 1 else 0
    shift = -k * lz % n
    count = 1  # x = 0
    if iterate:
        for e in range(n):
            x = e
            for _ in range(m):
                x = (shift + x * q) % n
            if x == e:
                count += 1
    else:
        qm = pow(q, m, n)
        for e in range(n):
            if (shift + e * qm) % n == e:
                count += 1
    return count


def _coordinate_fixed_count_congruence(q: int, N: int, k: int, m: int, L: int, iterate: bool) -> int:
    """The same count from the linear congruence it reduces to in log coordinates.

    Fixed units e of the map satisfy e (q^m - 1) = c mod (q^L - 1). Which
    primitive N-th root represents zeta does not change the number of
    solutions, so zeta_N is taken as g^((q^L - 1)/N).
    """
    n = q**L - 1
    lz = n // N if N > 1 else 0
    shift = -k * lz % n
    c = -shift * (sum(q**j for j in range(m)) if iterate else 1) % n
    g = math.gcd(q**m - 1, n)
    return 1 + (g if c % g == 0 else 0)


def base_change_twist_count(action: GammaVarietyAction, tau, m: int = 1) -> int:
    """Fixed points of tau^-1 o Frobenius^m: the twist of M over F_(q^m) by tau."""
    if m < 1:
        raise ValueError("m must be >= 1")
    tau = action.group.normalize(tau)
    if isinstance(action, PointSetModel):
        step = _compose(action.act(action.group.neg(tau)), _perm_power(action.frobenius, m))
        return sum(1 for i, j in enumerate(step) if i == j)
    total = 1
    N = action.group.exponent
    for i in range(action.n):
        k = multiplier_exponent(action, tau, i)
        total *= _coordinate_fixed_count(action.q, N, k, m, iterate=False)
    return total


def twist_pointcount(action: GammaVarietyAction, tau, m: int = 1) -> int:
    """#M_tau(F_(q^m)): fixed points of (tau^-1 o Frobenius)^m on M(F_q-bar).

    ``tau`` is an element of Gamma read as an unramified torsor class over F_q.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    tau = action.group.normalize(tau)
    if isinstance(action, PointSetModel):
        tw = _compose(action.act(action.group.neg(tau)), action.frobenius)
        step = _perm_power(tw, m)
        return sum(1 for i, j in enumerate(step) if i == j)
    total = 1
    N = action.group.exponent
    for i in range(action.n):
        k = multiplier_exponent(action, tau, i)
        total *= _coordinate_fixed_count(action.q, N, k, m, iterate=True)
    return total


def twist_pointcount_cycles(action: PointSetModel, tau, m: int) -> int:
    """Same count read off the cycle type of tau^-1 o Frobenius (zeta-function side)."""
    tw = _compose(action.act(action.group.neg(tau)), action.frobenius)
    seen = [False] * action.size
    total = 0
    for start in range(action.size):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = tw[i]
            length += 1
        if m % length == 0:
            total += length
    return total


def _stable_orbit_count_points(action: PointSetModel, m: int) -> int:
    frob = _perm_power(action.frobenius, m)
    elements = list(action.group.elements())
    perms = [action.act(g) for g in elements]
    seen = [False] * action.size
    count = 0
    for x in range(action.size):
        if seen[x]:
            continue
        orbit = {perm[x] for perm in perms}
        for y in orbit:
            seen[y] = True
        if frob[x] in orbit:
            count += 1
    return count


def _stable_orbit_count_linear(action: LinearModel, m: int) -> Fraction:
    """Number of Frobenius^m-stable Gamma-orbits in M(F_q-bar), by enumeration.

    A stable orbit satisfies Fr^(m N) x = x, so it suffices to enumerate
    M(F_(q^(m N))) in log coordinates.
    """
    N = action.group.exponent
    L = m * N
    bf = _big_field(action.q, L)
    n = bf.Q - 1
    if bf.Q ** action.n > MAX_POINTS:
        raise ModelTooLarge(f"{bf.Q}^{action.n} points exceed the enumeration cap")
    lz = _root_log_in(action.q, L, N) if N > 1 else 0
    qm = pow(action.q, m, n)
    elements = list(action.group.elements())
    shifts = [[multiplier_exponent(action, g, i) * lz % n for i in range(action.n)] for g in elements]
    total = Fraction(0)
    coords = [None] + list(range(n))
    for x in itertools.product(coords, repeat=action.n):
        frob = tuple(None if c is None else c * qm % n for c in x)
        images = {tuple(None if c is None else (c + s[i]) % n for i, c in enumerate(x)) for s in shifts}
        if frob in images:
            total += Fraction(1, len(images))
    return total


def _stable_orbit_count_by_support(action: LinearModel, m: int) -> Fraction:
    """Stable-orbit count grouped by support, for models beyond enumeration scale.

    A point with support S lies in a stable orbit iff (x_i^(q^m - 1))_(i in S)
    is the character tuple of some gamma; each admissible tuple has
    (q^m - 1)^|S| solutions, and orbits of support S have |Gamma|/|Stab(S)|
    points.
    """
    g = action.group
    unit = action.q**m - 1
    total = Fraction(0)
    for r in range(action.n + 1):
        for support in itertools.combinations(range(action.n), r):
            tuples = {tuple(action.character(i)(gamma) for i in support) for gamma in g.elements()}
            points = len(tuples) * unit**r
            total += Fraction(points * action.stabilizer_order(support), g.order)
    return total


def stable_orbit_count(action: GammaVarietyAction, m: int = 1) -> tuple[Fraction, str]:
    """Number of Frobenius^m-stable orbits and the method used."""
    if isinstance(action, PointSetModel):
        return Fraction(_stable_orbit_count_points(action, m)), "enumeration"
    try:
        return _stable_orbit_count_linear(action, m), "enumeration"
    except ModelTooLarge:
        return _stable_orbit_count_by_support(action, m), "support classes"


def burnside_check(action: GammaVarietyAction, m: int = 1) -> tuple[Fraction, Fraction]:
    """(groupoid count of [M/Gamma](F_(q^m)), average of twisted counts over H^1).

    The groupoid count is computed as the number of Frobenius-stable
    Gamma-orbits (each contributes |S| objects with |S| automorphisms); the
    other side is (1/|Gamma|) sum_tau #M_tau(F_(q^m)) with tau ranging over
    unramified twists of the base field F_(q^m).
    """
    g = action.group
    left, _ = stable_orbit_count(action, m)
    twisted = sum(base_change_twist_count(action, tau, m) for tau in g.elements())
    right = Fraction(twisted, g.order)
    return left, right


# -- built-in toy models --------------------------------------------------------------

def swap_model() -> PointSetModel:
    """Two points swapped freely by Z/2, trivial Frobenius."""
    return PointSetModel(FinAbGroup((2,)), ((1, 0),), (0, 1))


def toy_models() -> dict[str, GammaVarietyAction]:
    z2, z3, z4 = FinAbGroup((2,)), FinAbGroup((3,)), FinAbGroup((4,))
    models: dict[str, GammaVarietyAction] = {
        "A1/Z2 by -1 over F5": LinearModel(z2, ((1,),), 5),
        "A2/Z2 (1,1) over F5": LinearModel(z2, ((1,), (1,)), 5),
        "A1/Z3 over F7": LinearModel(z3, ((1,),), 7),
        "A2/Z3 (1,2) over F7": LinearModel(z3, ((1,), (2,)), 7),
        "A1/Z4 over F5": LinearModel(z4, ((1,),), 5),
        "A1/Z2 by -1 over F9": LinearModel(z2, ((1,),), 9),
        "A2/Z2xZ2 over F5": LinearModel(FinAbGroup((2, 2)), ((1, 0), (0, 1)), 5),
        "trivial group on A2 over F5": LinearModel(FinAbGroup(()), ((), ()), 5),
        "free swap, trivial Frobenius": swap_model(),
        # 6 points: Z/3 rotates two triangles, Frobenius swaps the triangles
        "two triangles under Z/3, Frobenius swap": PointSetModel(
            z3, ((1, 2, 0, 4, 5, 3),), (3, 4, 5, 0, 1, 2)),
        # Z/2 acting on 4 points with two fixed points; Frobenius a 2-cycle on the free orbit
        "Z/2 with fixed points": PointSetModel(z2, ((0, 1, 3, 2),), (0, 1, 3, 2)),
    }
    return models
