"""Finite model of a dual pair of abstract Hitchin systems.

Each fibre is a pair of finite abelian groups G, H of the same order, joined
by a homomorphism phi: G -> H. The class of each fibre torsor is a
character (Pontryagin duality standing in for Tate duality): t1 on H for
the first system, t2 on G for the second. A fibre has rational points
exactly when its class is trivial, and on a nonempty fibre the function
f is a character times a root of unity xi. Integrals are normalised sums
of f-values over the points.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sympy import factorint
from sympy.utilities.iterables import partitions

from .exact import Cyclo
from .galois import Character, FinAbGroup


def _character_sum(chi: Character, shift=None) -> Cyclo:
    """sum_g chi(g + shift) as an exact cyclotomic number."""
    g = chi.owner
    N = max(g.exponent, 1)
    hist: dict[int, int] = {}
    for a in g.elements():
        if shift is not None:
            a = g.add(a, shift)
        k = int(chi(a) * N)
        hist[k] = hist.get(k, 0) + 1
    return Cyclo.from_histogram(N, hist)


@lru_cache(maxsize=None)
def character_sum(chi: Character) -> Fraction:
    s = _character_sum(chi)
    if not s.is_rational():
        raise ArithmeticError(f"character sum {s} is not rational")
    return s.as_fraction()


@dataclass(frozen=True)
class FiberModel:
    G: FinAbGroup
    H: FinAbGroup
    phi: tuple[tuple[int, ...], ...]  # images in H of the standard generators of G
    t1: Character  # on H
    t2: Character  # on G
    N: Fraction = Fraction(1)
    xi1: Fraction = Fraction(0)  # f on the first fibre is exp(2 pi i xi1) * t2
    xi2: Fraction = Fraction(0)

    def __post_init__(self):
        if self.G.order != self.H.order:
            raise ValueError(f"|G| = {self.G.order} != |H| = {self.H.order}")
        if self.t1.owner != self.H or self.t2.owner != self.G:
            raise ValueError("t1 must be a character of H and t2 a character of G")
        if len(self.phi) != self.G.rank:
            raise ValueError("phi needs one image per generator of G")
        phi = tuple(self.H.normalize(h) for h in self.phi)
        object.__setattr__(self, "phi", phi)
        for d, h in zip(self.G.factors, phi):
            if any(self.H.scale(d, h)):
                raise ValueError(f"image {h} of a generator of order {d} is not killed by {d}")
        object.__setattr__(self, "N", Fraction(self.N))
        if self.N <= 0:
            raise ValueError("normalisation must be positive")
        object.__setattr__(self, "xi1", Fraction(self.xi1) % 1)
        object.__setattr__(self, "xi2", Fraction(self.xi2) % 1)
        if self.t2.is_trivial() and self.xi1:
            raise ValueError("xi1 must be 1 when t2 is trivial")
        if self.t1.is_trivial() and self.xi2:
            raise ValueError("xi2 must be 1 when t1 is trivial")

    def apply_phi(self, g: Sequence[int]) -> tuple[int, ...]:
        out = self.H.zero
        for c, h in zip(g, self.phi):
            out = self.H.add(out, self.H.scale(c, h))
        return out

    @property
    def case(self) -> int:
        """(1) both classes nontrivial, (2) only t1, (3) only t2, (4) neither."""
        a, b = self.t1.is_trivial(), self.t2.is_trivial()
        return {(False, False): 1, (False, True): 2, (True, False): 3, (True, True): 4}[(a, b)]

    def kernel_size(self) -> int:
        zero = self.H.zero
        return sum(1 for g in self.G.elements() if self.apply_phi(g) == zero)

    def image_size(self) -> int:
        return len({self.apply_phi(g) for g in self.G.elements()})


def fiber_integrals(fiber: FiberModel, shift_g=None, shift_h=None) -> tuple[Fraction, Fraction]:
    """(I1, I2). Optional shifts sum over translated copies of G and H."""
    def integral(nonempty: bool, chi: Character, xi: Fraction, shift) -> Fraction:
        if not nonempty:
            return Fraction(0)
        s = character_sum(chi) if shift is None else _character_sum(chi, shift)
        total = Cyclo.root(xi) * s
        if not total.is_rational():
            raise ArithmeticError(f"integral {total} is not rational")
        return total.as_fraction() / fiber.N

    I1 = integral(fiber.t1.is_trivial(), fiber.t2, fiber.xi1, shift_g)
    I2 = integral(fiber.t2.is_trivial(), fiber.t1, fiber.xi2, shift_h)
    return I1, I2


@dataclass(frozen=True)
class DualPairModel:
    fibers: tuple[FiberModel, ...]

    def __post_init__(self):
        if not self.fibers:
            raise ValueError("a dual pair needs at least one fibre")


@dataclass(frozen=True)
class GlobalReport:
    total1: Fraction
    total2: Fraction
    per_fiber: tuple[tuple[int, Fraction, Fraction], ...]  # (case, I1, I2)

    @property
    def passed(self) -> bool:
        return self.total1 == self.total2 and all(a == b for _, a, b in self.per_fiber)


def global_identity(model: DualPairModel) -> GlobalReport:
    rows = []
    s1 = s2 = Fraction(0)
    for fib in model.fibers:
        I1, I2 = fiber_integrals(fib)
        rows.append((fib.case, I1, I2))
        s1 += I1
        s2 += I2
    return GlobalReport(s1, s2, tuple(rows))


# -- model construction ----------------------------------------------------------------

def abelian_groups(order: int) -> list[FinAbGroup]:
    """All abelian groups of the given order, in invariant-factor form."""
    per_prime = []
    for p, e in sorted(factorint(order).items()):
        options = []
        for part in partitions(e):
            exps = sorted(itertools.chain.from_iterable([k] * m for k, m in part.items()))
            options.append([p**k for k in exps])
        per_prime.append(options)
    out = []
    for choice in itertools.product(*per_prime):
        rank = max((len(c) for c in choice), default=0)
        factors = [1] * rank
        for powers in choice:
            padded = [1] * (rank - len(powers)) + powers
            factors = [a * b for a, b in zip(factors, padded)]
        out.append(FinAbGroup(tuple(f for f in factors if f > 1)))
    return out


def identity_map(G: FinAbGroup) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i == j) for j in range(G.rank)) for i in range(G.rank))


def _random_hom(G: FinAbGroup, H: FinAbGroup, rng: random.Random) -> tuple[tuple[int, ...], ...]:
    images = []
    for d in G.factors:
        candidates = [h for h in H.elements() if not any(H.scale(d, h))]
        images.append(rng.choice(candidates))
    return tuple(images)


def _random_character(group: FinAbGroup, rng: random.Random, p_trivial: float) -> Character:
    if rng.random() < p_trivial:
        return Character(group, group.zero)
    return Character(group, tuple(rng.randrange(d) for d in group.factors))


def _random_xi(other: Character, rng: random.Random) -> Fraction:
    if other.is_trivial():
        return Fraction(0)
    return Fraction(rng.randrange(12), 12)


def random_dual_pair(fibers: int, seed: int, max_order: int = 64, p_trivial: float = 0.5) -> DualPairModel:
    rng = random.Random(seed)
    out = []
    for _ in range(fibers):
        order = rng.randint(1, max_order)
        groups = abelian_groups(order)
        G, H = rng.choice(groups), rng.choice(groups)
        t1 = _random_character(H, rng, p_trivial)
        t2 = _random_character(G, rng, p_trivial)
        out.append(FiberModel(
            G, H, _random_hom(G, H, rng), t1, t2, Fraction(rng.randint(1, 50)),
            _random_xi(t2, rng), _random_xi(t1, rng),
        ))
    return DualPairModel(tuple(out))


def exhaustive_fibers(group: FinAbGroup, N: Fraction = Fraction(1)):
    """Every (t1, t2) assignment for G = H = group with phi the identity."""
    phi = identity_map(group)
    chars = list(group.characters())
    for t1 in chars:
        for t2 in chars:
            yield FiberModel(group, group, phi, t1, t2, N)


@dataclass(frozen=True)
class CurveDualPair:
    model: DualPairModel
    kernel_size: int
    annihilates_kernel: tuple[bool, ...]  # does t2 vanish on ker(phi), per fibre


def make_model_from_curve(E, n: int, base_size: int, seed: int, p_trivial: float = 0.5) -> CurveDualPair:
    """G = H = E(F_q) with phi = [n] and N = q; characters drawn from ``seed``."""
    from .duality import ec_group

    if math.gcd(n, E.field.p) != 1:
        raise ValueError(f"gcd(n, p) != 1 for n = {n}")
    G = FinAbGroup(ec_group(E))
    phi = tuple(G.scale(n, row) for row in identity_map(G))
    rng = random.Random(seed)
    fibers = []
    for _ in range(base_size):
        t1 = _random_character(G, rng, p_trivial)
        t2 = _random_character(G, rng, p_trivial)
        fibers.append(FiberModel(G, G, phi, t1, t2, Fraction(E.q), _random_xi(t2, rng), _random_xi(t1, rng)))
    kernel = fibers[0].kernel_size()
    ker = [g for g in G.elements() if not any(fibers[0].apply_phi(g))]
    annihilates = tuple(all(f.t2(g) == 0 for g in ker) for f in fibers)
    return CurveDualPair(DualPairModel(tuple(fibers)), kernel, annihilates)
