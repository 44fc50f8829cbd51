"""Finite model of a dual pair of abstract Hitchin systems."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from sympy import factorint, partition

from padic_stringy.duality import EllipticCurveModel, check_selfdual
from padic_stringy.galois import Character, FinAbGroup
from padic_stringy.mirrorsim import (
    DualPairModel,
    FiberModel,
    abelian_groups,
    character_sum,
    exhaustive_fibers,
    fiber_integrals,
    global_identity,
    identity_map,
    make_model_from_curve,
    random_dual_pair,
)

SMALL = [FinAbGroup(()), FinAbGroup((2,)), FinAbGroup((2, 2)), FinAbGroup((3, 3)), FinAbGroup((2, 4)), FinAbGroup((12,))]


@pytest.mark.parametrize("n", [1, 2, 8, 12, 16, 36, 64, 72, 97])
def test_abelian_group_count(n):
    """The number of abelian groups of order n is the product of p(e) over p^e || n."""
    groups = abelian_groups(n)
    assert all(g.order == n for g in groups)
    assert len(set(groups)) == len(groups) == math.prod(int(partition(e)) for e in factorint(n).values())


@pytest.mark.parametrize("g", SMALL, ids=str)
def test_character_sums(g):
    for chi in g.characters():
        assert character_sum(chi) == (g.order if chi.is_trivial() else 0)


@pytest.mark.parametrize("g", SMALL, ids=str)
def test_case_table(g):
    """Both sides vanish unless both classes are trivial, where both equal |G|/N."""
    for fib in exhaustive_fibers(g, Fraction(7)):
        I1, I2 = fiber_integrals(fib)
        assert I1 == I2
        assert I1 == (Fraction(g.order, 7) if fib.case == 4 else 0)


@given(st.integers(0, 10**6))
def test_translation_invariance(seed):
    model = random_dual_pair(3, seed, max_order=24)
    for fib in model.fibers:
        base = fiber_integrals(fib)
        g_shift = next(iter(reversed(list(fib.G.elements()))))
        h_shift = next(iter(reversed(list(fib.H.elements()))))
        assert fiber_integrals(fib, g_shift, h_shift) == base


@given(st.integers(0, 10**6))
def test_kernel_image(seed):
    for fib in random_dual_pair(4, seed, max_order=30).fibers:
        assert fib.kernel_size() * fib.image_size() == fib.G.order
        for g in fib.G.elements():
            assert fib.H.scale(1, fib.apply_phi(g)) == fib.apply_phi(g)


@given(st.integers(0, 10**6), st.floats(0, 1))
def test_global_identity_random(seed, p_trivial):
    rep = global_identity(random_dual_pair(6, seed, max_order=48, p_trivial=p_trivial))
    assert rep.passed
    assert rep.total1 == rep.total2


@pytest.mark.parametrize("q,coeffs,n", [(5, [0, 0, 0, 1, 0], 2), (7, [0, 0, 0, 0, 1], 3), (11, [1, 0, 1, 3, 2], 2)])
def test_curve_model(q, coeffs, n):
    E = EllipticCurveModel.over(q, coeffs)
    pair = make_model_from_curve(E, n, base_size=12, seed=3)
    assert pair.kernel_size == check_selfdual(E, n).kernel
    assert global_identity(pair.model).passed
    assert all(f.N == q for f in pair.model.fibers)


def test_validation():
    z2, z4 = FinAbGroup((2,)), FinAbGroup((4,))
    triv2, triv4 = Character(z2, (0,)), Character(z4, (0,))
    with pytest.raises(ValueError):
        FiberModel(z2, z4, ((0,),), triv4, triv2)
    with pytest.raises(ValueError):
        FiberModel(z4, z4, ((0,),), triv4, Character(z4, (1,)), xi2=Fraction(1, 2))
    with pytest.raises(ValueError):
        FiberModel(z2, z2, ((0,),), Character(z2, (1,)), triv2, xi1=Fraction(1, 3))
    with pytest.raises(ValueError):
        FiberModel(z4, z4, ((1,),), triv4, triv4, N=0)
    v4 = FinAbGroup((2, 2))
    with pytest.raises(ValueError):
        # generators of order 2 must map to elements killed by 2
        FiberModel(v4, z4, ((1,), (0,)), triv4, Character(v4, (0, 0)))
    with pytest.raises(ValueError):
        FiberModel(z4, z4, ((1,), (1,)), triv4, triv4)
    with pytest.raises(ValueError):
        DualPairModel(())
    assert identity_map(FinAbGroup((2, 2))) == ((1, 0), (0, 1))
