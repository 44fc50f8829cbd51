"""Finite fields against sympy's dense GF(p)[x] arithmetic and Gaussian integers."""

import math

import pytest
from hypothesis import given, strategies as st
from sympy import GF, Poly, symbols
from sympy.polys.galoistools import gf_add, gf_mul, gf_rem

from padic_stringy.errors import NonPrime, NotInSubgroup, PDividesN, TooLarge
from padic_stringy.ff import (
    MAX_FIELD_SIZE,
    embed_prime_field_poly,
    ff_dlog,
    ff_make_field,
    ff_nth_roots_of_unity,
    ff_primitive_root,
    field_of_size,
    is_irreducible,
    teichmuller_root_of_unity,
)

FIELDS = [(2, 1), (5, 1), (2, 3), (3, 2), (2, 4), (5, 2), (7, 2), (3, 3)]


def _sympy_mul(field, a, b):
    """Product of two indices computed with sympy (coefficient lists are high degree first)."""
    p = field.p
    mod = [1] + list(reversed(field.modulus))
    da = list(reversed(field.digits(a)))
    db = list(reversed(field.digits(b)))
    r = gf_rem(gf_mul(da, db, p, GF(p).dom), mod, p, GF(p).dom)
    r = [int(c) % p for c in reversed(r)]
    return field.index(r + [0] * (field.m - len(r)))


def _sympy_add(field, a, b):
    p = field.p
    da = list(reversed(field.digits(a)))
    db = list(reversed(field.digits(b)))
    r = [int(c) % p for c in reversed(gf_add(da, db, p, GF(p).dom))]
    return field.index(r + [0] * (field.m - len(r)))


@pytest.mark.parametrize("p,m", FIELDS)
def test_modulus_irreducible_per_sympy(p, m):
    f = ff_make_field(p, m)
    x = symbols("x")
    if m > 1:
        poly = Poly(list(reversed(list(f.modulus) + [1])), x, modulus=p)
        assert poly.is_irreducible
    assert f.q == p**m


@pytest.mark.parametrize("p,m", FIELDS)
def test_table_arithmetic_matches_polynomial_arithmetic(p, m):
    f = ff_make_field(p, m)
    for a in range(f.q):
        for b in range(0, f.q, max(1, f.q // 11)):
            assert f.mul(a, b) == _sympy_mul(f, a, b)
            assert f.add(a, b) == _sympy_add(f, a, b)


def test_f9_is_gaussian_integers_mod_3():
    # modulus x^2 + 1, so a + b x <-> a + b i
    f = ff_make_field(3, 2)
    assert f.modulus == (1, 0)
    for a in range(9):
        for b in range(9):
            (x0, x1), (y0, y1) = f.digits(a), f.digits(b)
            re, im = (x0 * y0 - x1 * y1) % 3, (x0 * y1 + x1 * y0) % 3
            assert f.digits(f.mul(a, b)) == (re, im)


@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(pm, data):
    f = ff_make_field(*pm)
    idx = st.integers(0, f.q - 1)
    a, b, c = (f.element(data.draw(idx)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == f.zero
    assert a + (-a) == f.zero
    if a:
        assert a * a.inverse() == f.one
        assert a ** (f.q - 1) == f.one
        assert (b / a) * a == b


@given(st.sampled_from(FIELDS), st.data())
def test_frobenius_is_additive(pm, data):
    f = ff_make_field(*pm)
    a = f.element(data.draw(st.integers(0, f.q - 1)))
    b = f.element(data.draw(st.integers(0, f.q - 1)))
    assert (a + b) ** f.p == a**f.p + b**f.p
    assert a**f.q == a


@pytest.mark.parametrize("p,m", FIELDS)
def test_primitive_root_generates(p, m):
    f = ff_make_field(p, m)
    g = ff_primitive_root(f)
    assert g.order() == f.q - 1
    assert len({(g**k).index for k in range(f.q - 1)}) == f.q - 1


@pytest.mark.parametrize("p,m", FIELDS)
def test_canonical_primitive_root_is_least(p, m):
    f = ff_make_field(p, m)
    g = ff_primitive_root(f).index
    for i in range(1, g):
        assert f.element(i).order() < f.q - 1


@given(st.sampled_from(FIELDS), st.integers(1, 30))
def test_roots_of_unity_count(pm, n):
    f = ff_make_field(*pm)
    if n % f.p == 0:
        with pytest.raises(PDividesN):
            ff_nth_roots_of_unity(f, n)
        return
    roots = ff_nth_roots_of_unity(f, n)
    assert len(roots) == math.gcd(n, f.q - 1)
    brute = sorted(x.index for x in f.elements() if x and (x**n).index == 1)
    assert [r.index for r in roots] == brute


@given(st.sampled_from(FIELDS), st.data())
def test_dlog_round_trip(pm, data):
    f = ff_make_field(*pm)
    base = f.element(data.draw(st.integers(1, f.q - 1)))
    e = data.draw(st.integers(0, 3 * f.q))
    x = base**e
    k = ff_dlog(base, x)
    assert base**k == x
    assert 0 <= k < base.order()


def test_dlog_not_in_subgroup():
    f = ff_make_field(7)
    # 2 has order 3; 3 is a generator, so 3 is not a power of 2
    with pytest.raises(NotInSubgroup):
        ff_dlog(f.element(2), f.element(3))


def test_teichmuller_root_has_exact_order():
    f = ff_make_field(13)
    for d in (1, 2, 3, 4, 6, 12):
        assert f.element(teichmuller_root_of_unity(f, d)).order() == d


@pytest.mark.parametrize("big,small", [((2, 4), (2, 2)), ((3, 2), (3, 1)), ((5, 2), (5, 1)), ((2, 6), (2, 3))])
def test_embedding_is_a_ring_homomorphism(big, small):
    B, S = ff_make_field(*big), ff_make_field(*small)
    emb = embed_prime_field_poly(B, S)
    for a in range(S.q):
        for b in range(S.q):
            assert emb(S.mul(a, b)) == B.mul(emb(a), emb(b))
            assert emb(S.add(a, b)) == B.add(emb(a), emb(b))
    assert len({emb(a) for a in range(S.q)}) == S.q


def test_is_irreducible_agrees_with_sympy():
    x = symbols("x")
    p = 3
    for low in range(p**3):
        coeffs = [(low // p**i) % p for i in range(3)] + [1]
        ours = is_irreducible(coeffs, p)
        theirs = Poly(list(reversed(coeffs)), x, modulus=p).is_irreducible
        assert ours == theirs


def test_bad_inputs():
    with pytest.raises(NonPrime):
        ff_make_field(6)
    with pytest.raises(NonPrime):
        field_of_size(12)
    with pytest.raises(TooLarge):
        ff_make_field(2, 21)
    assert MAX_FIELD_SIZE == 10**6
    with pytest.raises(ZeroDivisionError):
        ff_make_field(5).element(0).inverse()
