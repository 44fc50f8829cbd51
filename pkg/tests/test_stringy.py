"""Stringy counts and E-polynomials of [A^n/Gamma], with and without gerbes."""

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padic_stringy.exact import QExp
from padic_stringy.galois import Character, FinAbGroup, LinearModel
from padic_stringy.orbifold import LinearCyclicAction, as_model, builtin_actions, orb_total_volume
from padic_stringy.stringy import (
    EPoly,
    GerbeData,
    attach_gerbe,
    sector_breakdown,
    stringy_count,
    stringy_epoly,
    strata_from_action,
    twisted_row_factor,
    xi_reindex,
)

ACTIONS = builtin_actions()


def _count_from_weights(d, weights):
    """sum over j of q^(#{i : j e_i = 0 mod d} + sum_i {j e_i / d})."""
    total = QExp()
    for j in range(d):
        fr = [Fraction(j * e % d, d) for e in weights]
        total = total + QExp.monomial(sum(1 for f in fr if f == 0) + sum(fr))
    return total


@pytest.mark.parametrize("name", [n for n, a in ACTIONS.items() if isinstance(a, LinearCyclicAction)])
def test_count_against_weight_formula(name):
    a = ACTIONS[name]
    assert stringy_count(strata_from_action(a)) == _count_from_weights(a.d, a.weights)


@pytest.mark.parametrize("name", list(ACTIONS))
def test_volume_bridge(name):
    """The orbifold volume of X(O_F)^# is the stringy count divided by q^n."""
    a = ACTIONS[name]
    model = as_model(a)
    count = stringy_count(strata_from_action(a)).at(model.q)
    assert count / model.q**model.n == orb_total_volume(a)


@pytest.mark.parametrize("name", list(ACTIONS))
def test_epoly_specializes_to_count(name):
    t = strata_from_action(ACTIONS[name])
    assert stringy_epoly(t).specialize() == stringy_count(t)
    assert all(r.burnside_verified for r in t.rows)


@pytest.mark.parametrize("d,weights,q", [(2, (1, 1), 5), (3, (1, 2), 7), (4, (1, 3), 5), (6, (1, 5), 7)])
def test_mckay(d, weights, q):
    """Z/d in SL_2: E_st = (xy)^2 + (d - 1) xy, matching the minimal resolution."""
    t = strata_from_action(LinearCyclicAction(d, weights, q))
    assert stringy_epoly(t) == EPoly({(2, 2): 1, (1, 1): d - 1})


def test_a2_mod_z2():
    t = strata_from_action(LinearCyclicAction(2, (1, 1), 5))
    assert stringy_count(t) == QExp({2: 1, 1: 1})
    assert stringy_count(t).at(5) == 30
    gerbe = GerbeData.from_bilinear(t.model.group, [[1]])
    assert stringy_count(t, gerbe) == QExp({2: 1})
    assert stringy_epoly(t, gerbe) == EPoly({(2, 2): 1})


def _bilinear_gerbes(group, limit=16):
    r = group.rank
    for entries in itertools.islice(itertools.product(range(group.exponent), repeat=r * r), limit):
        matrix = [list(entries[i * r:(i + 1) * r]) for i in range(r)]
        try:
            yield GerbeData.from_bilinear(group, matrix)
        except ValueError:
            continue


@pytest.mark.parametrize("name", [n for n in ACTIONS if "trivial" not in n])
def test_gerbe_count_matches_gerbe_epoly(name):
    t = strata_from_action(ACTIONS[name])
    for gerbe in _bilinear_gerbes(t.model.group):
        assert stringy_epoly(t, gerbe).specialize() == stringy_count(t, gerbe)


@pytest.mark.parametrize("name", [n for n in ACTIONS if "trivial" not in n])
def test_independent_of_root_of_unity(name):
    t = strata_from_action(ACTIONS[name])
    N = t.model.group.exponent
    for gerbe in list(_bilinear_gerbes(t.model.group))[:4]:
        base = attach_gerbe(t, gerbe)
        for c in range(1, N):
            if math.gcd(c, N) != 1:
                continue
            re = xi_reindex(base, c)
            assert stringy_count(re) == stringy_count(base)
            assert stringy_epoly(re) == stringy_epoly(base)


def test_reindex_moves_shifts():
    t = strata_from_action(LinearCyclicAction(3, (1, 1), 7))
    assert [r.F for r in t.rows] == [0, Fraction(2, 3), Fraction(4, 3)]
    assert [r.F for r in xi_reindex(t, 2).rows] == [0, Fraction(4, 3), Fraction(2, 3)]
    assert stringy_count(xi_reindex(t, 2)) == stringy_count(t)
    with pytest.raises(ValueError):
        xi_reindex(t, 3)


@given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
def test_twist_factor_is_character_average(a, b, c, d):
    """Twisted forms of affine spaces are affine spaces, so the factor is the mean of kappa."""
    g = FinAbGroup((2, 2))
    t = strata_from_action(LinearModel(g, ((1, 0), (0, 1), (1, 1)), 5))
    kappa = Character(g, (a + 2 * c, b + 2 * d))
    for row in t.rows:
        assert twisted_row_factor(t, row, kappa) == (1 if kappa.is_trivial() else 0)


def test_gerbe_validation():
    g = FinAbGroup((2,))
    with pytest.raises(ValueError):
        GerbeData(g, {(0,): Character(g, (1,)), (1,): Character(g, (0,))}, 2)
    with pytest.raises(ValueError):
        GerbeData(g, {(0,): Character(g, (0,))}, 1)
    table = GerbeData.from_table(g, {(1,): (1,)})
    assert table.order == 2
    with pytest.raises(ValueError):
        attach_gerbe(strata_from_action(LinearCyclicAction(3, (1,), 7)), table)


def test_breakdown_is_serialisable():
    import json

    t = strata_from_action(LinearCyclicAction(2, (1, 1, 2), 5))
    rows = sector_breakdown(t, GerbeData.from_bilinear(t.model.group, [[1]]))
    json.dumps(rows)
    assert [r["twist_factor"] for r in rows] == ["1", "0"]
    assert rows[1]["fixed_coordinates"] == [2]


def test_epoly_algebra():
    a = EPoly({(1, 1): 2, (0, 0): 1})
    assert a * a == EPoly({(2, 2): 4, (1, 1): 4, (0, 0): 1})
    assert (a + a * -1) == EPoly()
    assert repr(EPoly.xy_power(Fraction(1, 2))) == "(xy)^(1/2)"
