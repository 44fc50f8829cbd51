"""Small worked examples with hand-checkable answers, one per operation."""

import json
from fractions import Fraction

import pytest

from padic_stringy import cli
from padic_stringy.duality import (
    EllipticCurveModel,
    UnramifiedModule,
    check_euler,
    check_selfdual,
    ec_count,
    ec_group,
    ec_torsion_module,
    f_alpha_model,
    h1_size,
)
from padic_stringy.errors import (
    BadCharacteristic,
    NonPrime,
    NoRoot,
    NotInSubgroup,
    PDividesN,
    PrecisionExhausted,
    RootsOfUnityMissing,
    SingularCurve,
    SingularReduction,
    ZeroElement,
    ZeroToPrecision,
)
from padic_stringy.exact import Cyclo, QExp, QValue
from padic_stringy.ff import ff_dlog, ff_make_field, ff_nth_roots_of_unity, ff_primitive_root
from padic_stringy.galois import (
    Character,
    FinAbGroup,
    LinearModel,
    TorsorClass,
    burnside_check,
    h1_enumerate,
    h1_pairing,
    kummer_class,
    swap_model,
    twist_pointcount,
)
from padic_stringy.localfield import local_field, ls_arith, ls_nth_root, ls_power_class, ls_unit_decompose
from padic_stringy.mirrorsim import FiberModel, fiber_integrals, global_identity, identity_map, make_model_from_curve, DualPairModel
from padic_stringy.orbifold import (
    FiberTarget,
    LinearCyclicAction,
    PolySystem,
    as_model,
    builtin_weil_models,
    orb_fiber_volume,
    orb_fiber_volume_1d,
    orb_total_volume,
    shifts,
    specialize_1d,
    weil_volume,
)
from padic_stringy.stringy import EPoly, GerbeData, stringy_count, stringy_epoly, strata_from_action, xi_reindex


# -- finite fields --------------------------------------------------------------------


def test_field_construction():
    assert ff_make_field(7, 1).q == 7
    f9 = ff_make_field(3, 2)
    # monic irreducible quadratics over Z/3 are x^2+1, x^2+x+2, x^2+2x+2; the search picks x^2+1
    assert f9.modulus == (1, 0)
    with pytest.raises(NonPrime):
        ff_make_field(4, 1)


def test_primitive_roots():
    assert ff_primitive_root(ff_make_field(7)).index == 3
    assert ff_primitive_root(ff_make_field(2)).index == 1
    assert ff_primitive_root(ff_make_field(5)).index == 2


def test_roots_of_unity_examples():
    assert [r.index for r in ff_nth_roots_of_unity(ff_make_field(5), 2)] == [1, 4]
    assert [r.index for r in ff_nth_roots_of_unity(ff_make_field(7), 3)] == [1, 2, 4]
    with pytest.raises(PDividesN):
        ff_nth_roots_of_unity(ff_make_field(5), 5)


def test_dlog_examples():
    f = ff_make_field(7)
    assert ff_dlog(f.element(3), f.element(6)) == 3
    g = ff_primitive_root(f)
    assert ff_dlog(g, g) == 1
    with pytest.raises(NotInSubgroup):
        ff_dlog(f.element(3), f.element(0))


# -- local field ----------------------------------------------------------------------


def test_series_division_examples():
    K = local_field(5, 6)
    assert (K.parse("t + t^2") / K.parse("t")).as_dict() == {0: 1, 1: 1}
    geom = K.parse("1") / K.parse("1 + 4*t")  # 1 - t with -1 = 4 in F_5
    assert geom.as_dict() == {e: 1 for e in range(6)}
    K3 = local_field(5, 3)
    with pytest.raises(PrecisionExhausted):
        ls_arith(K3.parse("t^2"), K3.parse("t^3"), "×")
    assert ls_arith(K3.parse("t^2"), K3.series({3: 1}, 4), "×").as_dict() == {5: 1}
    assert ls_arith(K3.parse("t"), K3.parse("t"), "-").is_zero()


def test_unit_decomposition_examples():
    K = local_field(5, 6)
    dec = ls_unit_decompose(K.parse("2*t^3 + t^4"))
    assert (dec.v, dec.teich.index) == (3, 2)
    assert dec.one_unit.as_dict() == {0: 1, 1: 3}
    one = ls_unit_decompose(K.parse("1"))
    assert (one.v, one.teich.index, one.one_unit.as_dict()) == (0, 1, {0: 1})
    with pytest.raises(ZeroElement):
        ls_unit_decompose(K.zero())


def test_root_examples():
    K = local_field(3, 6)
    r = ls_nth_root(K.parse("1 + t"), 2)
    assert (r * r).as_dict() == {0: 1, 1: 1}
    assert r.as_dict()[1] == 2  # 1 + t/2 + ... with 1/2 = 2 in F_3
    with pytest.raises(NoRoot):
        ls_nth_root(K.parse("t"), 2)
    with pytest.raises(NoRoot):
        ls_nth_root(K.parse("2"), 2)


def test_power_class_examples():
    K = local_field(3, 6)
    assert ls_power_class(K.parse("t"), 2) == (1, 0)
    assert ls_power_class(K.parse("2*t"), 2) == (1, 1)
    assert ls_power_class(K.parse("t^2 + t^3"), 2) == (0, 0)


# -- H^1 and twisting ----------------------------------------------------------------


def test_h1_examples():
    assert len(h1_enumerate(FinAbGroup((2,)), 3)) == 4
    with pytest.raises(BadCharacteristic):
        h1_enumerate(FinAbGroup((2,)), 4)
    with pytest.raises(RootsOfUnityMissing):
        h1_enumerate(FinAbGroup((3,)), 5)
    assert len(h1_enumerate(FinAbGroup(()), 5)) == 1


def test_pairing_examples():
    g = FinAbGroup((2,))
    a, b = TorsorClass(g, (1,), (0,), 3), TorsorClass(g, (0,), (1,), 3)
    assert h1_pairing(a, b) == Fraction(1, 2)
    classes = h1_enumerate(g, 3)
    assert all(h1_pairing(c, c) == 0 for c in classes)
    # the 4x4 table of pairing values, read as +-1, is invertible
    import numpy as np
    m = np.array([[(-1) ** int(2 * h1_pairing(x, y)) for y in classes] for x in classes])
    assert round(abs(np.linalg.det(m))) != 0


def test_kummer_examples():
    K = local_field(3, 6)
    assert kummer_class(K.parse("t"), 2) == TorsorClass(FinAbGroup((2,)), (0,), (1,), 3)
    assert kummer_class(K.parse("2"), 2) == TorsorClass(FinAbGroup((2,)), (1,), (0,), 3)
    assert kummer_class(K.parse("1 + t"), 2).is_trivial()


def test_twist_examples():
    model = LinearModel(FinAbGroup((2,)), ((1,),), 5)
    assert twist_pointcount(model, (1,), 1) == 5
    assert twist_pointcount(model, (0,), 2) == 25
    assert twist_pointcount(swap_model(), (1,)) == 0
    assert burnside_check(model, 1) == (5, 5)
    assert burnside_check(LinearModel(FinAbGroup(()), ((), ()), 5), 1) == (25, 25)
    assert burnside_check(swap_model(), 1) == (1, 1)


# -- orbifold --------------------------------------------------------------------------


def test_shift_examples():
    recs = shifts(LinearCyclicAction(2, (1, 1), 5))
    assert (recs[1].fixed_dim, recs[1].F, recs[1].w) == (0, 1, 1)
    assert (recs[0].fixed_dim, recs[0].F, recs[0].w) == (2, 0, 2)
    recs = shifts(LinearCyclicAction(3, (1, 2), 7))
    assert recs[1].F == recs[2].F == 1
    assert recs[1].F + recs[2].F == 2


def test_specialization_examples():
    K = local_field(3, 6)
    sp = specialize_1d(K.parse("t"), 2)
    assert (sp.torsor.unr, sp.torsor.ram, sp.stratum) == ((0,), (1,), "origin")
    sp = specialize_1d(K.parse("1 + t"), 2)
    assert sp.torsor.is_trivial() and sp.stratum == "free"
    with pytest.raises(ZeroToPrecision):
        specialize_1d(K.zero(), 2)


def test_block_volume_examples():
    assert orb_fiber_volume_1d(2, 1, 5) == QValue.power(5, Fraction(-1, 2)) / 2
    assert orb_fiber_volume_1d(1, 0, 5) == 1
    assert orb_fiber_volume_1d(2, 2, 3) == Fraction(1, 6)


def test_fibre_volume_examples():
    m = as_model(LinearCyclicAction(2, (1, 1), 5))
    assert orb_fiber_volume(m, FiberTarget(TorsorClass(m.group, (0,), (1,), 5))) == Fraction(1, 10)
    # a free point in the identity sector: one residue disc, volume q^(-n)
    assert orb_fiber_volume(m, FiberTarget(TorsorClass(m.group, (0,), (0,), 5), (0, 1))) == Fraction(1, 25)
    m = as_model(LinearCyclicAction(3, (1, 2), 7))
    assert orb_fiber_volume(m, FiberTarget(TorsorClass(m.group, (0,), (1,), 7))) == Fraction(1, 21)


def test_total_volume_examples():
    assert orb_total_volume(LinearCyclicAction(2, (1, 1), 5)) == Fraction(6, 5)
    assert orb_total_volume(LinearCyclicAction(1, (1,), 5)) == 1
    assert orb_total_volume(LinearCyclicAction(2, (1,), 9)) == Fraction(4, 3)


def test_weil_examples():
    assert weil_volume(builtin_weil_models()["affine line"], 5).closed_form == 1
    rep = weil_volume(builtin_weil_models()["circle x^2+y^2=1"], 5)
    assert rep.point_count == 4 and rep.level_counts[1] == 4 * 5
    with pytest.raises(SingularReduction):
        weil_volume(PolySystem.parse(["y^2 - x^3"], ["x", "y"]), 5)


# -- stringy --------------------------------------------------------------------------


def test_strata_examples():
    t = strata_from_action(LinearCyclicAction(2, (1, 1), 5))
    assert [(r.component, r.F, r.count.at(5)) for r in t.rows] == [((0, 1), 0, 25), ((), 1, 1)]
    t = strata_from_action(LinearCyclicAction(1, (1, 1), 5))
    assert len(t.rows) == 1 and t.rows[0].count == QExp.monomial(2)
    t = strata_from_action(LinearCyclicAction(2, (1,), 5))
    assert [(r.count, r.F) for r in t.rows] == [(QExp.monomial(1), 0), (QExp.monomial(0), Fraction(1, 2))]


def test_stringy_examples():
    t = strata_from_action(LinearCyclicAction(2, (1, 1), 5))
    g = t.model.group
    assert stringy_count(t).at(5) == 30
    assert stringy_count(t, GerbeData.trivial(g)) == stringy_count(t)
    nontrivial = GerbeData.from_table(g, {(1,): (1,)})
    assert stringy_count(t, nontrivial).at(5) == 25
    assert stringy_epoly(t) == EPoly({(2, 2): 1, (1, 1): 1})
    assert stringy_epoly(t, nontrivial) == EPoly({(2, 2): 1})


def test_reindex_examples():
    t = strata_from_action(LinearCyclicAction(3, (1,), 7))
    assert xi_reindex(t, 1).rows == t.rows
    swapped = xi_reindex(t, 2)
    assert [r.F for r in t.rows] == [0, Fraction(1, 3), Fraction(2, 3)]
    assert [r.F for r in swapped.rows] == [0, Fraction(2, 3), Fraction(1, 3)]
    assert stringy_count(swapped) == stringy_count(t)
    with pytest.raises(ValueError):
        xi_reindex(t, 3)


# -- duality --------------------------------------------------------------------------


def test_curve_examples():
    E = EllipticCurveModel.over(5, [0, 0, 0, 1, 0])
    assert ec_count(E) == 4
    assert ec_group(E) == (2, 2)
    assert ec_group(EllipticCurveModel.over(5, [0, 0, 0, 0, 1])) == (6,)
    with pytest.raises(SingularCurve):
        EllipticCurveModel.over(5, [0, 0, 0, 0, 0])
    M = ec_torsion_module(E, 2)
    assert M.sigma == ((1, 0), (0, 1))


def test_h1_size_examples():
    ident = UnramifiedModule(2, ((1, 0), (0, 1)), 5)
    assert h1_size(ident) == 16
    assert h1_size(UnramifiedModule(1, ((0,),), 5)) == 1
    assert h1_size(UnramifiedModule(3, ((0, 1), (1, 0)), 7)) == 9
    rep = check_euler(ident)
    assert (rep.h1, rep.invariants, rep.dual_invariants) == (16, 4, 4)


def test_selfdual_examples():
    E = EllipticCurveModel.over(5, [0, 0, 0, 1, 0])
    assert (check_selfdual(E, 2).cokernel, check_selfdual(E, 2).kernel) == (4, 4)
    assert (check_selfdual(E, 3).cokernel, check_selfdual(E, 3).kernel) == (1, 1)
    F = EllipticCurveModel.over(5, [0, 0, 0, 0, 1])
    assert (check_selfdual(F, 3).cokernel, check_selfdual(F, 3).kernel) == (3, 3)


def test_f_alpha_examples():
    z4 = FinAbGroup((4,))
    assert f_alpha_model(Character(z4, (0,)))((3,)) == Cyclo.rational(1)
    values = [f_alpha_model(Character(z4, (1,)))((a,)) for a in range(4)]
    assert sum(values, Cyclo.rational(0)) == Cyclo.rational(0)
    assert len(set(values)) == 4
    assert f_alpha_model(Character(z4, (0,)), Fraction(1, 2))((1,)) == Cyclo.rational(-1)


# -- mirror model ---------------------------------------------------------------------


def test_fibre_case_examples():
    z4 = FinAbGroup((4,))
    triv, chi = Character(z4, (0,)), Character(z4, (1,))
    phi = identity_map(z4)
    assert fiber_integrals(FiberModel(z4, z4, phi, triv, triv, Fraction(2))) == (2, 2)
    assert fiber_integrals(FiberModel(z4, z4, phi, chi, triv, Fraction(2))) == (0, 0)
    assert fiber_integrals(FiberModel(z4, z4, phi, chi, chi, Fraction(2))) == (0, 0)
    model = DualPairModel((FiberModel(z4, z4, phi, triv, triv), FiberModel(z4, z4, phi, chi, triv)))
    rep = global_identity(model)
    assert (rep.total1, rep.total2) == (4, 4)


def test_curve_model_examples():
    E = EllipticCurveModel.over(5, [0, 0, 0, 1, 0])
    pair = make_model_from_curve(E, 2, base_size=1, seed=0, p_trivial=1.0)
    fib = pair.model.fibers[0]
    assert fib.case == 4
    assert pair.kernel_size == 4


# -- command line ---------------------------------------------------------------------


def test_cli_examples(capsys):
    assert cli.main(["orbvol", "--d", "2", "--weights", "1,1", "--q", "5", "--k", "8"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["outputs"]["total_volume_text"] == "6/5"
    assert cli.main(["orbvol", "--d", "2", "--weights", "1,a", "--q", "5"]) == 2
    capsys.readouterr()
    assert cli.main(["suite", "--filter", "euler"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [c["name"] for c in doc["checks"]] == ["euler"]
