"""The verification battery: nine exact criteria, run in a fixed order."""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from sympy import isprime

from .duality import curve_battery
from .errors import SingularReduction
from .galois import (
    FinAbGroup,
    LinearModel,
    PointSetModel,
    base_change_twist_count,
    burnside_check,
    h1_enumerate,
    h1_pairing,
    stable_orbit_count,
    toy_models,
    twist_pointcount,
    twist_pointcount_cycles,
)
from .mirrorsim import (
    abelian_groups,
    exhaustive_fibers,
    fiber_integrals,
    global_identity,
    random_dual_pair,
)
from .orbifold import (
    PolySystem,
    as_model,
    builtin_actions,
    builtin_weil_models,
    closed_form_1d,
    default_precision,
    orb_fiber_volume_1d,
    orb_total_volume,
    weil_volume,
)
from .stringy import EPoly, GerbeData, attach_gerbe, strata_from_action, stringy_count, stringy_epoly, xi_reindex


@dataclass
class CriterionResult:
    key: str
    title: str
    anchor: str
    passed: bool
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.key}: {self.title} ({self.checks} checks)"


class _Tally:
    def __init__(self):
        self.checks = 0
        self.failures: list[str] = []

    def expect(self, ok: bool, what: str):
        self.checks += 1
        if not ok:
            self.failures.append(what)


# 1 -------------------------------------------------------------------------------

WEIL_FIELDS = (3, 5, 7)


def criterion_weil(seed: int = 0) -> CriterionResult:
    t = _Tally()
    rows = []
    for q in WEIL_FIELDS:
        for name, system in builtin_weil_models().items():
            rep = weil_volume(system, q, 3)
            t.expect(rep.passed, f"{name} over F_{q}: {rep.volumes} vs {rep.closed_form}")
            rows.append({"model": name, "q": q, "level_counts": list(rep.level_counts),
                         "volume": str(rep.closed_form)})
    try:
        weil_volume(PolySystem.parse(["y^2 - x^3"], ["x", "y"]), 5, 2)
        t.expect(False, "cuspidal cubic accepted")
    except SingularReduction:
        t.expect(True, "")
    return CriterionResult(
        "weil", "Weil volume: #X(O/t^k)/q^(k dim) = #X(F_q)/q^dim for k = 1, 2, 3",
        "vol(X(O_F)) = #X(F_q)/q^{dim X}", not t.failures, t.checks, t.failures, {"models": rows},
    )


# 2 -------------------------------------------------------------------------------

def fiber_volume_cases():
    for d in (2, 3, 4):
        for q in (5, 7, 13):
            if (q - 1) % d:
                continue
            for e in range(1, d + 1):
                yield d, e, q


def criterion_fiber_volume(seed: int = 0) -> CriterionResult:
    t = _Tally()
    rows = []
    for d, e, q in fiber_volume_cases():
        k = default_precision(d, e)
        value = orb_fiber_volume_1d(d, e, q, k)
        closed = closed_form_1d(d, e).at(q)
        t.expect(value == closed, f"d={d} e={e} q={q}: {value} != {closed}")
        rows.append({"d": d, "e": e, "q": q, "k": k, "value": value.to_terms()})
    return CriterionResult(
        "fiber-volume", "Orbifold fibre volume (1/d) q^(-e/d) at finite level",
        "(1/d) q^{-e/d}; mu_orb(e^{-1}(x)) = q^{-w_x(gamma)}/|Aut(x)|",
        not t.failures, t.checks, t.failures, {"cases": rows},
    )


# 3 -------------------------------------------------------------------------------

def criterion_volume_bridge(seed: int = 0) -> CriterionResult:
    t = _Tally()
    rows = []
    for name, action in builtin_actions().items():
        model = as_model(action)
        count = stringy_count(strata_from_action(model, verify=False))
        vol = orb_total_volume(model)
        t.expect(vol * model.q**model.n == count.at(model.q), f"{name}: {vol} * q^n != {count}")
        rows.append({"model": name, "stringy_count": count.to_terms(), "volume": vol.to_terms()})
    return CriterionResult(
        "volume-bridge", "Orbifold volume times q^n equals the stringy point count",
        "vol((X/Gamma)(O_F)) = #_st[X/Gamma](F_q)/q^{dim X}",
        not t.failures, t.checks, t.failures, {"models": rows},
    )


# 4 -------------------------------------------------------------------------------

def _gerbes_for(group: FinAbGroup):
    """The trivial gerbe and every diagonal bilinear form on the group."""
    yield GerbeData.trivial(group)
    r = group.rank
    for diag in itertools.product(*(range(d) for d in group.factors)):
        if not any(diag):
            continue
        N = group.exponent
        matrix = [[(diag[i] * N // group.factors[i]) if i == j else 0 for j in range(r)] for i in range(r)]
        yield GerbeData.from_bilinear(group, matrix)


def criterion_stringy(seed: int = 0) -> CriterionResult:
    t = _Tally()
    a1 = strata_from_action(builtin_actions()["A2/Z2 (1,1) q=5"])
    e = stringy_epoly(a1)
    t.expect(e == EPoly({(2, 2): 1, (1, 1): 1}), f"E_st(A2/mu2) = {e}")
    t.expect(e.specialize() == stringy_count(a1), "xy -> q specialisation of E_st(A2/mu2)")
    models = 0
    for name, action in builtin_actions().items():
        model = as_model(action)
        g = model.group
        if g.order > 6:
            continue
        models += 1
        table = strata_from_action(model, verify=False)
        t.expect(stringy_epoly(table).specialize() == stringy_count(table), f"{name}: specialisation")
        for gerbe in _gerbes_for(g):
            twisted = attach_gerbe(table, gerbe)
            base_count, base_e = stringy_count(twisted), stringy_epoly(twisted)
            t.expect(base_e.specialize() == base_count, f"{name}: twisted specialisation")
            for c in range(1, max(g.order, 1) + 1):
                if math.gcd(c, g.order) != 1:
                    continue
                moved = xi_reindex(twisted, c)
                t.expect(stringy_count(moved) == base_count, f"{name} c={c}: count not invariant")
                t.expect(stringy_epoly(moved) == base_e, f"{name} c={c}: E-polynomial not invariant")
    return CriterionResult(
        "stringy", "Stringy E-polynomial of A2/mu2, specialisation and xi-invariance",
        "E_st(Xc) = sum_gamma sum_Y E([Y/C(gamma)])(xy)^{F(gamma,Y)}; independent of xi",
        not t.failures, t.checks, t.failures, {"models": models},
    )


# 5 -------------------------------------------------------------------------------

def criterion_twisting(seed: int = 0, max_m: int = 4) -> CriterionResult:
    t = _Tally()
    methods = {}
    for name, action in toy_models().items():
        g = action.group
        for m in range(1, max_m + 1):
            left, right = burnside_check(action, m)
            methods[f"{name} m={m}"] = stable_orbit_count(action, m)[1]
            t.expect(left == right, f"{name} m={m}: Burnside {left} != {right}")
            for tau in g.elements():
                it = twist_pointcount(action, tau, m)
                direct = base_change_twist_count(action, g.scale(m, tau), m)
                t.expect(it == direct, f"{name} tau={tau} m={m}: iterate {it} != direct {direct}")
                if isinstance(action, PointSetModel):
                    cyc = twist_pointcount_cycles(action, tau, m)
                    t.expect(it == cyc, f"{name} tau={tau} m={m}: cycles {cyc}")
                else:
                    t.expect(it == action.q ** (m * action.n), f"{name} tau={tau} m={m}: {it} != q^(mn)")
    return CriterionResult(
        "twisting", "Burnside over twists and twisted zeta consistency, m <= 4",
        "F_{U_T} = (gamma^*)^{-1} F_U; 1/|Gamma| sum_T |M_T(k)|",
        not t.failures, t.checks, t.failures, {"orbit_count_method": methods},
    )


# 6, 7 ---------------------------------------------------------------------------

DUALITY_FIELDS = (5, 7, 13)


def _battery(seed: int):
    for q in DUALITY_FIELDS:
        for n in (2, 3, 4):
            if math.gcd(n, q) != 1:
                continue
            entries, skipped = curve_battery(q, n, 20, seed)
            yield q, n, entries, skipped


def criterion_euler(seed: int = 0) -> CriterionResult:
    t = _Tally()
    summary = []
    for q, n, entries, skipped in _battery(seed):
        t.expect(len(entries) >= 20, f"F_{q}, n={n}: only {len(entries)} curves in scale")
        for e in entries:
            tm = e.torsion
            t.expect(tm.det_ok and tm.trace_ok, f"{e.curve} n={n}: det/trace congruence")
            t.expect(e.euler.passed, f"{e.curve} n={n}: |H1| = {e.euler.h1} vs "
                     f"{e.euler.invariants}*{e.euler.dual_invariants}")
        summary.append({"q": q, "n": n, "curves": len(entries), "skipped_out_of_scale": skipped})
    return CriterionResult(
        "euler", "Local Euler characteristic |H1(F,M)| = |M(F)||M^v(F)| on E[n]",
        "|H^1_et(F,M)| = |M(F)| |M^v(F)|", not t.failures, t.checks, t.failures, {"battery": summary},
    )


def criterion_selfdual(seed: int = 0) -> CriterionResult:
    t = _Tally()
    summary = []
    for q, n, entries, _ in _battery(seed):
        for e in entries:
            s = e.selfdual
            t.expect(s.passed, f"{e.curve} n={n}: {s.cokernel} != {s.kernel}")
        summary.append({"q": q, "n": n, "curves": len(entries)})
    return CriterionResult(
        "selfdual", "Self-dual isogeny [n]: |E(F)/nE(F)| = |E[n](F)|",
        "|B(F)/phi(A(F))| = |ker(phi)(F)|", not t.failures, t.checks, t.failures, {"battery": summary},
    )


# 8 -------------------------------------------------------------------------------

def criterion_mirror(seed: int = 0) -> CriterionResult:
    t = _Tally()
    fibers = 0
    for order in range(1, 65):
        for group in abelian_groups(order):
            for fib in exhaustive_fibers(group):
                I1, I2 = fiber_integrals(fib)
                fibers += 1
                t.expect(I1 == I2, f"{group} case {fib.case}: {I1} != {I2}")
                if fib.case in (2, 3):
                    t.expect(I1 == 0 and I2 == 0, f"{group} case {fib.case}: nonzero integral")
    models = []
    for s in range(seed, seed + 5):
        rep = global_identity(random_dual_pair(100, s))
        t.expect(rep.passed, f"random model seed {s}: {rep.total1} != {rep.total2}")
        for case, I1, I2 in rep.per_fiber:
            if case in (2, 3):
                t.expect(I1 == I2 == 0, f"random model seed {s}: case {case} nonzero")
        models.append({"seed": s, "total": str(rep.total1)})
    return CriterionResult(
        "mirror", "Fibrewise and global mirror identity in the finite model",
        "an equality of integrals; int_{M1} f_{G1} dmu_orb = int_{M2} f_{G2} dmu_orb",
        not t.failures, t.checks, t.failures, {"exhaustive_fibers": fibers, "random_models": models},
    )


# 9 -------------------------------------------------------------------------------

def admissible_q(group: FinAbGroup) -> int:
    """Least prime q with exponent | q-1 and q not dividing |Gamma|."""
    q = 2
    while True:
        if isprime(q) and (q - 1) % group.exponent == 0 and group.order % q:
            return q
        q += 1


def criterion_pairing(seed: int = 0) -> CriterionResult:
    t = _Tally()
    groups = []
    for order in range(1, 9):
        for group in abelian_groups(order):
            q = admissible_q(group)
            classes = h1_enumerate(group, q)
            table = {(a, b): h1_pairing(a, b) for a in classes for b in classes}
            for a in classes:
                t.expect(table[a, a] == 0, f"{group}: <a,a> != 0")
                for b in classes:
                    t.expect((table[a, b] + table[b, a]) % 1 == 0, f"{group}: not skew")
                    if a.is_unramified() and b.is_unramified():
                        t.expect(table[a, b] == 0, f"{group}: unramified classes pair nontrivially")
                    s = a + b
                    additive = all(table[s, c] == (table[a, c] + table[b, c]) % 1 for c in classes)
                    t.expect(additive, f"{group}: not additive in the first slot at {a}, {b}")
                if not a.is_trivial():
                    t.expect(any(table[a, b] for b in classes), f"{group}: {a} in the kernel")
            groups.append({"group": str(group), "q": q})
    return CriterionResult(
        "pairing", "Pairing on H1(F,Gamma): skew, bi-additive, perfect, unramified isotropic",
        "<xf, yg> = f(y) g(x)^{-1}", not t.failures, t.checks, t.failures, {"groups": groups},
    )


CRITERIA: dict[str, Callable[[int], CriterionResult]] = {
    "weil": criterion_weil,
    "fiber-volume": criterion_fiber_volume,
    "volume-bridge": criterion_volume_bridge,
    "stringy": criterion_stringy,
    "twisting": criterion_twisting,
    "euler": criterion_euler,
    "selfdual": criterion_selfdual,
    "mirror": criterion_mirror,
    "pairing": criterion_pairing,
}


def worker_count() -> int:
    raw = os.environ.get("PADIC_STRINGY_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PADIC_STRINGY_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError("PADIC_STRINGY_THREADS must be >= 1")
    return n


def run_suite(filter: str | None = None, seed: int = 0) -> list[CriterionResult]:
    keys = [k for k in CRITERIA if filter is None or filter in k]
    if not keys:
        raise ValueError(f"no criterion matches {filter!r}")

    def timed(key: str) -> CriterionResult:
        start = time.perf_counter()
        res = CRITERIA[key](seed)
        res.seconds = time.perf_counter() - start
        return res

    workers = worker_count()
    if workers == 1:
        return [timed(k) for k in keys]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(timed, keys))
