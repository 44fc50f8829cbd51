"""Command-line driver: one JSON report per run, exit 0/1/2 for pass/fail/bad input."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from typing import Any, Callable

from .duality import EllipticCurveModel, check_euler, check_selfdual, ec_count, ec_group, ec_torsion_module_report, h1_size
from .errors import ArtifactError
from .exact import QExp, QValue
from .galois import (
    FinAbGroup,
    LinearModel,
    PointSetModel,
    base_change_twist_count,
    burnside_check,
    TorsorClass,
    stable_orbit_count,
    toy_models,
    twist_pointcount,
    twist_pointcount_cycles,
)
from .mirrorsim import global_identity, make_model_from_curve, random_dual_pair
from .orbifold import (
    FiberTarget,
    LinearCyclicAction,
    PolySystem,
    as_model,
    builtin_weil_models,
    orb_fiber_volume,
    orb_fiber_volume_closed,
    orb_sector_volumes,
    orb_total_volume,
    shifts,
    weil_volume,
)
from .stringy import GerbeData, attach_gerbe, sector_breakdown, strata_from_action, stringy_count, stringy_epoly, xi_reindex
from .suite import run_suite

REPORT_VERSION = 1
CONFIG_VERSION = 1


class InputError(ValueError):
    pass


# -- parameter schemas ------------------------------------------------------------------

def _int(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        if isinstance(x, str) and x.strip().lstrip("-").isdigit():
            return int(x)
        raise InputError(f"expected an integer, got {x!r}")
    return x


def _int_list(x) -> list[int]:
    if isinstance(x, str):
        parts = [p for p in x.replace(" ", "").split(",") if p != ""]
        if not parts:
            raise InputError(f"expected a comma-separated integer list, got {x!r}")
        return [_int(p) for p in parts]
    if isinstance(x, list):
        return [_int(p) for p in x]
    raise InputError(f"expected an integer list, got {x!r}")


def _int_matrix(x) -> list[list[int]]:
    """'1,0;0,1' or [[1,0],[0,1]]."""
    if isinstance(x, str):
        return [_int_list(row) for row in x.split(";")]
    if isinstance(x, list):
        return [_int_list(row) for row in x]
    raise InputError(f"expected a matrix, got {x!r}")


def _str(x) -> str:
    if not isinstance(x, str):
        raise InputError(f"expected a string, got {x!r}")
    return x


def _str_list(x) -> list[str]:
    if isinstance(x, str):
        return [x]
    if isinstance(x, list) and all(isinstance(s, str) for s in x):
        return list(x)
    raise InputError(f"expected a list of strings, got {x!r}")


def _gerbe_table(x) -> dict[str, list[int]]:
    """'1:1' or '1,0:0,1;0,1:1,0' or {"1": [1]}; identity sector omitted."""
    if isinstance(x, str):
        out = {}
        for entry in x.split(";"):
            if ":" not in entry:
                raise InputError(f"gerbe entry {entry!r} is not of the form gamma:kappa")
            g, k = entry.split(":", 1)
            out[",".join(str(v) for v in _int_list(g))] = _int_list(k)
        return out
    if isinstance(x, dict):
        return {",".join(str(v) for v in _int_list(k)): _int_list(v) for k, v in x.items()}
    raise InputError(f"expected a gerbe table, got {x!r}")


ACTION_KEYS = {"d": _int, "weights": _int_list, "q": _int, "group": _str, "chars": _int_matrix}

# local fields are F_q((t)); the tag leaves room for a mixed-characteristic backend
FIELD_TYPE = "equal-characteristic"

SCHEMAS: dict[str, dict[str, Callable[[Any], Any]]] = {
    "orbvol": {**ACTION_KEYS, "k": _int},
    "stringy": {**ACTION_KEYS, "gerbe": _gerbe_table, "xi": _int},
    "weil": {"polys": _str_list, "vars": _str_list, "model": _str, "q": _int, "k": _int},
    "twist-count": {**ACTION_KEYS, "model": _str, "tau": _int_list, "m": _int},
    "euler": {"q": _int, "curve": _int_list, "n": _int, "seed": _int},
    "selfdual": {"q": _int, "curve": _int_list, "n": _int},
    "mirror-sim": {"q": _int, "curve": _int_list, "n": _int, "base_size": _int, "seed": _int,
                   "fibers": _int, "max_order": _int},
    "suite": {"filter": _str, "seed": _int},
}


def validate_config(config: Any) -> dict:
    if not isinstance(config, dict):
        raise InputError("config must be a JSON object")
    unknown = set(config) - {"version", "command", "parameters"}
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    if config.get("version") != CONFIG_VERSION:
        raise InputError(f"config version must be {CONFIG_VERSION}")
    command = config.get("command")
    if command not in SCHEMAS:
        raise InputError(f"unknown command {command!r}")
    params = config.get("parameters", {})
    if not isinstance(params, dict):
        raise InputError("parameters must be an object")
    schema = SCHEMAS[command]
    unknown = set(params) - set(schema)
    if unknown:
        raise InputError(f"unknown parameters for {command}: {sorted(unknown)}")
    clean = {k: schema[k](v) for k, v in params.items() if v is not None}
    return {"version": CONFIG_VERSION, "command": command, "parameters": clean}


# -- serialisation -------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (QValue, QExp)):
        return x.to_terms()
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, float):
        raise TypeError("floats are not serialised")
    return str(x)


class Report:
    def __init__(self, config: dict):
        self.config = config
        self.outputs: dict = {}
        self.checks: list[dict] = []
        self.precision: Any = None
        self.timing: dict | None = None

    def check(self, name: str, anchor: str, ok: bool, **detail):
        entry = {"name": name, "paper_anchor": anchor, "pass": bool(ok)}
        if detail:
            entry["detail"] = jsonable(detail)
        self.checks.append(entry)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "report_version": REPORT_VERSION,
            "command": self.config["command"],
            "inputs": self.config,
            "field_type": FIELD_TYPE,
            "outputs": jsonable(self.outputs),
            "checks": self.checks,
            "precision_used": jsonable(self.precision),
            "passed": self.passed,
        }
        if self.timing is not None:
            out["timing"] = self.timing
        return out


# -- actions ---------------------------------------------------------------------------------

def _action(params: dict):
    if "q" not in params:
        raise InputError("an action needs q")
    q = params["q"]
    if "group" in params:
        if "d" in params or "weights" in params:
            raise InputError("give either d/weights or group/chars, not both")
        group = FinAbGroup.parse(params["group"])
        chars = params.get("chars")
        if not chars:
            raise InputError("group actions need chars (one character per coordinate)")
        return LinearModel(group, tuple(tuple(c) for c in chars), q)
    if "d" not in params or "weights" not in params:
        raise InputError("an action needs d and weights (or group and chars)")
    return LinearCyclicAction(params["d"], tuple(params["weights"]), q)


def _cmd_orbvol(p: dict, rep: Report):
    action = _action(p)
    model = as_model(action)
    k = p.get("k")
    rep.precision = {"k": k if k is not None else "e + 2d per block", "recheck": "k + 1"}
    sectors = orb_sector_volumes(model, k)
    table = strata_from_action(model, verify=False)
    count = stringy_count(table)
    total = orb_total_volume(model, k)
    rows = []
    g = model.group
    for rec in shifts(model):
        vol = sectors[rec.element]
        inv = g.neg(rec.element)
        dual = table.row(inv)
        expected = QExp.monomial(dual.F + len(dual.component) - model.n).at(model.q)
        origin = FiberTarget(TorsorClass(g, g.zero, rec.element, model.q), ())
        fib = orb_fiber_volume(model, origin, k)
        fib_closed = orb_fiber_volume_closed(model, origin)
        rows.append({"gamma": list(rec.element), "F": rec.F, "w": rec.w, "fixed_dim": rec.fixed_dim,
                     "sector_volume": vol, "origin_fiber_volume": fib, "origin_fiber_closed_form": fib_closed})
        rep.check(f"sector {list(rec.element)} volume = q^(F(gamma^-1) + dim - n)",
                  "mu_orb(e^{-1}(x)) = q^{-w_x(gamma)}/|Aut(x)|", vol == expected)
        rep.check(f"origin fibre over sector {list(rec.element)} = q^(-w)/|Aut|",
                  "mu_orb(e^{-1}(x)) = q^{-w_x(gamma)}/|Aut(x)|", fib == fib_closed)
    rep.outputs = {"total_volume": total, "total_volume_text": repr(total), "sectors": rows,
                   "stringy_count": count}
    rep.check("total volume * q^n = stringy count",
              "vol((X/Gamma)(O_F)) = #_st[X/Gamma](F_q)/q^{dim X}",
              total * model.q**model.n == count.at(model.q))


def _gerbe(params: dict, group: FinAbGroup) -> GerbeData | None:
    table = params.get("gerbe")
    if not table:
        return None
    return GerbeData.from_table(group, {tuple(int(v) for v in k.split(",")): tuple(v) for k, v in table.items()})


def _cmd_stringy(p: dict, rep: Report):
    action = _action(p)
    model = as_model(action)
    xi = p.get("xi", 1)
    table = strata_from_action(model, xi)
    gerbe = _gerbe(p, model.group)
    if gerbe is not None:
        table = attach_gerbe(table, gerbe)
    count = stringy_count(table)
    epoly = stringy_epoly(table)
    order = model.group.order
    invariant = True
    for c in range(1, max(order, 1) + 1):
        if math.gcd(c, order) == 1:
            moved = xi_reindex(table, c)
            invariant &= stringy_count(moved) == count and stringy_epoly(moved) == epoly
    rep.outputs = {
        "count_terms": count.to_terms(),
        "count_at_q": count.at(model.q),
        "epoly_terms": epoly.to_terms(),
        "sector_breakdown": sector_breakdown(table),
        "xi_invariance_checked": invariant,
    }
    rep.check("E_st under xy -> q equals the stringy count",
              "E_st(Xc) = sum_gamma sum_Y E([Y/C(gamma)])(xy)^{F(gamma,Y)}", epoly.specialize() == count)
    rep.check("independent of the choice of xi", "These stringy invariants are however independent of it",
              invariant)
    verified = [r.burnside_verified for r in table.rows]
    rep.check("fixed-locus counts q^dim confirmed by Burnside where in scale",
              "1/|Gamma| sum_{T in H^1(k,Gamma)} |M_T(k)|", all(v is not False for v in verified),
              rows_verified=sum(1 for v in verified if v), rows_out_of_scale=sum(1 for v in verified if v is None))
    if gerbe is None:
        total = orb_total_volume(model)
        rep.check("stringy count / q^n = orbifold volume",
                  "vol((X/Gamma)(O_F)) = #_st[X/Gamma](F_q)/q^{dim X}",
                  total * model.q**model.n == count.at(model.q))


def _cmd_weil(p: dict, rep: Report):
    if "q" not in p:
        raise InputError("weil needs q")
    if "model" in p:
        models = builtin_weil_models()
        if p["model"] not in models:
            raise InputError(f"unknown model {p['model']!r}; choose from {sorted(models)}")
        system = models[p["model"]]
    elif "polys" in p:
        system = PolySystem.parse(p["polys"], p.get("vars"))
    else:
        raise InputError("weil needs polys or model")
    k = p.get("k", 3)
    if k < 1:
        raise InputError("k must be >= 1")
    res = weil_volume(system, p["q"], k)
    rep.precision = {"k": k}
    rep.outputs = {"variables": list(system.names), "dim": res.dim, "points_mod_t": res.point_count,
                   "level_counts": list(res.level_counts), "volumes": list(res.volumes),
                   "closed_form": res.closed_form}
    rep.check("#X(O/t^j)/q^(j dim) constant in j and equal to #X(F_q)/q^dim",
              "vol(X(O_F)) = #X(F_q)/q^{dim X}", res.passed)


def _cmd_twist(p: dict, rep: Report):
    if "model" in p:
        models = toy_models()
        if p["model"] not in models:
            raise InputError(f"unknown model {p['model']!r}; choose from {sorted(models)}")
        action = models[p["model"]]
    else:
        action = as_model(_action(p))
    g = action.group
    m_max = p.get("m", 4)
    if m_max < 1:
        raise InputError("m must be >= 1")
    taus = [g.normalize(p["tau"])] if "tau" in p else list(g.elements())
    rows = []
    for m in range(1, m_max + 1):
        left, right = burnside_check(action, m)
        rep.check(f"Burnside at m={m}", "1/|Gamma| sum_{T in H^1(k,Gamma)} |M_T(k)|", left == right,
                  stable_orbits=left, twist_average=right, method=stable_orbit_count(action, m)[1])
        for tau in taus:
            it = twist_pointcount(action, tau, m)
            direct = base_change_twist_count(action, g.scale(m, tau), m)
            row = {"tau": list(tau), "m": m, "iterated": it, "direct": direct}
            ok = it == direct
            if isinstance(action, PointSetModel):
                row["cycles"] = twist_pointcount_cycles(action, tau, m)
                ok &= row["cycles"] == it
            else:
                row["closed_form"] = action.q ** (m * action.n)
                ok &= row["closed_form"] == it
            rows.append(row)
            rep.check(f"zeta consistency tau={list(tau)} m={m}", "F_{U_T} = (gamma^*)^{-1} F_U", ok)
    rep.outputs = {"counts": rows}


def _curve(p: dict) -> EllipticCurveModel:
    if "q" not in p or "curve" not in p:
        raise InputError("a curve needs q and curve = [a1,a2,a3,a4,a6]")
    if len(p["curve"]) != 5:
        raise InputError("curve must have five coefficients [a1,a2,a3,a4,a6]")
    return EllipticCurveModel.over(p["q"], p["curve"])


def _cmd_euler(p: dict, rep: Report):
    E = _curve(p)
    n = p.get("n", 2)
    tm = ec_torsion_module_report(E, n, p.get("seed", 0))
    eu = check_euler(tm.module)
    rep.outputs = {"curve": str(E), "count": ec_count(E), "trace": tm.trace, "n": n,
                   "torsion_field_degree": tm.degree, "sigma": [list(r) for r in tm.module.sigma],
                   "h1_size": eu.h1, "invariants": eu.invariants, "dual_invariants": eu.dual_invariants,
                   "dual_h1_size": h1_size(tm.module.dual()),
                   "assumption": "points over F_q((t)) replaced by residue-field points (good reduction, p does not divide n)"}
    rep.check("det(sigma) = q mod n", "|H^1_et(F,M)| = |M(F)| |M^v(F)|", tm.det_ok)
    rep.check("tr(sigma) = q + 1 - #E(F_q) mod n", "|H^1_et(F,M)| = |M(F)| |M^v(F)|", tm.trace_ok)
    rep.check("|H1| = |M(F)| |M^v(F)|", "|H^1_et(F,M)| = |M(F)| |M^v(F)|", eu.passed)
    rep.check("|H1(M)| = |H1(M^v)|", "canonical perfect pairing", eu.h1 == h1_size(tm.module.dual()))


def _cmd_selfdual(p: dict, rep: Report):
    E = _curve(p)
    n = p.get("n", 2)
    sd = check_selfdual(E, n)
    rep.outputs = {"curve": str(E), "group": list(ec_group(E)), "n": n,
                   "cokernel": sd.cokernel, "kernel": sd.kernel,
                   "assumption": "points over F_q((t)) replaced by residue-field points (good reduction, p does not divide n)"}
    rep.check("|E(F)/nE(F)| = |E[n](F)|", "|B(F)/phi(A(F))| = |ker(phi)(F)|", sd.passed)


def _cmd_mirror(p: dict, rep: Report):
    seed = p.get("seed", 42)
    if "curve" in p:
        built = make_model_from_curve(_curve(p), p.get("n", 2), p.get("base_size", 10), seed)
        model = built.model
        rep.outputs["kernel_size"] = built.kernel_size
        rep.outputs["t2_annihilates_kernel"] = list(built.annihilates_kernel)
        for fib in model.fibers:
            rep.check("|H|/|phi(G)| = |ker phi|", "|(P_2)_a(F)/phi(P_1)_a(F)| = |ker phi(F)|",
                      Fraction(fib.H.order, fib.image_size()) == fib.kernel_size())

    else:
        model = random_dual_pair(p.get("fibers", 100), seed, p.get("max_order", 64))
    res = global_identity(model)
    fibers = []
    for fib, (case, I1, I2) in zip(model.fibers, res.per_fiber):
        fibers.append({"G": str(fib.G), "H": str(fib.H), "case": case, "I1": I1, "I2": I2})
    rep.outputs.update({"fibers": fibers, "total_I1": res.total1, "total_I2": res.total2})
    rep.check("I1 = I2 on every fibre", "an equality of integrals",
              all(a == b for _, a, b in res.per_fiber))
    rep.check("case (2)/(3) integrals vanish", "an equality of integrals",
              all(a == b == 0 for c, a, b in res.per_fiber if c in (2, 3)))
    rep.check("global identity", "int_{M1} f_{G1} dmu_orb = int_{M2} f_{G2} dmu_orb", res.passed)


def _cmd_suite(p: dict, rep: Report):
    results = run_suite(p.get("filter"), p.get("seed", 0))
    rep.outputs = {"criteria": [
        {"key": r.key, "title": r.title, "checks": r.checks, "failures": r.failures[:20], "details": r.details}
        for r in results
    ]}
    for r in results:
        rep.check(r.key, r.anchor, r.passed, checks=r.checks)


COMMANDS = {
    "orbvol": _cmd_orbvol,
    "stringy": _cmd_stringy,
    "weil": _cmd_weil,
    "twist-count": _cmd_twist,
    "euler": _cmd_euler,
    "selfdual": _cmd_selfdual,
    "mirror-sim": _cmd_mirror,
    "suite": _cmd_suite,
}


def run(config: dict, timing: bool = False) -> tuple[Report, int]:
    """Validate and execute a config; exit code 0 pass, 1 failed check, 2 bad input."""
    config = validate_config(config)
    rep = Report(config)
    start = time.perf_counter()
    try:
        COMMANDS[config["command"]](config["parameters"], rep)
    except (InputError, ArtifactError, ValueError) as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from exc
    if timing:
        rep.timing = {"seconds": round(time.perf_counter() - start, 3)}
    return rep, 0 if rep.passed else 1


# -- argparse --------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS, help="include wall-clock timing")

    parser = argparse.ArgumentParser(prog="padic-stringy", parents=[common],
                                     description="Exact checks of p-adic integration identities on abelian quotient stacks.")
    parser.add_argument("--config", help="JSON run config {version, command, parameters}")
    sub = parser.add_subparsers(dest="command")

    def action_args(sp):
        sp.add_argument("--d", help="order of the cyclic group")
        sp.add_argument("--weights", help="comma-separated weights 1..d")
        sp.add_argument("--group", help="e.g. 'Z/2 x Z/2'")
        sp.add_argument("--chars", help="one character per coordinate, rows separated by ';'")
        sp.add_argument("--q", help="residue field size")

    sp = sub.add_parser("orbvol", parents=[common], help="orbifold volumes by sector")
    action_args(sp)
    sp.add_argument("--k", help="precision (default e + 2d per block)")

    sp = sub.add_parser("stringy", parents=[common], help="stringy point count and E-polynomial")
    action_args(sp)
    sp.add_argument("--gerbe", help="sector characters, e.g. '1:1' or '1,0:0,1;0,1:1,0'")
    sp.add_argument("--xi", help="exponent c of the chosen root of unity xi^c")

    sp = sub.add_parser("weil", parents=[common], help="Weil volume of a smooth affine model")
    sp.add_argument("--poly", dest="polys", action="append", help="polynomial (repeatable)")
    sp.add_argument("--vars", help="comma-separated variable order")
    sp.add_argument("--model", help="built-in model name")
    sp.add_argument("--q")
    sp.add_argument("--k")

    sp = sub.add_parser("twist-count", parents=[common], help="twisted point counts and Burnside")
    action_args(sp)
    sp.add_argument("--model", help="built-in toy model name")
    sp.add_argument("--tau", help="group element, comma-separated")
    sp.add_argument("--m", help="largest extension degree (default 4)")

    for name in ("euler", "selfdual"):
        sp = sub.add_parser(name, parents=[common], help=f"{name} check for E[n]")
        sp.add_argument("--q")
        sp.add_argument("--curve", help="a1,a2,a3,a4,a6")
        sp.add_argument("--n")
        if name == "euler":
            sp.add_argument("--seed")

    sp = sub.add_parser("mirror-sim", parents=[common], help="finite mirror-identity simulator")
    sp.add_argument("--q")
    sp.add_argument("--curve", help="a1,a2,a3,a4,a6 (omit for a random model)")
    sp.add_argument("--n")
    sp.add_argument("--base-size", dest="base_size")
    sp.add_argument("--fibers")
    sp.add_argument("--max-order", dest="max_order")
    sp.add_argument("--seed")

    sp = sub.add_parser("suite", parents=[common], help="run every acceptance criterion")
    sp.add_argument("--filter")
    sp.add_argument("--seed")
    return parser


def _config_from_args(args: argparse.Namespace) -> dict:
    skip = {"command", "config", "format", "timing"}
    params = {}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        if key == "vars":
            value = [v for v in value.split(",") if v]
        params[key] = value
    return {"version": CONFIG_VERSION, "command": args.command, "parameters": params}


def render_table(report: dict) -> str:
    lines = [f"{report['command']}: {'PASS' if report['passed'] else 'FAIL'}"]
    width = max((len(c["name"]) for c in report["checks"]), default=0)
    for c in report["checks"]:
        lines.append(f"  {'ok  ' if c['pass'] else 'FAIL'} {c['name']:<{width}}  [{c['paper_anchor']}]")
    for key, value in report["outputs"].items():
        if isinstance(value, (str, int, bool)):
            lines.append(f"  {key} = {value}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            if args.command:
                raise InputError("give either --config or a subcommand")
            with open(args.config) as fh:
                config = json.load(fh)
        elif args.command:
            config = _config_from_args(args)
        else:
            parser.print_usage(sys.stderr)
            return 2
        report, code = run(config, timing=getattr(args, "timing", False))
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stdout)
        return 2
    doc = report.to_dict()
    if getattr(args, "format", "json") == "table":
        print(render_table(doc))
    else:
        print(json.dumps(doc, indent=2, sort_keys=False))
    return code


if __name__ == "__main__":
    sys.exit(main())
