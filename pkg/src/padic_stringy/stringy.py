"""Stringy point counts and E-polynomials of abelian quotient stacks [A^n/Gamma].

The inertia stack of [A^n/Gamma] is the disjoint union over gamma of
[(A^n)^gamma/Gamma]; each fixed locus is a coordinate subspace, so there is
one stratum per group element. Gerbes enter only through their
transgression: a character kappa_gamma of Gamma on every sector.

Counts are groupoid counts. For a twisted row the Frobenius trace is the
character-weighted average of the twisted fixed-locus counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ModelTooLarge
from .exact import Cyclo, QExp
from .galois import Character, FinAbGroup, LinearModel, burnside_check, twist_pointcount
from .orbifold import as_model, shifts


class EPoly:
    """sum c * x^u y^v with rational exponents u, v."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean: dict[tuple[Fraction, Fraction], Fraction] = {}
        for (u, v), c in (terms or {}).items():
            key = (Fraction(u), Fraction(v))
            clean[key] = clean.get(key, Fraction(0)) + Fraction(c)
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def xy_power(cls, a, coeff=1) -> "EPoly":
        return cls({(a, a): coeff})

    def __add__(self, other: "EPoly") -> "EPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return EPoly(out)

    def __mul__(self, other) -> "EPoly":
        if not isinstance(other, EPoly):
            return EPoly({k: c * Fraction(other) for k, c in self.terms.items()})
        out: dict = {}
        for (u1, v1), c1 in self.terms.items():
            for (u2, v2), c2 in other.terms.items():
                key = (u1 + u2, v1 + v2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return EPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, EPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def specialize(self) -> QExp:
        """x^u y^v -> q^((u+v)/2), so xy -> q."""
        return QExp({(u + v) / 2: c for (u, v), c in self.terms.items()})

    def to_terms(self) -> list[dict[str, str]]:
        return [
            {"x": str(u), "y": str(v), "coefficient": str(c)}
            for (u, v), c in sorted(self.terms.items())
        ]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (u, v), c in sorted(self.terms.items(), reverse=True):
            mono = f"(xy)^({u})" if u == v else f"x^({u})y^({v})"
            if u == v == 0:
                mono = "1"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


@dataclass(frozen=True)
class GerbeData:
    """Transgressed gerbe: a character kappa_gamma of Gamma for every gamma."""

    group: FinAbGroup
    kappa: Mapping[tuple[int, ...], Character]
    order: int

    def __post_init__(self):
        zero = self.group.zero
        for g in self.group.elements():
            if g not in self.kappa:
                raise ValueError(f"no character for sector {g}")
        if not self.kappa[zero].is_trivial():
            raise ValueError("the identity sector must carry the trivial character")
        for chi in self.kappa.values():
            if self.order % chi.order:
                raise ValueError(f"character order {chi.order} does not divide r = {self.order}")

    @classmethod
    def trivial(cls, group: FinAbGroup) -> "GerbeData":
        return cls(group, {g: Character(group, group.zero) for g in group.elements()}, 1)

    @classmethod
    def from_bilinear(cls, group: FinAbGroup, matrix: Sequence[Sequence[int]]) -> "GerbeData":
        """kappa_gamma(tau) = sum_ij gamma_i B_ij tau_j / exponent.

        Bilinear data is compatible with every reindexing of the sectors.
        """
        N = group.exponent
        kappa = {}
        for g in group.elements():
            exps = []
            for j, dj in enumerate(group.factors):
                val = Fraction(sum(g[i] * matrix[i][j] for i in range(group.rank)) * dj, N)
                if val.denominator != 1:
                    raise ValueError(f"form value on factor Z/{dj} is not a character")
                exps.append(int(val) % dj)
            kappa[g] = Character(group, tuple(exps))
        order = math.lcm(1, *(c.order for c in kappa.values()))
        return cls(group, kappa, order)

    @classmethod
    def from_table(cls, group: FinAbGroup, table: Mapping) -> "GerbeData":
        kappa = {g: Character(group, group.zero) for g in group.elements()}
        for g, exps in table.items():
            kappa[group.normalize(g)] = Character(group, tuple(exps))
        order = math.lcm(1, *(c.order for c in kappa.values()))
        return cls(group, kappa, order)


@dataclass(frozen=True)
class StrataRow:
    gamma: tuple[int, ...]
    component: tuple[int, ...]  # fixed coordinates
    F: Fraction
    count: QExp
    epoly: EPoly
    kappa: Character | None = None
    burnside_verified: bool | None = None


@dataclass(frozen=True)
class StrataTable:
    model: LinearModel
    rows: tuple[StrataRow, ...]
    xi_exponent: int = 1

    @property
    def q(self) -> int:
        return self.model.q

    def row(self, gamma) -> StrataRow:
        gamma = self.model.group.normalize(gamma)
        return next(r for r in self.rows if r.gamma == gamma)


def strata_from_action(action, xi_exponent: int = 1, verify: bool = True) -> StrataTable:
    """One row per group element; counts q^dim, checked by Burnside at q when in scale."""
    model = as_model(action)
    rows = []
    for rec in shifts(model, xi_exponent):
        fixed = tuple(model.fixed_coordinates(rec.element))
        verified = None
        if verify:
            try:
                left, right = burnside_check(model.restrict(fixed), 1)
                verified = left == right == model.q ** len(fixed)
            except ModelTooLarge:
                verified = None
        rows.append(
            StrataRow(
                rec.element, fixed, rec.F, QExp.monomial(len(fixed)), EPoly.xy_power(len(fixed)),
                None, verified,
            )
        )
    return StrataTable(model, tuple(rows), xi_exponent)


def attach_gerbe(table: StrataTable, gerbe: GerbeData) -> StrataTable:
    if gerbe.group != table.model.group:
        raise ValueError("gerbe data for a different group")
    rows = tuple(replace(r, kappa=gerbe.kappa[r.gamma]) for r in table.rows)
    return replace(table, rows=rows)


def _kappa_for(row: StrataRow, gerbe: GerbeData | None) -> Character | None:
    if gerbe is not None:
        return gerbe.kappa[row.gamma]
    return row.kappa


def twisted_row_factor(table: StrataTable, row: StrataRow, kappa: Character) -> Fraction:
    """(1/|Gamma|) sum_tau kappa(tau) #(fixed locus)_tau(F_q), divided by q^dim.

    The sum is taken in Q(zeta) and must come out rational.
    """
    model = table.model
    g = model.group
    sub = model.restrict(row.component)
    total = Cyclo.rational(0)
    for tau in g.elements():
        total = total + Cyclo.root(kappa(tau)) * twist_pointcount(sub, tau, 1)
    total = total / g.order
    if not total.is_rational():
        raise ArithmeticError(f"character sum {total} is not rational")
    return total.as_fraction() / model.q ** len(row.component)


def stringy_count(table: StrataTable, gerbe: GerbeData | None = None) -> QExp:
    total = QExp()
    for row in table.rows:
        kappa = _kappa_for(row, gerbe)
        weight = row.count.shift(row.F)
        if kappa is not None and not kappa.is_trivial():
            weight = weight * twisted_row_factor(table, row, kappa)
        total = total + weight
    return total


def stringy_epoly(table: StrataTable, gerbe: GerbeData | None = None) -> EPoly:
    total = EPoly()
    for row in table.rows:
        kappa = _kappa_for(row, gerbe)
        term = row.epoly * EPoly.xy_power(row.F)
        if kappa is not None and not kappa.is_trivial():
            term = term * _isotypic_factor(table.model.group, kappa)
        total = total + term
    return total


def _isotypic_factor(group: FinAbGroup, kappa: Character) -> Fraction:
    """Average of kappa over the unramified twist sectors: 1 if trivial, else 0."""
    s = Cyclo.rational(0)
    for tau in group.elements():
        s = s + Cyclo.root(kappa(tau))
    return (s / group.order).as_fraction()


def xi_reindex(table: StrataTable, c: int) -> StrataTable:
    """Recompute the table with xi replaced by xi^c.

    The shift formerly attached to gamma now sits on gamma^c. Gerbe
    characters are intrinsic to their sector and stay with their element.
    """
    g = table.model.group
    if math.gcd(c, g.order) != 1:
        raise ValueError(f"c = {c} is not coprime to |Gamma| = {g.order}")
    new = strata_from_action(table.model, table.xi_exponent * c % max(g.exponent, 1) or 1, verify=False)
    kappas = {r.gamma: r.kappa for r in table.rows}
    verified = {r.gamma: r.burnside_verified for r in table.rows}
    rows = tuple(replace(r, kappa=kappas[r.gamma], burnside_verified=verified[r.gamma]) for r in new.rows)
    return replace(new, rows=rows)


def sector_breakdown(table: StrataTable, gerbe: GerbeData | None = None) -> list[dict]:
    out = []
    for row in table.rows:
        kappa = _kappa_for(row, gerbe)
        factor = Fraction(1)
        if kappa is not None and not kappa.is_trivial():
            factor = twisted_row_factor(table, row, kappa)
        out.append({
            "gamma": list(row.gamma),
            "fixed_coordinates": list(row.component),
            "F": str(row.F),
            "count_terms": row.count.to_terms(),
            "kappa": None if kappa is None else list(kappa.exps),
            "twist_factor": str(factor),
            "burnside_verified": row.burnside_verified,
        })
    return out
