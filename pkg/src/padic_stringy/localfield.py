"""Equal-characteristic local field F = F_q((t)) at finite absolute precision.

A ``TruncatedLaurentSeries`` stores t^val * (c_0 + c_1 t + ...) with the
coefficients known for exponents val .. prec-1. The uniformiser is t, the
Teichmuller lift of a residue unit is its constant series.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import (
    DivisionByZeroToPrecision,
    NoRoot,
    PDividesN,
    PrecisionExhausted,
    ZeroElement,
)
from .ff import FFElement, FieldSpec, ff_make_field, field_of_size


@dataclass(frozen=True)
class LocalFieldSpec:
    residue: FieldSpec
    default_precision: int = 8

    def __post_init__(self):
        if self.default_precision < 1:
            raise ValueError("default_precision must be >= 1")

    @property
    def q(self) -> int:
        return self.residue.q

    @property
    def p(self) -> int:
        return self.residue.p

    # constructors -----------------------------------------------------------
    def series(self, coeffs: dict[int, int] | list[int], prec: int | None = None) -> "TruncatedLaurentSeries":
        """Series from {exponent: coefficient index} or a list starting at t^0."""
        prec = self.default_precision if prec is None else prec
        if isinstance(coeffs, dict):
            items = {e: c for e, c in coeffs.items() if e < prec}
        else:
            items = {e: c for e, c in enumerate(coeffs) if e < prec}
        items = {e: self.residue.element(c).index for e, c in items.items()}
        items = {e: c for e, c in items.items() if c}
        if not items:
            return self.zero(prec)
        lo = min(items)
        return TruncatedLaurentSeries(self, lo, tuple(items.get(e, 0) for e in range(lo, prec)), prec)

    def zero(self, prec: int | None = None) -> "TruncatedLaurentSeries":
        prec = self.default_precision if prec is None else prec
        return TruncatedLaurentSeries(self, prec, (), prec)

    def const(self, c, prec: int | None = None) -> "TruncatedLaurentSeries":
        return self.series({0: c}, prec)

    def uniformizer(self, prec: int | None = None) -> "TruncatedLaurentSeries":
        return self.series({1: 1}, prec)

    def parse(self, text: str) -> "TruncatedLaurentSeries":
        return parse_series(self, text)


def local_field(q: int, precision: int = 8) -> LocalFieldSpec:
    return LocalFieldSpec(field_of_size(q), precision)


@dataclass(frozen=True)
class TruncatedLaurentSeries:
    owner: LocalFieldSpec
    val: int
    coeffs: tuple[int, ...]  # residue-field indices for t^val .. t^(prec-1)
    prec: int

    def __post_init__(self):
        if self.coeffs and self.coeffs[0] == 0:
            raise ValueError("leading coefficient must be nonzero; use owner.series()")
        if len(self.coeffs) != max(0, self.prec - self.val):
            raise ValueError("coefficient window does not match val/prec")

    @property
    def field(self) -> FieldSpec:
        return self.owner.residue

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        return self.val

    def coefficient(self, e: int) -> int:
        if e >= self.prec:
            raise PrecisionExhausted(f"t^{e} is beyond precision {self.prec}")
        if e < self.val:
            return 0
        return self.coeffs[e - self.val]

    def leading(self) -> FFElement:
        if self.is_zero():
            raise ZeroElement("zero to precision has no leading coefficient")
        return self.field.element(self.coeffs[0])

    def as_dict(self) -> dict[int, int]:
        return {self.val + i: c for i, c in enumerate(self.coeffs) if c}

    def truncate(self, prec: int) -> "TruncatedLaurentSeries":
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} to {prec}")
        return self.owner.series(self.as_dict(), prec)

    def _check(self, other):
        if isinstance(other, int):
            return self.owner.const(other, self.prec)
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        if other.owner.residue != self.owner.residue:
            raise ValueError("series over different residue fields")
        return other

    # ring operations -----------------------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        f = self.field
        prec = min(self.prec, other.prec)
        out: dict[int, int] = {}
        for s in (self, other):
            for e, c in s.as_dict().items():
                if e < prec:
                    out[e] = f.add(out.get(e, 0), c)
        return self.owner.series(out, prec)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return self.owner.series({e: f.neg(c) for e, c in self.as_dict().items()}, self.prec)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        va, vb = self.val, other.val
        prec = min(self.prec + vb, other.prec + va)
        v = va + vb
        if prec <= v:
            raise PrecisionExhausted(f"product has no retained coefficients (val {v}, prec {prec})")
        f = self.field
        n = prec - v
        out = [0] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a:
                for j, b in enumerate(other.coeffs[: n - i]):
                    if b:
                        out[i + j] = f.add(out[i + j], f.mul(a, b))
        return self.owner.series({v + i: c for i, c in enumerate(out)}, prec)

    __rmul__ = __mul__

    def _unit_inverse(self, n: int) -> list[int]:
        """Inverse of the unit part c_0 + c_1 t + ... to n coefficients."""
        f = self.field
        c = self.coeffs
        inv0 = f.inv(c[0])
        out = [inv0]
        for k in range(1, n):
            acc = 0
            for i in range(1, min(k, len(c) - 1) + 1):
                acc = f.add(acc, f.mul(c[i], out[k - i]))
            out.append(f.neg(f.mul(acc, inv0)))
        return out

    def inverse(self) -> "TruncatedLaurentSeries":
        if self.is_zero():
            raise DivisionByZeroToPrecision("inverse of zero to precision")
        rel = self.prec - self.val
        inv = self._unit_inverse(rel)
        return self.owner.series({-self.val + i: c for i, c in enumerate(inv)}, -self.val + rel)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZeroToPrecision("divisor is zero to precision")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            rel = self.prec if self.is_zero() else self.prec - self.val
            return self.owner.const(1, rel)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        return (self.owner.residue, self.val, self.coeffs, self.prec) == (
            other.owner.residue, other.val, other.coeffs, other.prec)

    def __hash__(self):
        return hash((self.owner.residue, self.val, self.coeffs, self.prec))

    def __str__(self) -> str:
        return format_series(self)

    __repr__ = __str__


# -- literal format -------------------------------------------------------------

_TERM = re.compile(r"^(?:(\d+)\s*\*?\s*)?(?:t(?:\^(-?\d+))?)?$")


def format_series(x: TruncatedLaurentSeries) -> str:
    parts = []
    for e, c in sorted(x.as_dict().items()):
        if e == 0:
            parts.append(f"{c}")
        elif e == 1:
            parts.append(f"{c}*t")
        else:
            parts.append(f"{c}*t^{e}")
    parts.append(f"O(t^{x.prec})")
    return " + ".join(parts)


def parse_series(owner: LocalFieldSpec, text: str) -> TruncatedLaurentSeries:
    """Parse ``"2*t^3 + 1*t^4 + O(t^6)"``; coefficients are residue indices."""
    body = text.replace(" ", "")
    m = re.search(r"\+?O\(t(?:\^(-?\d+))?\)$", body)
    if m:
        prec = int(m.group(1)) if m.group(1) is not None else 1
        body = body[: m.start()]
    else:
        prec = owner.default_precision
    coeffs: dict[int, int] = {}
    if body:
        for raw in body.split("+"):
            if not raw:
                raise ValueError(f"malformed series literal: {text!r}")
            tm = _TERM.match(raw)
            if not tm or raw == "":
                raise ValueError(f"malformed term {raw!r} in {text!r}")
            c = int(tm.group(1)) if tm.group(1) is not None else 1
            if "t" in raw:
                e = int(tm.group(2)) if tm.group(2) is not None else 1
            else:
                e = 0
            if not 0 <= c < owner.q:
                raise ValueError(f"coefficient index {c} out of range for F_{owner.q}")
            if e in coeffs:
                coeffs[e] = owner.residue.add(coeffs[e], c)
            else:
                coeffs[e] = c
    return owner.series(coeffs, prec)


# -- units, roots, power classes ------------------------------------------------

@dataclass(frozen=True)
class UnitDecomposition:
    v: int
    teich: FFElement
    one_unit: TruncatedLaurentSeries

    def reassemble(self) -> TruncatedLaurentSeries:
        owner = self.one_unit.owner
        lead = owner.series({self.v: self.teich.index}, self.one_unit.prec + self.v)
        return lead * self.one_unit


def ls_arith(a: TruncatedLaurentSeries, b: TruncatedLaurentSeries, op: str) -> TruncatedLaurentSeries:
    ops = {"+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b, "/": lambda: a / b}
    ops["×"] = ops["*"]
    ops["÷"] = ops["/"]
    ops["−"] = ops["-"]
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    out = ops[op]()
    # a product or quotient with an empty window has lost everything; a difference may cancel
    if op in ("*", "×", "/", "÷") and out.is_zero():
        raise PrecisionExhausted(f"{op} leaves no coefficients below t^{out.prec}")
    return out


def ls_unit_decompose(x: TruncatedLaurentSeries) -> UnitDecomposition:
    if x.is_zero():
        raise ZeroElement("cannot decompose zero to precision")
    f = x.field
    inv = f.inv(x.coeffs[0])
    unit = tuple(f.mul(c, inv) for c in x.coeffs)
    one_unit = TruncatedLaurentSeries(x.owner, 0, unit, x.prec - x.val)
    return UnitDecomposition(x.val, x.leading(), one_unit)


def _check_tame(n: int, p: int):
    if n < 1:
        raise ValueError("n must be positive")
    if n % p == 0:
        raise PDividesN(f"p={p} divides n={n}")


def canonical_residue_root(field: FieldSpec, c: int, n: int) -> int:
    """Residue n-th root of c with least discrete log, or raise NoRoot."""
    q1 = field.q - 1
    lc = field.log(c)
    g = math.gcd(n, q1)
    if lc % g:
        raise NoRoot(f"residue obstruction: {c} is not an {n}-th power in F_{field.q}")
    mod = q1 // g
    k = (lc // g) * pow(n // g, -1, mod) % mod if mod > 1 else 0
    return field.exp(k)


def one_unit_root(u: TruncatedLaurentSeries, n: int) -> TruncatedLaurentSeries:
    """n-th root of a one-unit by Hensel iteration y <- y - (y^n - u)/n."""
    rel = u.prec
    owner = u.owner
    ninv = pow(n % u.owner.p, -1, u.owner.p)
    y = owner.const(1, rel)
    for _ in range(rel):
        err = y ** n - u
        if err.is_zero():
            break
        y = y - err * ninv
    return y


def ls_nth_root(x: TruncatedLaurentSeries, n: int) -> TruncatedLaurentSeries:
    _check_tame(n, x.owner.p)
    if x.is_zero():
        raise ZeroElement("root of zero to precision")
    if x.val % n:
        raise NoRoot(f"valuation obstruction: v={x.val} not divisible by {n}")
    dec = ls_unit_decompose(x)
    f = x.field
    r = canonical_residue_root(f, dec.teich.index, n)
    y = one_unit_root(dec.one_unit, n)
    v = x.val // n
    lead = x.owner.series({v: r}, v + y.prec)
    return lead * y


def ls_power_class(x: TruncatedLaurentSeries, n: int) -> tuple[int, int]:
    """Class of x in F^x/(F^x)^n = Z/n x F_q^x/(F_q^x)^n."""
    _check_tame(n, x.owner.p)
    if x.is_zero():
        raise ZeroElement("power class of zero to precision")
    f = x.field
    g = math.gcd(n, f.q - 1)
    return x.val % n, f.log(x.coeffs[0]) % g


__all__ = [
    "LocalFieldSpec",
    "TruncatedLaurentSeries",
    "UnitDecomposition",
    "local_field",
    "ls_arith",
    "ls_unit_decompose",
    "ls_nth_root",
    "ls_power_class",
    "parse_series",
    "format_series",
    "ff_make_field",
]
