"""Exact value spaces: formal q-power sums, radicals of p, cyclotomic numbers.

``QExp``   formal finite sums  sum c * q^a  with rational a and c.
``QValue`` the same evaluated at a prime power q = p^m, as an element of
           Q(p^(1/N)) in the basis {p^r : 0 <= r < 1}. Since x^N - p is
           Eisenstein, that basis is linearly independent over Q and the
           representation is canonical, so ``==`` is exact equality.
``Cyclo``  elements of Q(zeta_N) in the power basis modulo Phi_N.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from sympy import Poly, cyclotomic_poly, factorint, symbols


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QExp:
    """Formal sum of rational powers of q with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean: dict[Fraction, Fraction] = {}
        for a, c in (terms or {}).items():
            a, c = _frac(a), _frac(c)
            if c:
                clean[a] = clean.get(a, Fraction(0)) + c
                if not clean[a]:
                    del clean[a]
        self.terms = clean

    @classmethod
    def monomial(cls, exponent=0, coeff=1) -> "QExp":
        return cls({exponent: coeff})

    @classmethod
    def const(cls, c) -> "QExp":
        return cls({0: c})

    def __add__(self, other):
        other = _as_qexp(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, Fraction(0)) + c
        return QExp(out)

    __radd__ = __add__

    def __neg__(self):
        return QExp({a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_qexp(other))

    def __rsub__(self, other):
        return _as_qexp(other) - self

    def __mul__(self, other):
        other = _as_qexp(other)
        out: dict[Fraction, Fraction] = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                out[a + b] = out.get(a + b, Fraction(0)) + c * d
        return QExp(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = _frac(scalar)
        return QExp({a: c / s for a, c in self.terms.items()})

    def __eq__(self, other):
        try:
            return self.terms == _as_qexp(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def shift(self, exponent) -> "QExp":
        """Multiply by q^exponent."""
        e = _frac(exponent)
        return QExp({a + e: c for a, c in self.terms.items()})

    def at(self, q: int) -> "QValue":
        total = QValue.zero(q)
        for a, c in self.terms.items():
            total = total + QValue.power(q, a) * c
        return total

    def denominator(self) -> int:
        return math.lcm(1, *(a.denominator for a in self.terms))

    def to_terms(self) -> list[dict[str, str]]:
        return [{"exponent": str(a), "coefficient": str(c)} for a, c in sorted(self.terms.items())]

    @classmethod
    def from_terms(cls, terms) -> "QExp":
        return cls({Fraction(t["exponent"]): Fraction(t["coefficient"]) for t in terms})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a, c in sorted(self.terms.items(), reverse=True):
            if a == 0:
                parts.append(str(c))
            else:
                mono = "q" if a == 1 else f"q^({a})"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _as_qexp(x) -> QExp:
    if isinstance(x, QExp):
        return x
    if isinstance(x, (int, Fraction)):
        return QExp.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to QExp")


@lru_cache(maxsize=None)
def _prime_power(q: int) -> tuple[int, int]:
    fac = factorint(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, m), = fac.items()
    return int(p), int(m)


class QValue:
    """Element of Q(p^(1/N)), stored as {r in [0,1): coefficient of p^r}."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        clean: dict[Fraction, Fraction] = {}
        for r, c in (terms or {}).items():
            r, c = _frac(r), _frac(c)
            whole = math.floor(r)
            r -= whole
            c = c * Fraction(p) ** whole
            clean[r] = clean.get(r, Fraction(0)) + c
        self.terms = {r: c for r, c in clean.items() if c}

    @classmethod
    def zero(cls, q: int) -> "QValue":
        return cls(_prime_power(q)[0])

    @classmethod
    def power(cls, q: int, a) -> "QValue":
        """q^a for rational a."""
        p, m = _prime_power(q)
        return cls(p, {m * _frac(a): 1})

    @classmethod
    def rational(cls, q: int, c) -> "QValue":
        return cls(_prime_power(q)[0], {0: c})

    def _coerce(self, other) -> "QValue":
        if isinstance(other, QValue):
            if other.p != self.p and other.terms and self.terms:
                raise ValueError("values over different primes")
            return other
        if isinstance(other, (int, Fraction)):
            return QValue(self.p, {0: other})
        raise TypeError(f"cannot coerce {type(other).__name__} to QValue")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for r, c in other.terms.items():
            out[r] = out.get(r, Fraction(0)) + c
        return QValue(self.p, out)

    __radd__ = __add__

    def __neg__(self):
        return QValue(self.p, {r: -c for r, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[Fraction, Fraction] = {}
        for r, c in self.terms.items():
            for s, d in other.terms.items():
                w = r + s
                if w >= 1:
                    out[w - 1] = out.get(w - 1, Fraction(0)) + c * d * self.p
                else:
                    out[w] = out.get(w, Fraction(0)) + c * d
        return QValue(self.p, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, QValue):
            if not scalar.is_rational():
                raise NotImplementedError("division by an irrational radical")
            scalar = scalar.as_fraction()
        s = _frac(scalar)
        return QValue(self.p, {r: c / s for r, c in self.terms.items()})

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def is_rational(self) -> bool:
        return set(self.terms) <= {Fraction(0)}

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms.get(Fraction(0), Fraction(0))

    def to_float(self) -> float:
        return float(sum(float(c) * self.p ** float(r) for r, c in self.terms.items()))

    def to_terms(self) -> list[dict[str, str]]:
        """Serialize as p-power terms: [{"exponent": r, "coefficient": c}]."""
        return [{"exponent": str(r), "coefficient": str(c)} for r, c in sorted(self.terms.items())]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for r, c in sorted(self.terms.items()):
            parts.append(str(c) if r == 0 else f"{c}*{self.p}^({r})")
        return " + ".join(parts)


# -- cyclotomic numbers ---------------------------------------------------------

@lru_cache(maxsize=None)
def _phi_coeffs(n: int) -> tuple[int, ...]:
    x = symbols("x")
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(n, x), x).all_coeffs()))


class Cyclo:
    """Element of Q(zeta_N), zeta_N = exp(2 pi i / N), in the power basis."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        self.n = n
        self.coeffs = _reduce_cyclo(n, [Fraction(c) for c in coeffs])

    @classmethod
    def root(cls, frac) -> "Cyclo":
        """exp(2 pi i * frac) for a rational frac."""
        frac = _frac(frac) % 1
        n = frac.denominator
        return cls._from_exponents(n, {frac.numerator: 1})

    @classmethod
    def _from_exponents(cls, n: int, counts: dict[int, object]) -> "Cyclo":
        raw = [Fraction(0)] * n
        for k, c in counts.items():
            raw[k % n] += _frac(c)
        return cls(n, raw)

    @classmethod
    def from_histogram(cls, n: int, counts: dict[int, int]) -> "Cyclo":
        """sum_k counts[k] * zeta_n^k."""
        return cls._from_exponents(n, counts)

    @classmethod
    def rational(cls, c) -> "Cyclo":
        return cls(1, [c])

    def _lift(self, n: int) -> list[Fraction]:
        """Coefficient list in Q(zeta_n) (power basis before reduction), n multiple of self.n."""
        step = n // self.n
        raw = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            raw[k * step % n] += c
        return raw

    def _common(self, other):
        if not isinstance(other, Cyclo):
            if isinstance(other, (int, Fraction)):
                other = Cyclo.rational(other)
            else:
                raise TypeError(f"cannot coerce {type(other).__name__} to Cyclo")
        n = math.lcm(self.n, other.n)
        return n, self._lift(n), other._lift(n)

    def __add__(self, other):
        n, a, b = self._common(other)
        return Cyclo(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.n, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        n, a, b = self._common(other)
        out = [Fraction(0)] * n
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % n] += x * y
        return Cyclo(n, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = _frac(scalar)
        return Cyclo(self.n, [c / s for c in self.coeffs])

    def __eq__(self, other):
        try:
            n, a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return _reduce_cyclo(n, a) == _reduce_cyclo(n, b)

    def __hash__(self):
        r = self.as_fraction() if self.is_rational() else None
        return hash(r) if r is not None else hash((self.n, tuple(self.coeffs)))

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def to_complex(self) -> complex:
        import cmath
        return sum(complex(c) * cmath.exp(2j * cmath.pi * k / self.n) for k, c in enumerate(self.coeffs))

    def __repr__(self) -> str:
        if self.is_rational():
            return str(self.as_fraction())
        return " + ".join(f"{c}*z{self.n}^{k}" for k, c in enumerate(self.coeffs) if c)


def _reduce_cyclo(n: int, raw: list[Fraction]) -> list[Fraction]:
    phi = _phi_coeffs(n)
    deg = len(phi) - 1
    a = list(raw)
    for top in range(len(a) - 1, deg - 1, -1):
        c = a[top]
        if c:
            shift = top - deg
            for i, pc in enumerate(phi):
                a[i + shift] -= c * pc
    a = a[:deg] + [Fraction(0)] * max(0, deg - len(a))
    return a
