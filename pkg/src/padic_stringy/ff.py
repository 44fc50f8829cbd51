"""Finite fields F_q, q = p^m, at desk scale (q <= 10^6).

Elements are encoded internally as integers ``0 <= i < q`` whose base-p digits
are the coefficients of the polynomial representative (low degree first).
This *canonical enumeration* orders elements for every deterministic choice
made downstream (primitive root, roots of unity, curve batteries).

``FieldSpec`` carries the integer-level arithmetic; ``FFElement`` is the
user-facing value type with operator overloading.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from sympy import factorint, isprime

from .errors import NonPrime, NotInSubgroup, PDividesN, TooLarge

MAX_FIELD_SIZE = 10**6


# -- polynomials over Z/p, coefficient lists low degree first ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv_lead % p
        quot[shift] = c
        for i, y in enumerate(b):
            a[i + shift] = (a[i + shift] - c * y) % p
        _trim(a)
    return _trim(quot), a


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _poly_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial ``f`` over Z/p."""
    f = _trim(list(f))
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**m, f, p), x, p):
        return False
    for ell in factorint(m):
        h = _poly_sub(_poly_powmod(x, p ** (m // ell), f, p), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


# -- fields -----------------------------------------------------------------

class _Tables:
    """exp/log/Zech tables relative to the canonical primitive root."""

    def __init__(self, exp: list[int], log: list[int], zech: list[int]):
        self.exp = exp
        self.log = log
        self.zech = zech


_TABLES: dict[tuple[int, int], _Tables] = {}


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: tuple[int, ...]  # c_0..c_{m-1} of the monic modulus

    @property
    def q(self) -> int:
        return self.p**self.m

    def __repr__(self) -> str:
        return f"F_{self.q}"

    # -- encoding -----------------------------------------------------------
    def digits(self, i: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.m):
            i, r = divmod(i, self.p)
            out.append(r)
        return tuple(out)

    def index(self, digits) -> int:
        i = 0
        for c in reversed(tuple(digits)):
            i = i * self.p + c % self.p
        return i

    def element(self, x) -> "FFElement":
        if isinstance(x, FFElement):
            return x
        if isinstance(x, int):
            if self.m == 1:
                return FFElement(self, (x % self.p,))
            if not 0 <= x < self.q:
                raise ValueError(f"index {x} out of range for {self}")
            return FFElement(self, self.digits(x))
        coeffs = tuple(c % self.p for c in x)
        if len(coeffs) != self.m:
            raise ValueError("coefficient vector has wrong length")
        return FFElement(self, coeffs)

    def elements(self):
        for i in range(self.q):
            yield self.element(i)

    @property
    def zero(self) -> "FFElement":
        return self.element(0)

    @property
    def one(self) -> "FFElement":
        return self.element(1)

    # -- polynomial-basis arithmetic (slow path, no tables) -------------------
    def _poly_mul_index(self, a: int, b: int) -> int:
        prod = _poly_mul(list(self.digits(a)), list(self.digits(b)), self.p)
        rem = _poly_divmod(prod, list(self.modulus) + [1], self.p)[1]
        return self.index(rem + [0] * (self.m - len(rem)))

    def _poly_pow_index(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._poly_mul_index(result, base)
            base = self._poly_mul_index(base, base)
            e >>= 1
        return result

    # -- integer-encoded arithmetic ------------------------------------------
    @property
    def tables(self) -> _Tables:
        key = (self.p, self.m)
        if key not in _TABLES:
            _TABLES[key] = _build_tables(self)
        return _TABLES[key]

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        t = self.tables
        la, lb = t.log[a], t.log[b]
        z = t.zech[(lb - la) % (self.q - 1)]
        if z < 0:
            return 0
        return t.exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        if a == 0 or self.p == 2:
            return a
        t = self.tables
        return t.exp[(t.log[a] + (self.q - 1) // 2) % (self.q - 1)]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        t = self.tables
        return t.exp[(t.log[a] + t.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        if self.m == 1:
            return pow(a, -1, self.p)
        t = self.tables
        return t.exp[-t.log[a] % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError(f"0 has no inverse in {self}")
            return 1 if e == 0 else 0
        if self.m == 1:
            return pow(a, e % (self.p - 1), self.p)
        t = self.tables
        return t.exp[t.log[a] * e % (self.q - 1)]

    def log(self, a: int) -> int:
        """Discrete log of a nonzero element w.r.t. the canonical primitive root."""
        if a == 0:
            raise NotInSubgroup("0 is not a unit")
        return self.tables.log[a]

    def exp(self, k: int) -> int:
        return self.tables.exp[k % (self.q - 1)]

    @cached_property
    def primitive_root_index(self) -> int:
        return _primitive_root_index(self)


def _primitive_root_index(field: FieldSpec) -> int:
    q = field.q
    if q == 2:
        return 1
    primes = list(factorint(q - 1))
    for g in range(2, q):
        if field.m == 1:
            ok = all(pow(g, (q - 1) // ell, q) != 1 for ell in primes)
        else:
            ok = all(field._poly_pow_index(g, (q - 1) // ell) != 1 for ell in primes)
        if ok:
            return g
    raise AssertionError("no primitive root found")  # unreachable for a field


def _build_tables(field: FieldSpec) -> _Tables:
    p, m, q = field.p, field.m, field.q
    g = field.primitive_root_index
    n = q - 1
    if m == 1:
        exp = [0] * n
        x = 1
        for k in range(n):
            exp[k] = x
            x = x * g % p
        exp_arr = np.array(exp, dtype=np.int64)
    else:
        # multiplication by g as an m x m matrix over Z/p, applied blockwise
        cols = []
        for j in range(m):
            cols.append(field.digits(field._poly_mul_index(p**j, g)))
        mat = np.array(cols, dtype=np.int64).T  # column j = g * x^j
        block = max(1, math.isqrt(n))
        first = np.zeros((block, m), dtype=np.int64)
        v = np.zeros(m, dtype=np.int64)
        v[0] = 1
        for k in range(block):
            first[k] = v
            v = mat @ v % p
        step = np.eye(m, dtype=np.int64)
        for _ in range(block):
            step = mat @ step % p
        chunks = []
        cur = first
        total = 0
        while total < n:
            chunks.append(cur)
            total += block
            cur = cur @ step.T % p
        vecs = np.concatenate(chunks)[:n]
        exp_arr = vecs @ (p ** np.arange(m, dtype=np.int64))
        exp = exp_arr.tolist()
    log_arr = np.full(q, -1, dtype=np.int64)
    log_arr[exp_arr] = np.arange(n, dtype=np.int64)
    if len(set(exp)) != n:
        raise AssertionError(f"canonical generator of {field} is not primitive")
    d0 = exp_arr % p
    plus_one = exp_arr - d0 + (d0 + 1) % p
    zech = log_arr[plus_one]
    return _Tables(exp, log_arr.tolist(), zech.tolist())


@dataclass(frozen=True)
class FFElement:
    owner: FieldSpec
    coeffs: tuple[int, ...]

    @cached_property
    def index(self) -> int:
        return self.owner.index(self.coeffs)

    def _other(self, other) -> int:
        if isinstance(other, FFElement):
            if other.owner != self.owner:
                raise ValueError("elements of different fields")
            return other.index
        if isinstance(other, int):
            return self.owner.element(other % self.owner.p).index
        return NotImplemented

    def _wrap(self, i: int) -> "FFElement":
        return self.owner.element(i)

    def __add__(self, other):
        o = self._other(other)
        return self._wrap(self.owner.add(self.index, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return self._wrap(self.owner.sub(self.index, o))

    def __rsub__(self, other):
        o = self._other(other)
        return self._wrap(self.owner.sub(o, self.index))

    def __mul__(self, other):
        o = self._other(other)
        return self._wrap(self.owner.mul(self.index, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return self._wrap(self.owner.div(self.index, o))

    def __neg__(self):
        return self._wrap(self.owner.neg(self.index))

    def __pow__(self, e: int):
        return self._wrap(self.owner.pow(self.index, e))

    def inverse(self) -> "FFElement":
        return self._wrap(self.owner.inv(self.index))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def order(self) -> int:
        if self.is_zero():
            raise NotInSubgroup("0 has no multiplicative order")
        n = self.owner.q - 1
        return n // math.gcd(n, self.owner.log(self.index))

    def __repr__(self) -> str:
        return f"{self.index}@F_{self.owner.q}"


@lru_cache(maxsize=None)
def ff_make_field(p: int, m: int = 1) -> FieldSpec:
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise NonPrime(f"{p} is not prime")
    if m < 1:
        raise ValueError("extension degree must be positive")
    if p**m > MAX_FIELD_SIZE:
        raise TooLarge(f"{p}^{m} exceeds the desk-scale cap {MAX_FIELD_SIZE}")
    if m == 1:
        return FieldSpec(p, 1, (0,))
    for low in itertools.product(range(p), repeat=m):
        if low[0] == 0:
            continue  # divisible by x
        if is_irreducible(list(low) + [1], p):
            return FieldSpec(p, m, tuple(low))
    raise AssertionError(f"no irreducible polynomial of degree {m} over F_{p}")


def field_of_size(q: int) -> FieldSpec:
    fac = factorint(q)
    if len(fac) != 1:
        raise NonPrime(f"{q} is not a prime power")
    (p, m), = fac.items()
    return ff_make_field(int(p), int(m))


def ff_primitive_root(field: FieldSpec) -> FFElement:
    return field.element(field.primitive_root_index)


def ff_nth_roots_of_unity(field: FieldSpec, n: int) -> list[FFElement]:
    if n < 1:
        raise ValueError("n must be positive")
    if n % field.p == 0:
        raise PDividesN(f"p={field.p} divides n={n}")
    q1 = field.q - 1
    g = math.gcd(n, q1)
    roots = {field.exp(k * (q1 // g)) for k in range(g)}
    return [field.element(i) for i in sorted(roots)]


def ff_dlog(base: FFElement, x: FFElement) -> int:
    """Least ``e >= 0`` with ``base**e == x``."""
    field = base.owner
    if x.owner != field:
        raise ValueError("elements of different fields")
    if base.is_zero() or x.is_zero():
        raise NotInSubgroup("0 is not a unit")
    n = field.q - 1
    lb, lx = field.log(base.index), field.log(x.index)
    g = math.gcd(lb, n)
    if lx % g:
        raise NotInSubgroup(f"{x} is not a power of {base}")
    order = n // g
    return (lx // g) * pow(lb // g, -1, order) % order if order > 1 else 0


def teichmuller_root_of_unity(field: FieldSpec, d: int) -> int:
    """Index of the canonical primitive d-th root of unity g^((q-1)/d)."""
    if (field.q - 1) % d:
        raise ValueError(f"{d} does not divide q-1 = {field.q - 1}")
    return field.exp((field.q - 1) // d)


def embed_prime_field_poly(big: FieldSpec, small: FieldSpec):
    """Return a map from indices of ``small`` into indices of ``big``.

    ``small`` must be a subfield (m_small | m_big, same p). The embedding
    sends the generator x of ``small`` to the least root of its modulus in
    ``big``.
    """
    if big.p != small.p or big.m % small.m:
        raise ValueError(f"{small} is not a subfield of {big}")
    if small.m == 1:
        return lambda i: big.element(i % big.p).index
    mod = list(small.modulus) + [1]
    root = None
    for z in range(big.q):
        acc = 0
        for c in reversed(mod):
            acc = big.add(big.mul(acc, z), c)
        if acc == 0:
            root = z
            break
    assert root is not None
    powers = [big.pow(root, j) for j in range(small.m)]

    def embed(i: int) -> int:
        acc = 0
        for c, r in zip(small.digits(i), powers):
            for _ in range(c):
                acc = big.add(acc, r)
        return acc

    return embed
