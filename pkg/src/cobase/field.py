"""Arithmetic in GF(p^f).

Elements are residues of polynomials over Z/p modulo a monic irreducible
polynomial.  Each element has an integer *code* ``sum(c[i] * p**i)`` which is
what the matrix and group layers store; :class:`FieldElement` is the explicit
value type built on coefficient lists.

The vectorised helpers (``add``, ``mul`` ...) operate on numpy arrays of codes.
For prime fields they are plain modular arithmetic; for extension fields
addition works digit-wise and multiplication goes through log/antilog tables
that are generated lazily from the polynomial arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

DEFAULT_FIELD_BOUND = 2**20


class FieldError(ValueError):
    pass


class NonPrime(FieldError):
    pass


class DegreeTooLarge(FieldError):
    pass


class SpecMismatch(FieldError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    """Trial division."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over Z/p, coefficient lists with constant term first ---------


def _trim(a: list[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def poly_divmod(a, b, p):
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    rem = list(a)
    while len(rem) >= len(b):
        c = rem[-1] * inv_lead % p
        shift = len(rem) - len(b)
        quot[shift] = c
        for i, y in enumerate(b):
            rem[shift + i] = (rem[shift + i] - c * y) % p
        rem = _trim(rem)
    return _trim(quot), rem


def poly_mod(a, b, p):
    return poly_divmod(a, b, p)[1]


def poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def poly_powmod(base, e, mod, p):
    result = [1]
    base = poly_mod(base, mod, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), mod, p)
        base = poly_mod(poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def monic_polys(degree: int, p: int):
    """All monic polynomials of the given degree, lexicographic low-degree-first."""
    for tail in itertools.product(range(p), repeat=degree):
        yield list(tail) + [1]


def has_root(poly, p) -> bool:
    for x in range(p):
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


def is_irreducible_exhaustive(poly, p) -> bool:
    """Root check plus trial division by every monic polynomial of degree <= f/2."""
    f = len(_trim(poly)) - 1
    if f <= 0:
        return False
    if f == 1:
        return True
    if has_root(poly, p):
        return False
    for d in range(2, f // 2 + 1):
        for cand in monic_polys(d, p):
            if not poly_mod(poly, cand, p):
                return False
    return True


def is_irreducible_rabin(poly, p) -> bool:
    """Rabin's test: m | x^(p^f) - x and gcd(x^(p^(f/l)) - x, m) = 1 for primes l | f."""
    poly = _trim(poly)
    f = len(poly) - 1
    if f <= 0:
        return False
    if f == 1:
        return True
    x = [0, 1]

    def frob_power(k):
        r = x
        for _ in range(k):
            r = poly_powmod(r, p, poly, p)
        return r

    def minus_x(a):
        a = list(a) + [0] * max(0, 2 - len(a))
        a[1] = (a[1] - 1) % p
        return _trim(a)

    if minus_x(frob_power(f)):
        return False
    for l in prime_factors(f):
        g = poly_gcd(poly, minus_x(frob_power(f // l)), p)
        if len(g) > 1:
            return False
    return True


def is_irreducible(poly, p) -> bool:
    f = len(_trim(poly)) - 1
    if f <= 4:
        return is_irreducible_exhaustive(poly, p)
    return is_irreducible_rabin(poly, p)


# --- field spec ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(p^f) presented as Z/p[x] / (modulus)."""

    p: int
    f: int
    modulus: tuple[int, ...]
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise NonPrime(f"{self.p} is not prime")
        mod = tuple(int(c) % self.p for c in self.modulus)
        if len(mod) != self.f + 1 or mod[-1] != 1:
            raise FieldError("modulus must be monic of degree f")
        if not is_irreducible(list(mod), self.p):
            raise FieldError(f"modulus {mod} is reducible mod {self.p}")
        object.__setattr__(self, "modulus", mod)

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.f == other.f
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.f, self.modulus))

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def is_prime_field(self) -> bool:
        return self.f == 1

    def __str__(self):
        return f"p={self.p},f={self.f},mod={','.join(map(str, self.modulus))}"

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Inverse of ``str``: ``"p=3,f=2,mod=1,0,1"``."""
        try:
            head, mod = text.split("mod=")
            parts = dict(kv.split("=") for kv in head.strip(",").split(","))
            return cls(int(parts["p"]), int(parts["f"]), tuple(int(c) for c in mod.split(",")))
        except (ValueError, KeyError) as exc:
            raise FieldError(f"bad field spec {text!r}") from exc

    # element codes <-> coefficient lists

    def coeffs(self, code: int) -> list[int]:
        out = []
        for _ in range(self.f):
            code, c = divmod(int(code), self.p)
            out.append(c)
        return out

    def code(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.f:
            coeffs = poly_mod(coeffs, list(self.modulus), self.p)
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise SpecMismatch("element from another field")
            return value
        if isinstance(value, int):
            return FieldElement(self, self.coeffs(value % self.p if value >= 0 else value % self.p))
        return FieldElement(self, list(value))

    def element(self, code: int) -> FieldElement:
        return FieldElement(self, self.coeffs(code))

    def elements(self):
        """All elements in lexicographic coefficient order (constant term compared first)."""
        for tup in itertools.product(range(self.p), repeat=self.f):
            yield FieldElement(self, list(tup))

    def lex_codes(self) -> list[int]:
        return [e.code for e in self.elements()]

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, [0] * self.f)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, [1] + [0] * (self.f - 1))

    # vectorised arithmetic on code arrays

    @cached_property
    def _log_tables(self):
        q = self.q
        alpha = primitive_element(self)
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        cur = self.one
        for i in range(q - 1):
            exp[i] = cur.code
            log[cur.code] = i
            cur = cur * alpha
        exp[q - 1 :] = exp[: q - 1]
        return exp, log

    @cached_property
    def _pow_p(self):
        return self.p ** np.arange(self.f, dtype=np.int64)

    def _digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pow_p) % self.p

    def _undigits(self, d):
        return (d * self._pow_p).sum(axis=-1)

    def add(self, a, b):
        if self.f == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        return self._undigits((self._digits(a) + self._digits(b)) % self.p)

    def neg(self, a):
        if self.f == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self._undigits((-self._digits(a)) % self.p)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.f == 1:
            return (np.asarray(a, dtype=np.int64) * b) % self.p
        exp, log = self._log_tables
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        if self.f == 1:
            return np.vectorize(lambda x: pow(int(x), self.p - 2, self.p), otypes=[np.int64])(a)
        exp, log = self._log_tables
        return exp[(-log[a]) % (self.q - 1)]

    def frobenius_codes(self, a, d: int = 1):
        """Vectorised e -> e^(p^d)."""
        if self.f == 1:
            return np.asarray(a, dtype=np.int64)
        exp, log = self._log_tables
        a = np.asarray(a, dtype=np.int64)
        out = exp[(log[a] * self.p**d) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    # F_p-linear realisations

    def mult_matrix(self, code: int) -> np.ndarray:
        """f x f matrix over Z/p of multiplication by the element, basis 1, x, ..., x^(f-1)."""
        e = self.element(code)
        cols = []
        for c in range(self.f):
            basis = FieldElement(self, [1 if i == c else 0 for i in range(self.f)])
            cols.append((e * basis).coeffs)
        return np.array(cols, dtype=np.int64).T

    def frobenius_matrix(self, d: int = 1) -> np.ndarray:
        cols = []
        for c in range(self.f):
            basis = FieldElement(self, [1 if i == c else 0 for i in range(self.f)])
            cols.append(frobenius_orbit(basis, d).coeffs)
        return np.array(cols, dtype=np.int64).T

    def parse_element(self, token: str) -> int:
        parts = token.split(",")
        if len(parts) != self.f:
            raise FieldError(f"expected {self.f} coefficients in {token!r}")
        coeffs = [int(x) for x in parts]
        if any(c < 0 or c >= self.p for c in coeffs):
            raise FieldError(f"coefficient out of range in {token!r}")
        return self.code(coeffs)

    def format_element(self, code: int) -> str:
        return ",".join(map(str, self.coeffs(code)))


@dataclass(frozen=True)
class FieldElement:
    """Canonical reduced residue; equality is coefficient-wise."""

    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __init__(self, spec: FieldSpec, coeffs):
        coeffs = [int(c) % spec.p for c in coeffs]
        if len(coeffs) > spec.f:
            coeffs = poly_mod(coeffs, list(spec.modulus), spec.p)
        coeffs = list(coeffs) + [0] * (spec.f - len(coeffs))
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def code(self) -> int:
        p = self.spec.p
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    def _check(self, other) -> FieldElement:
        if isinstance(other, int):
            return self.spec(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.spec != self.spec:
            raise SpecMismatch("operands from different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.spec.p
        return FieldElement(self.spec, [(a + b) % p for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.spec, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.spec.p
        prod = poly_mul(_trim(self.coeffs), _trim(other.coeffs), p)
        return FieldElement(self.spec, poly_mod(prod, list(self.spec.modulus), p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.spec.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return self ** (self.spec.q - 2)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def order(self) -> int:
        """Multiplicative order."""
        if self.is_zero():
            raise DivisionByZero("zero has no multiplicative order")
        n = self.spec.q - 1
        for l in prime_factors(self.spec.q - 1):
            while n % l == 0 and (self ** (n // l)) == self.spec.one:
                n //= l
        return n

    def lex_key(self):
        return self.coeffs

    def __str__(self):
        return ",".join(map(str, self.coeffs))

    def __repr__(self):
        return f"FieldElement({self})"


def field_make(p: int, f: int = 1, bound: int = DEFAULT_FIELD_BOUND) -> FieldSpec:
    """GF(p^f) with the lexicographically smallest irreducible monic modulus."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if f < 1:
        raise FieldError("extension degree must be >= 1")
    if p**f > bound:
        raise DegreeTooLarge(f"p^f = {p**f} exceeds bound {bound}")
    for poly in monic_polys(f, p):
        if is_irreducible(poly, p):
            return FieldSpec(p, f, tuple(poly))
    raise AssertionError("no irreducible polynomial found")  # unreachable


def primitive_element(spec: FieldSpec) -> FieldElement:
    """First element in lexicographic order generating the multiplicative group."""
    cache = spec._cache
    if "primitive" in cache:
        return cache["primitive"]
    n = spec.q - 1
    factors = prime_factors(n) if n > 1 else []
    for e in spec.elements():
        if e.is_zero():
            continue
        if all(e ** (n // l) != spec.one for l in factors):
            cache["primitive"] = e
            return e
    raise AssertionError("multiplicative group is not cyclic?")  # unreachable


def frobenius_orbit(e: FieldElement, d: int) -> FieldElement:
    """e^(p^d)."""
    if not 0 <= d < max(e.spec.f, 1) and not (e.spec.f == 1 and d == 0):
        raise FieldError("need 0 <= d < f")
    return e ** (e.spec.p**d)


def root_of_unity(spec: FieldSpec, r: int) -> FieldElement:
    """A primitive r-th root of unity: the lowest power of the primitive element of that order."""
    if (spec.q - 1) % r:
        raise FieldError(f"GF({spec.q}) has no primitive {r}-th root of unity")
    return primitive_element(spec) ** ((spec.q - 1) // r)


def subfield_sizes(p: int, f: int) -> list[int]:
    return [p**d for d in range(1, f + 1) if f % d == 0]


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def field_of_order(q: int, bound: int = DEFAULT_FIELD_BOUND) -> FieldSpec:
    """GF(q) for a prime power q."""
    ps = prime_factors(q)
    if q < 2 or len(set(ps)) != 1:
        raise FieldError(f"{q} is not a prime power")
    p = ps[0]
    f = 0
    while q > 1:
        q //= p
        f += 1
    return field_make(p, f, bound)
