"""Finite fields F_{p^k} of odd characteristic.

Elements are encoded as integers in ``[0, q)``: the element
``c0 + c1*g + ... + c_{k-1}*g^{k-1}`` (``g`` the class of x modulo the
defining polynomial) is stored as ``c0 + c1*p + ... + c_{k-1}*p^{k-1}``.
Counting order over the encoding is therefore the odometer order with the
constant coefficient fastest.

Scalar helpers work on plain ints; the ``v*`` methods work on numpy int64
arrays and are what the counting kernels use.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    CeilingExceeded,
    DegreeError,
    EvenCharacteristic,
    FieldMismatch,
    NonPrime,
    SqpatternError,
)

DEFAULT_CEILING = 2**21
TABLE_THRESHOLD = 4096

_ceiling = DEFAULT_CEILING


def get_ceiling() -> int:
    return _ceiling


def set_ceiling(value: int) -> None:
    """Change the process-wide enumeration cap (field sizes and point counts)."""
    global _ceiling
    if value < 1:
        raise ValueError("ceiling must be positive")
    _ceiling = int(value)


def check_ceiling(size: int, what: str, ceiling: int | None = None) -> None:
    cap = _ceiling if ceiling is None else ceiling
    if size > cap:
        raise CeilingExceeded(f"{what} has size {size}, above the enumeration ceiling {cap}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Dense polynomials over F_p, low degree first. Used for moduli only.


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _ptrim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _ptrim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, m, p)


def _ppowmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(list(a), m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _ptrim([c % p for c in a])
    b = _ptrim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _ptrim(out)


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p (coefficients low degree first)."""
    m = list(modulus)
    k = len(m) - 1
    if k < 1 or m[-1] % p != 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p**k, m, p), x, p):
        return False
    for r in prime_factors(k):
        h = _psub(_ppowmod(x, p ** (k // r), m, p), x, p)
        if len(_pgcd(m, h, p)) > 1:
            return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p.

    Candidates x^k + c_{k-1}x^{k-1} + ... + c_0 are compared on
    (c_{k-1}, ..., c_0), so x^2+1 precedes x^2+x.
    """
    for high_first in product(range(p), repeat=k):
        modulus = tuple(reversed(high_first)) + (1,)
        if modulus[0] != 0 and is_irreducible(modulus, p):
            return modulus
    raise AssertionError(f"no irreducible polynomial of degree {k} over F_{p}")  # pragma: no cover


# ---------------------------------------------------------------------------


class FieldSpec:
    """The field F_q, q = p^k, with deterministic model F_p[g]/(modulus).

    Instances come from :func:`make_field` and are cached, so equal specs are
    usually the same object. Compare with ``==`` anyway.
    """

    def __init__(self, p: int, k: int, modulus: tuple[int, ...] | None):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._pw = np.array([p**i for i in range(k)], dtype=np.int64)
        self._tables = None
        self._nonsquare = None

    # identity -----------------------------------------------------------
    def _key(self):
        return (self.p, self.k, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldSpec(p={self.p}, k={self.k}, q={self.q})"

    def __reduce__(self):
        return (make_field, (self.p, self.k))

    @property
    def name(self) -> str:
        return f"F_{self.q}"

    # encoding -----------------------------------------------------------
    def coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def from_coeffs(self, coeffs) -> int:
        if len(coeffs) > self.k:
            if self.modulus is None:
                raise ValueError("too many coefficients for a prime field element")
            coeffs = _pmod(list(coeffs), list(self.modulus), self.p)
        v = 0
        for c in reversed(list(coeffs)):
            v = v * self.p + (c % self.p)
        return v

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_q."""
        return n % self.p

    @property
    def generator(self) -> int:
        """The class of x in F_p[x]/(modulus); for prime fields there is none."""
        if self.k == 1:
            raise SqpatternError("prime fields have no extension generator g")
        return self.p

    def elements(self) -> range:
        return range(self.q)

    # tables ----------------------------------------------------------------
    @property
    def has_tables(self) -> bool:
        return self.q <= TABLE_THRESHOLD

    def tables(self):
        if self._tables is None:
            if not self.has_tables:
                raise SqpatternError(f"{self.name} is above the table threshold")
            self._tables = _build_tables(self)
        return self._tables

    # scalar arithmetic -------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return self.from_coeffs([x + y for x, y in zip(self.coeffs(a), self.coeffs(b))])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self.from_coeffs([-x for x in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return a * b % self.p
        if self.has_tables:
            exp, log = self.tables()[:2]
            return int(exp[(log[a] + log[b]) % (self.q - 1)])
        return self._mul_poly(a, b)

    def _mul_poly(self, a: int, b: int) -> int:
        return self.from_coeffs(_pmulmod(self.coeffs(a), self.coeffs(b), list(self.modulus), self.p))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"division by zero in {self.name}")
        if self.k == 1:
            return pow(a, -1, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def char(self, a: int) -> int:
        """Quadratic character: 0, +1 or -1."""
        if self.has_tables:
            return int(self.tables()[2][a])
        return self.char_pow(a)

    def char_pow(self, a: int) -> int:
        """Quadratic character by Euler's criterion, never using tables."""
        if a == 0:
            return 0
        if self.k == 1:
            r = pow(a, (self.q - 1) // 2, self.p)
        else:
            r = self.from_coeffs(_ppowmod(self.coeffs(a), (self.q - 1) // 2, list(self.modulus), self.p))
        return 1 if r == 1 else -1

    # vectorized arithmetic -------------------------------------------------
    def vdigits(self, a: np.ndarray) -> np.ndarray:
        if self.has_tables:
            return self.tables()[3][a]
        return (a[..., None] // self._pw) % self.p

    def vundigits(self, d: np.ndarray) -> np.ndarray:
        return d @ self._pw

    def vadd(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        return self.vundigits((self.vdigits(a) + self.vdigits(b)) % self.p)

    def vneg(self, a):
        if self.k == 1:
            return (-a) % self.p
        return self.vundigits((-self.vdigits(a)) % self.p)

    def vsub(self, a, b):
        if self.k == 1:
            return (a - b) % self.p
        return self.vundigits((self.vdigits(a) - self.vdigits(b)) % self.p)

    def vmul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        if self.has_tables:
            exp, log = self.tables()[:2]
            out = exp[(log[a] + log[b]) % (self.q - 1)]
            return np.where((a == 0) | (b == 0), 0, out)
        return self._vmul_poly(a, b)

    def _vmul_poly(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        da, db = self.vdigits(a), self.vdigits(b)
        k, p = self.k, self.p
        prod = np.zeros(a.shape + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[..., i + j] += da[..., i] * db[..., j]
        prod %= p
        mod = self.modulus
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[..., d]
            for t in range(k):
                prod[..., d - k + t] -= c * mod[t]
            prod[..., : d] %= p
        return self.vundigits(prod[..., :k] % p)

    def vscale(self, c: int, a):
        if c == 0:
            return np.zeros_like(a)
        if c == 1:
            return a
        return self.vmul(np.full_like(a, c), a)

    def vchar(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.has_tables:
            return self.tables()[2][a]
        return self.vchar_pow(a)

    def vchar_pow(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        e = (self.q - 1) // 2
        result = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                result = self._vmul_raw(result, base)
            base = self._vmul_raw(base, base)
            e >>= 1
        out = np.where(result == 1, 1, -1).astype(np.int8)
        out[a == 0] = 0
        return out

    def _vmul_raw(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        return self._vmul_poly(a, b)


def _build_tables(f: FieldSpec):
    q, p, k = f.q, f.p, f.k
    digits = (np.arange(q, dtype=np.int64)[:, None] // f._pw) % p
    if k == 1:
        gen = next(a for a in range(2, q) if all(pow(a, (q - 1) // r, p) != 1 for r in prime_factors(q - 1)))
        exp = np.empty(q - 1, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            x = x * gen % p
    else:
        mod = list(f.modulus)

        def order_ok(a):
            c = f.coeffs(a)
            return all(f.from_coeffs(_ppowmod(c, (q - 1) // r, mod, p)) != 1 for r in prime_factors(q - 1))

        gen = next(a for a in range(2, q) if order_ok(a))
        gc = f.coeffs(gen)
        exp = np.empty(q - 1, dtype=np.int64)
        x = [1]
        for i in range(q - 1):
            exp[i] = f.from_coeffs(x)
            x = _pmulmod(x, gc, mod, p)
    log = np.zeros(q, dtype=np.int64)
    log[exp] = np.arange(q - 1, dtype=np.int64)
    char = np.zeros(q, dtype=np.int8)
    char[exp] = np.where(np.arange(q - 1) % 2 == 0, 1, -1)
    return exp, log, char, digits


@functools.lru_cache(maxsize=None)
def _make_field_cached(p: int, k: int) -> FieldSpec:
    return FieldSpec(p, k, None if k == 1 else smallest_irreducible(p, k))


def make_field(p: int, k: int = 1, ceiling: int | None = None) -> FieldSpec:
    """Build F_{p^k} with the lexicographically smallest monic irreducible modulus."""
    if not isinstance(p, int) or not isinstance(k, int):
        raise TypeError("p and k must be integers")
    if k < 1:
        raise DegreeError(f"extension degree must be >= 1, got {k}")
    if p == 2:
        raise EvenCharacteristic("characteristic 2 is not supported")
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    check_ceiling(p**k, f"F_{p}^{k}", ceiling)
    return _make_field_cached(p, k)


def extension(base: FieldSpec, e: int, ceiling: int | None = None) -> FieldSpec:
    """F_{q^e} for q = base.q."""
    return make_field(base.p, base.k * e, ceiling)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not an element encoding of {self.field.name}")

    @property
    def coeffs(self) -> list[int]:
        return self.field.coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field.name} vs {other.field.name}")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def _wrap(self, v: int) -> FieldElement:
        return FieldElement(self.field, v)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return format_element(self.field, self.value)


def element(field: FieldSpec, value) -> FieldElement:
    """Coerce an int (taken mod p), a coefficient list, or an element string."""
    if isinstance(value, FieldElement):
        if value.field != field:
            raise FieldMismatch(f"{value.field.name} vs {field.name}")
        return value
    if isinstance(value, str):
        return FieldElement(field, parse_element(field, value))
    if isinstance(value, (list, tuple)):
        return FieldElement(field, field.from_coeffs(value))
    return FieldElement(field, field.from_int(int(value)))


def as_value(field: FieldSpec, x) -> int:
    """Encoding of a coordinate or matrix entry.

    Plain ints are residues mod p over a prime field and element encodings
    (0 <= x < q) over an extension, since that is what enumeration produces.
    """
    if isinstance(x, (int, np.integer)):
        x = int(x)
        if field.k == 1:
            return x % field.p
        if not 0 <= x < field.q:
            raise ValueError(f"{x} is not an element encoding of {field.name}")
        return x
    return element(field, x).value


def arith(a: FieldElement, b: FieldElement, kind: str) -> FieldElement:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field.name} vs {b.field.name}")
    ops = {"add": a.field.add, "sub": a.field.sub, "mul": a.field.mul, "div": a.field.div}
    if kind not in ops:
        raise ValueError(f"unknown operation {kind!r}")
    return FieldElement(a.field, ops[kind](a.value, b.value))


def quadratic_character(a: FieldElement) -> int:
    return a.field.char(a.value)


def find_nonsquare(field: FieldSpec) -> FieldElement:
    """First element in enumeration order with character -1."""
    if field._nonsquare is None:
        field._nonsquare = next(a for a in range(1, field.q) if field.char(a) == -1)
    return FieldElement(field, field._nonsquare)


# ---------------------------------------------------------------------------
# embeddings


@functools.lru_cache(maxsize=None)
def _embedding_root(src: FieldSpec, dst: FieldSpec) -> int:
    if src.k == 1:
        return 0
    # smallest root of src.modulus in dst; roots all lie in the copy of src inside dst
    xs = np.arange(dst.q, dtype=np.int64)
    acc = np.zeros_like(xs)
    for c in reversed(src.modulus):
        acc = dst.vadd(dst.vmul(acc, xs), np.full_like(xs, c))
    roots = np.flatnonzero(acc == 0)
    if len(roots) == 0:  # pragma: no cover - cannot happen when src.k | dst.k
        raise AssertionError("defining polynomial has no root in the extension")
    return int(roots[0])


def check_extension(src: FieldSpec, dst: FieldSpec) -> None:
    if src.p != dst.p or dst.k % src.k != 0:
        raise FieldMismatch(f"{dst.name} is not an extension of {src.name}")


def embed_value(v: int, src: FieldSpec, dst: FieldSpec) -> int:
    if src == dst:
        return v
    check_extension(src, dst)
    if src.k == 1:
        return v
    root = _embedding_root(src, dst)
    acc = 0
    for c in reversed(src.coeffs(v)):
        acc = dst.add(dst.mul(acc, root), c)
    return acc


def embed(a: FieldElement, dst: FieldSpec) -> FieldElement:
    """Deterministic embedding F_{p^a} -> F_{p^b}, a | b: g maps to the smallest root of its modulus."""
    return FieldElement(dst, embed_value(a.value, a.field, dst))


def embedding_table(src: FieldSpec, dst: FieldSpec) -> np.ndarray:
    return np.array([embed_value(v, src, dst) for v in range(src.q)], dtype=np.int64)


# ---------------------------------------------------------------------------
# text form: "c0+c1*g+c2*g^2"


def format_element(field: FieldSpec, v: int) -> str:
    if field.k == 1:
        return str(v)
    parts = []
    for i, c in enumerate(field.coeffs(v)):
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
        else:
            mono = "g" if i == 1 else f"g^{i}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts) if parts else "0"


_TERM_RE = re.compile(r"^([+-]?)(\d*)\*?(g(?:\^(\d+))?)?$")


def parse_element(field: FieldSpec, text: str) -> int:
    """Inverse of :func:`format_element`; also takes plain integers and ``2g`` shorthand."""
    s = text.replace(" ", "").replace("−", "-").strip("()")
    if not s:
        raise ValueError("empty element")
    terms = re.findall(r"[+-]?[^+-]+", s)
    coeffs = [0] * max(field.k, 1)
    for t in terms:
        m = _TERM_RE.match(t)
        if not m or (not m.group(2) and not m.group(3)):
            raise ValueError(f"bad field element term {t!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = int(m.group(2)) if m.group(2) else 1
        deg = 0
        if m.group(3):
            if field.k == 1:
                raise ValueError("prime field elements cannot mention g")
            deg = int(m.group(4)) if m.group(4) else 1
        if deg >= len(coeffs):
            coeffs.extend([0] * (deg + 1 - len(coeffs)))
        coeffs[deg] += sign * c
    return field.from_coeffs(coeffs)
