"""Sparse multivariate polynomials over a FieldSpec.

A Poly maps exponent tuples to nonzero coefficients (field-encoded ints).
Polys are immutable; arithmetic returns new objects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeError, DimensionMismatch, FieldMismatch, HomogeneityError
from .ff import FieldElement, FieldSpec, as_value, element, embed_value, format_element


class Poly:
    __slots__ = ("field", "nvars", "terms", "_hash")

    def __init__(self, field: FieldSpec, nvars: int, terms: dict | None = None):
        self.field = field
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise DimensionMismatch(f"exponent vector {exps} has length != {nvars}")
            if c:
                clean[exps] = c
        self.terms = clean
        self._hash = None

    # constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars)

    @classmethod
    def constant(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: element(field, c).value})

    @classmethod
    def var(cls, field, nvars, j):
        e = [0] * nvars
        e[j] = 1
        return cls(field, nvars, {tuple(e): 1})

    # basic properties ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> float:
        if not self.terms:
            return float("-inf")
        return max(sum(e) for e in self.terms)

    @property
    def max_exponents(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(e[j] for e in self.terms) for j in range(self.nvars))

    def coeff(self, exps) -> int:
        return self.terms.get(tuple(exps), 0)

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({self.to_text()!r} over {self.field.name})"

    # arithmetic ----------------------------------------------------------------
    def _check(self, other: Poly):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field.name} vs {other.field.name}")
        if other.nvars != self.nvars:
            raise DimensionMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(self.field, self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = F.add(out.get(e, 0), c)
        return Poly(F, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Poly(F, self.nvars, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        F = self.field
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = F.add(out.get(e, 0), F.mul(c1, c2))
        return Poly(F, self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.constant(self.field, self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # calculus ------------------------------------------------------------------
    def derivative(self, j: int) -> Poly:
        F = self.field
        out = {}
        for e, c in self.terms.items():
            if e[j]:
                d = list(e)
                d[j] -= 1
                out[tuple(d)] = F.mul(c, F.from_int(e[j]))
        return Poly(F, self.nvars, out)

    def gradient(self) -> tuple[Poly, ...]:
        return tuple(self.derivative(j) for j in range(self.nvars))

    def is_homogeneous(self, d: int) -> bool:
        return bool(self.terms) and all(sum(e) == d for e in self.terms)

    # change of rings --------------------------------------------------------
    def embed(self, dst: FieldSpec) -> Poly:
        if dst == self.field:
            return self
        src = self.field
        return Poly(dst, self.nvars, {e: embed_value(c, src, dst) for e, c in self.terms.items()})

    def extend_vars(self, nvars: int, positions=None) -> Poly:
        """Re-express in ``nvars`` variables; old variable j becomes ``positions[j]``."""
        positions = list(range(self.nvars)) if positions is None else list(positions)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for j, a in enumerate(e):
                ne[positions[j]] = a
            out[tuple(ne)] = c
        return Poly(self.field, nvars, out)

    # evaluation ----------------------------------------------------------------
    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point) -> FieldElement:
        return FieldElement(self.field, self.evaluate_raw([_coerce(self.field, x) for x in point]))

    def evaluate_raw(self, point) -> int:
        """Scalar evaluation on encoded ints, caching powers of each coordinate."""
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, polynomial has {self.nvars} variables")
        F = self.field
        powers = []
        for x, top in zip(point, self.max_exponents):
            row = [1]
            for _ in range(top):
                row.append(F.mul(row[-1], x))
            powers.append(row)
        acc = 0
        for e, c in self.terms.items():
            t = c
            for j, a in enumerate(e):
                if a:
                    t = F.mul(t, powers[j][a])
            acc = F.add(acc, t)
        return acc

    def evaluate_many(self, cols) -> np.ndarray:
        """Vectorized evaluation; ``cols[j]`` holds coordinate j of every point."""
        if len(cols) != self.nvars:
            raise DimensionMismatch(f"{len(cols)} coordinate columns for {self.nvars} variables")
        F = self.field
        npts = len(cols[0]) if self.nvars else 1
        acc = np.zeros(npts, dtype=np.int64)
        cache: dict = {}

        def power(j, a):
            key = (j, a)
            if key not in cache:
                cache[key] = cols[j] if a == 1 else F.vmul(power(j, a - 1), cols[j])
            return cache[key]

        for e, c in self.terms.items():
            t = None
            for j, a in enumerate(e):
                if a:
                    t = power(j, a) if t is None else F.vmul(t, power(j, a))
            if t is None:
                t = np.full(npts, c, dtype=np.int64)
            else:
                t = F.vscale(c, t)
            acc = F.vadd(acc, t)
        return acc

    # text ------------------------------------------------------------------------
    def to_text(self, names=None) -> str:
        names = names or [f"x{j}" for j in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-a for a in e))):
            c = self.terms[e]
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a)
            cs = format_element(self.field, c)
            if self.field.k > 1 and not cs.isdigit():
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()


def _coerce(field: FieldSpec, c) -> int:
    return as_value(field, c)


# ---------------------------------------------------------------------------
# quadratic forms


@dataclass(frozen=True)
class GramMatrix:
    field: FieldSpec
    entries: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_poly(self) -> Poly:
        F, n = self.field, self.size
        f = Poly.zero(F, n)
        out = {}
        for i in range(n):
            for j in range(n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                e = tuple(e)
                out[e] = F.add(out.get(e, 0), self.entries[i][j])
        return Poly(F, n, out) if out else f

    def rows(self):
        return [list(r) for r in self.entries]

    def apply(self, v) -> list[int]:
        F = self.field
        out = []
        for row in self.entries:
            acc = 0
            for a, x in zip(row, v):
                acc = F.add(acc, F.mul(a, x))
            out.append(acc)
        return out

    def bilinear(self, u, v) -> int:
        F = self.field
        acc = 0
        for a, b in zip(u, self.apply(v)):
            acc = F.add(acc, F.mul(a, b))
        return acc

    def evaluate_many(self, cols) -> np.ndarray:
        """x^T M x for each point: one matrix-vector product, then a dot product."""
        F = self.field
        acc = np.zeros(len(cols[0]), dtype=np.int64)
        for i, row in enumerate(self.entries):
            mx = np.zeros_like(acc)
            for j, a in enumerate(row):
                if a:
                    mx = F.vadd(mx, F.vscale(a, cols[j]))
            acc = F.vadd(acc, F.vmul(cols[i], mx))
        return acc

    def embed(self, dst: FieldSpec) -> GramMatrix:
        return GramMatrix(dst, tuple(tuple(embed_value(a, self.field, dst) for a in r) for r in self.entries))


def gram_matrix(f: Poly) -> GramMatrix:
    if not f.is_homogeneous(2):
        raise HomogeneityError("Gram matrix needs a nonzero homogeneous quadratic form")
    F, n = f.field, f.nvars
    half = F.inv(F.from_int(2))
    M = [[0] * n for _ in range(n)]
    for e, c in f.terms.items():
        idx = [j for j, a in enumerate(e) for _ in range(a)]
        i, j = idx
        if i == j:
            M[i][i] = c
        else:
            M[i][j] = M[j][i] = F.mul(c, half)
    return GramMatrix(F, tuple(tuple(r) for r in M))


def matrix_rank(rows, field: FieldSpec | None = None) -> int:
    """Rank by Gaussian elimination. Entries are FieldElements or encoded ints (then pass ``field``)."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionMismatch("ragged matrix")
    if field is None:
        for r in rows:
            for x in r:
                if isinstance(x, FieldElement):
                    field = x.field
                    break
            if field is not None:
                break
        if field is None:
            raise TypeError("pass field= when entries are plain ints")
    F = field
    A = [[_coerce(F, x) for x in r] for r in rows]
    rank = 0
    for col in range(width):
        piv = next((i for i in range(rank, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = F.inv(A[rank][col])
        A[rank] = [F.mul(inv, x) for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][col]:
                c = A[i][col]
                A[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(A[i], A[rank])]
        rank += 1
        if rank == len(A):
            break
    return rank


def is_homogeneous(f: Poly, d: int) -> bool:
    return f.is_homogeneous(d)


def gradient(f: Poly) -> tuple[Poly, ...]:
    return f.gradient()


def evaluate(f: Poly, point) -> FieldElement:
    return f.evaluate(point)


def require_nonzero(f: Poly, what: str = "polynomial") -> None:
    from .errors import ZeroPolynomial

    if f.is_zero():
        raise ZeroPolynomial(f"{what} is zero")


def require_quadratic_form(f: Poly) -> None:
    if not f.is_homogeneous(2):
        raise DegreeError("expected a nonzero homogeneous form of degree 2")
