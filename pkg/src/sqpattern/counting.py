"""Exact pattern counts N_S, the auxiliary variety X, main terms and error fits."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    HomogeneityError,
    InvariantViolation,
    SqpatternError,
    ZeroPolynomial,
)
from .ff import FieldElement, FieldSpec, extension, find_nonsquare
from .poly import Poly, gram_matrix
from .points import chunks_for, materialize, pi, run_chunks

AFFINE = "affine"
PROJECTIVE = "projective"


@dataclass(frozen=True)
class PolySystem:
    """f_1..f_m over ``field`` on A^n (n variables) or P^n (n+1 variables)."""

    field: FieldSpec
    ambient: str
    n: int
    polys: tuple[Poly, ...]
    poly_names: tuple[str, ...] = ()
    var_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.ambient not in (AFFINE, PROJECTIVE):
            raise SqpatternError(f"unknown ambient {self.ambient!r}")
        object.__setattr__(self, "polys", tuple(self.polys))
        if not self.polys:
            raise SqpatternError("a system needs at least one polynomial")
        for i, f in enumerate(self.polys, 1):
            if f.field != self.field:
                raise FieldMismatch(f"f{i} is over {f.field.name}, system over {self.field.name}")
            if f.nvars != self.nvars:
                raise DimensionMismatch(f"f{i} has {f.nvars} variables, ambient needs {self.nvars}")
            if f.is_zero():
                raise ZeroPolynomial(f"f{i} is the zero polynomial")
            if self.projective and not f.is_homogeneous(2):
                raise HomogeneityError(f"f{i} is not a homogeneous quadratic form")
        if not self.poly_names:
            object.__setattr__(self, "poly_names", tuple(f"f{i}" for i in range(1, self.m + 1)))
        if not self.var_names:
            start = 0 if self.projective else 1
            object.__setattr__(self, "var_names", tuple(f"x{j}" for j in range(start, start + self.nvars)))

    @property
    def projective(self) -> bool:
        return self.ambient == PROJECTIVE

    @property
    def m(self) -> int:
        return len(self.polys)

    @property
    def nvars(self) -> int:
        return self.n + 1 if self.projective else self.n

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(int(f.degree) for f in self.polys)

    def over(self, e: int) -> PolySystem:
        """The same system with coefficients pushed into F_{q^e}."""
        return _over(self, e)

    def point_count(self) -> int:
        return pi(self.n, self.field.q) if self.projective else self.field.q**self.n


@functools.lru_cache(maxsize=256)
def _over(system: PolySystem, e: int) -> PolySystem:
    if e == 1:
        return system
    big = extension(system.field, e)
    return PolySystem(
        big,
        system.ambient,
        system.n,
        tuple(f.embed(big) for f in system.polys),
        system.poly_names,
        system.var_names,
    )


@dataclass(frozen=True)
class PatternSpec:
    """Index set S (1-based) of the polynomials that must take nonzero square values."""

    m: int
    squares: frozenset

    def __post_init__(self):
        object.__setattr__(self, "squares", frozenset(self.squares))
        if any(not 1 <= i <= self.m for i in self.squares):
            raise SqpatternError(f"pattern indices must lie in 1..{self.m}")

    @classmethod
    def parse(cls, text: str) -> PatternSpec:
        text = text.strip().replace("−", "-")
        if not text or any(ch not in "+-" for ch in text):
            raise SqpatternError(f"pattern {text!r} must be a non-empty string over '+' and '-'")
        return cls(len(text), frozenset(i for i, ch in enumerate(text, 1) if ch == "+"))

    @classmethod
    def all(cls, m: int) -> list[PatternSpec]:
        return [cls.from_code(m, c) for c in range(2**m)]

    @classmethod
    def from_code(cls, m: int, bits: int) -> PatternSpec:
        # bit i-1 clear means '+' so that code 0 is "++...+"
        return cls(m, frozenset(i for i in range(1, m + 1) if not (bits >> (i - 1)) & 1))

    def signs(self) -> tuple[int, ...]:
        return tuple(1 if i in self.squares else -1 for i in range(1, self.m + 1))

    def char_code(self) -> int:
        """Index into a character histogram (digit chi+1 in base 3, f1 lowest)."""
        return sum((s + 1) * 3**i for i, s in enumerate(self.signs()))

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs())


# ---------------------------------------------------------------------------
# character histogram kernel


def _evaluators(system: PolySystem):
    if system.projective:
        return [gram_matrix(f).evaluate_many for f in system.polys]
    return [f.evaluate_many for f in system.polys]


def character_histogram(system: PolySystem, workers: int = 1, ceiling: int | None = None) -> np.ndarray:
    """hist[c] = number of points whose character vector has base-3 code c."""
    F, m = system.field, system.m
    chunks = chunks_for(F.q, system.nvars, system.projective, ceiling)
    evals = _evaluators(system)
    weights = [3**i for i in range(m)]

    def work(c):
        cols = materialize(c, F.q, system.nvars)
        code = np.zeros(len(c), dtype=np.int64)
        for w, ev in zip(weights, evals):
            code += (F.vchar(ev(cols)).astype(np.int64) + 1) * w
        return np.bincount(code, minlength=3**m)

    return np.sum(run_chunks(work, chunks, workers), axis=0, dtype=np.int64)


def count_all_patterns(system: PolySystem, workers: int = 1, ceiling: int | None = None) -> dict[str, int]:
    hist = character_histogram(system, workers, ceiling)
    return {str(s): int(hist[s.char_code()]) for s in PatternSpec.all(system.m)}


def _check_pattern(system: PolySystem, pattern: PatternSpec):
    if pattern.m != system.m:
        raise SqpatternError(f"pattern has length {pattern.m}, system has {system.m} polynomials")


def count_pattern_affine(system: PolySystem, pattern: PatternSpec, workers: int = 1, ceiling: int | None = None) -> int:
    if system.projective:
        raise SqpatternError("count_pattern_affine needs an affine system")
    _check_pattern(system, pattern)
    return int(character_histogram(system, workers, ceiling)[pattern.char_code()])


def count_pattern_projective(system: PolySystem, pattern: PatternSpec, workers: int = 1, ceiling: int | None = None) -> int:
    if not system.projective:
        raise SqpatternError("count_pattern_projective needs a projective system")
    _check_pattern(system, pattern)
    return int(character_histogram(system, workers, ceiling)[pattern.char_code()])


def count_pattern(system: PolySystem, pattern: PatternSpec, workers: int = 1, ceiling: int | None = None) -> int:
    _check_pattern(system, pattern)
    return int(character_histogram(system, workers, ceiling)[pattern.char_code()])


def zero_count(hist: np.ndarray, m: int) -> int:
    """Points where some f_i vanishes."""
    codes = np.arange(3**m)
    has_zero = np.zeros(3**m, dtype=bool)
    for i in range(m):
        has_zero |= (codes // 3**i) % 3 == 1
    return int(hist[has_zero].sum())


# ---------------------------------------------------------------------------
# the auxiliary variety X = {g_i = 0}


@dataclass(frozen=True)
class VarietyModel:
    system: PolySystem
    pattern: PatternSpec
    nu: FieldElement
    g: tuple[Poly, ...] = dc_field(repr=False)

    @property
    def nvars(self) -> int:
        return self.system.nvars + self.system.m


def build_variety(system: PolySystem, pattern: PatternSpec, nu: FieldElement | None = None) -> VarietyModel:
    """g_i = f_i - s_i^2 for i in S, f_i - nu*s_i^2 otherwise, in nvars + m variables."""
    _check_pattern(system, pattern)
    F = system.field
    nu = find_nonsquare(F) if nu is None else nu
    if nu.field != F:
        raise FieldMismatch("nu must live in the system's field")
    if F.char(nu.value) != -1:
        raise SqpatternError(f"nu = {nu} is not a non-square in {F.name}")
    nv = system.nvars + system.m
    g = []
    for i, f in enumerate(system.polys, 1):
        s = Poly.var(F, nv, system.nvars + i - 1)
        c = 1 if i in pattern.squares else nu.value
        g.append(f.extend_vars(nv) - Poly(F, nv, {e: F.mul(c, a) for e, a in (s * s).terms.items()}))
    return VarietyModel(system, pattern, nu, tuple(g))


def _variety_census(model: VarietyModel, workers: int = 1, ceiling: int | None = None) -> tuple[int, int]:
    """(#X(F_q), #points of X with every s_i != 0), by full enumeration."""
    system = model.system
    F, nx, nv = system.field, system.nvars, model.nvars
    chunks = chunks_for(F.q, nv, system.projective, ceiling)

    def work(c):
        cols = materialize(c, F.q, nv)
        on_x = np.ones(len(c), dtype=bool)
        for gi in model.g:
            on_x &= gi.evaluate_many(cols) == 0
        s_nonzero = np.ones(len(c), dtype=bool)
        for j in range(nx, nv):
            s_nonzero &= cols[j] != 0
        return np.array([on_x.sum(), (on_x & s_nonzero).sum()], dtype=np.int64)

    total, free = np.sum(run_chunks(work, chunks, workers), axis=0)
    return int(total), int(free)


def count_variety_direct(model: VarietyModel, workers: int = 1, ceiling: int | None = None) -> int:
    return _variety_census(model, workers, ceiling)[0]


def count_variety_fiber(model: VarietyModel, workers: int = 1, ceiling: int | None = None) -> int:
    """Sum over base points of prod (1 + chi(f_i)) for i in S and (1 - chi(f_i)) otherwise."""
    system, signs = model.system, model.pattern.signs()
    hist = character_histogram(system, workers, ceiling)
    total = 0
    for code in np.flatnonzero(hist):
        weight = 1
        for i, s in enumerate(signs):
            chi = (int(code) // 3**i) % 3 - 1
            weight *= 1 + s * chi
        total += weight * int(hist[code])
    return total


def pattern_from_variety(model: VarietyModel, workers: int = 1, ceiling: int | None = None) -> int:
    """N_S recovered as #(X minus the hyperplanes s_i = 0) / 2^m."""
    _, free = _variety_census(model, workers, ceiling)
    d = 2**model.system.m
    if free % d:
        raise InvariantViolation(f"{free} points of X off the s-hyperplanes is not divisible by {d}")
    return free // d


# ---------------------------------------------------------------------------
# main terms


def main_term_affine(n: int, m: int, q: int) -> Fraction:
    return Fraction(q**n, 2**m)


def main_term_projective(n: int, m: int, l: int, q: int) -> Fraction:
    """(1/2^m) * sum_{r=0}^{min(m,l)} (-1)^r C(m,r) pi_{n-r}(q)."""
    if l < 0:
        raise ValueError("l must be non-negative")
    total = sum((-1) ** r * math.comb(m, r) * pi(n - r, q) for r in range(min(m, l) + 1))
    return Fraction(total, 2**m)


def main_term_pair(n: int, q: int) -> Fraction:
    """(q^n - q^(n-1)) / 4, the two-form main term."""
    return Fraction(q**n - q ** (n - 1), 4)


# ---------------------------------------------------------------------------
# reports and exponent fits

DEFAULT_C = 10.0


@dataclass(frozen=True)
class BoundSpec:
    """Constant multiplying q^(n-1) in the explicit bound.

    The default 10 is a heuristic, not a derived value: it is comfortably
    above the minimal constants observed on the regression systems.
    """

    C_user: float = DEFAULT_C

    def __post_init__(self):
        if not self.C_user >= 0:
            raise ValueError("C_user must be >= 0")


@dataclass(frozen=True)
class CountReport:
    q: int
    n: int
    m: int
    pattern: str
    N_S: int
    main_term: Fraction
    degrees: tuple[int, ...]
    gamma: Fraction | None = None

    @property
    def d_i(self) -> tuple[int, ...]:
        return tuple(max(d, 2) for d in self.degrees)

    @property
    def d(self) -> int:
        return math.prod(self.d_i)

    @property
    def abs_error(self) -> Fraction:
        return abs(Fraction(self.N_S) - self.main_term)

    @property
    def ratio_halfpow(self) -> float:
        return float(self.abs_error) / self.q ** (self.n - 0.5)

    @property
    def ratio_gamma(self) -> float | None:
        if self.gamma is None:
            return None
        return float(self.abs_error) / self.q ** float(self.gamma)

    # the explicit inequality is always against q^n / 2^m
    @property
    def bound_error(self) -> Fraction:
        return abs(Fraction(self.N_S) - Fraction(self.q**self.n, 2**self.m))

    @property
    def bound_leading(self) -> float:
        return (self.d - 1) * (self.d - 2) / 2**self.m * self.q ** (self.n - 0.5)

    def required_constant(self) -> float:
        """Smallest C with |N_S - q^n/2^m| <= leading + C q^(n-1)."""
        excess = float(self.bound_error) - self.bound_leading
        return max(0.0, excess / self.q ** (self.n - 1))

    def bound_satisfied(self, bound: BoundSpec) -> bool:
        return float(self.bound_error) <= self.bound_leading + bound.C_user * self.q ** (self.n - 1) + 1e-9


@dataclass(frozen=True)
class ExponentFit:
    status: str  # "fitted" | "exact" | "insufficient"
    exponent: float | None
    fit_q: tuple[int, ...] = ()
    zero_error_q: tuple[int, ...] = ()

    def passes(self, claimed: float, slack: float = 0.1) -> bool:
        if self.status == "exact":
            return True
        if self.exponent is None:
            return False
        return self.exponent <= claimed + slack

    def __str__(self):
        return f"{self.exponent:.6f}" if self.status == "fitted" else self.status


def fit_exponent(points: Sequence[tuple[int, float]]) -> ExponentFit:
    """Least-squares slope of log|error| on log q over the two largest q with nonzero error."""
    qs = sorted({q for q, _ in points})
    if len(qs) < 2:
        raise SqpatternError("an exponent fit needs at least two distinct q")
    zero = tuple(sorted(q for q, err in points if err == 0))
    nonzero = sorted((q, err) for q, err in points if err != 0)
    if not nonzero:
        return ExponentFit("exact", None, (), zero)
    use = nonzero[-2:]
    if len(use) < 2 or use[0][0] == use[1][0]:
        return ExponentFit("insufficient", None, tuple(q for q, _ in use), zero)
    x = np.log([float(q) for q, _ in use])
    y = np.log([float(err) for _, err in use])
    slope = float(np.polyfit(x, y, 1)[0])
    return ExponentFit("fitted", slope, tuple(q for q, _ in use), zero)


@dataclass
class ErrorSeries:
    reports: list[CountReport]
    fit: ExponentFit
    bound: BoundSpec

    @property
    def bound_flags(self) -> list[bool]:
        return [r.bound_satisfied(self.bound) for r in self.reports]

    @property
    def bound_satisfied(self) -> bool:
        return all(self.bound_flags)

    @property
    def min_constant(self) -> float:
        return max(r.required_constant() for r in self.reports)


def error_report(
    counts: Sequence[tuple[FieldSpec | int, int]],
    n: int,
    m: int,
    degrees: Sequence[int],
    pattern: str = "",
    main_term: Callable[[int], Fraction] | None = None,
    gamma: Fraction | None = None,
    bound: BoundSpec | None = None,
) -> ErrorSeries:
    """Per-q reports plus an exponent fit of |N_S - main_term(q)|.

    ``main_term`` defaults to q^n/2^m. ``gamma`` (when known) fills the
    ratio_gamma column.
    """
    bound = bound or BoundSpec()
    main_term = main_term or (lambda q: main_term_affine(n, m, q))
    reports = []
    for fld, N in counts:
        q = fld.q if isinstance(fld, FieldSpec) else int(fld)
        reports.append(CountReport(q, n, m, pattern, int(N), Fraction(main_term(q)), tuple(degrees), gamma))
    fit = fit_exponent([(r.q, r.abs_error) for r in reports])
    return ErrorSeries(reports, fit, bound)
