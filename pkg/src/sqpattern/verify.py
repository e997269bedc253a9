"""Drivers that tie counts, profiles and bounds together for each command."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import geometry
from .counting import (
    BoundSpec,
    CountReport,
    PatternSpec,
    PolySystem,
    character_histogram,
    error_report,
    main_term_affine,
    main_term_pair,
    main_term_projective,
)
from .errors import CeilingExceeded, SqpatternError
from .ff import embed, get_ceiling
from .points import pi
from .sysfile import SystemFile

log = logging.getLogger(__name__)

THEOREMS = ("thm1", "thm2", "thm3", "cor1", "cor2")
SLACK = 0.1


def parse_tower(text: str) -> tuple[int, int]:
    """``"2..5"`` -> (2, 5); ``"3"`` -> (3, 3)."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise SqpatternError(f"bad tower range {text!r}; expected E1..E2") from None
    if a < 1 or b < a:
        raise SqpatternError(f"bad tower range {text!r}")
    return a, b


def max_level(system: PolySystem, ceiling: int | None = None) -> int:
    """Largest e whose point set over F_{q^e} fits under the ceiling."""
    cap = get_ceiling() if ceiling is None else ceiling
    q, e = system.field.q, 0
    while True:
        size = pi(system.n, q ** (e + 1)) if system.projective else q ** ((e + 1) * system.n)
        if size > cap:
            return max(e, 1)
        e += 1


def default_tower(system: PolySystem, ceiling: int | None = None) -> tuple[int, int]:
    return 1, max(max_level(system, ceiling), 2)


def _levels(tower) -> list[int]:
    lo, hi = tower
    return list(range(lo, hi + 1))


def profile_or_none(system: PolySystem, max_level: int = 2, workers: int = 1, ceiling: int | None = None):
    try:
        return geometry.sigma_profile(system, max_level, workers, ceiling)
    except CeilingExceeded as exc:
        log.warning("sigma profile skipped: %s", exc)
        return None


# ---------------------------------------------------------------------------
# count / sweep


def cmd_count(sf: SystemFile, pattern: str, e: int = 1, workers: int = 1, ceiling=None) -> CountReport:
    """One pattern count over F_{q^e}."""
    system = sf.system()
    pat = PatternSpec.parse(pattern)
    if pat.m != system.m:
        raise SqpatternError(f"pattern {pattern!r} has length {pat.m}, system has {system.m} polynomials")
    big = system.over(e)
    hist = character_histogram(big, workers, ceiling)
    N = int(hist[pat.char_code()])
    q = big.field.q
    gamma = None
    if system.projective:
        prof = profile_or_none(system, 2, workers, ceiling)
        l = prof.l if prof else 0
        gamma = prof.gamma if prof else None
        main = main_term_projective(system.n, system.m, l, q)
    else:
        main = main_term_affine(system.n, system.m, q)
    return CountReport(q, system.n, system.m, str(pat), N, main, system.degrees, gamma)


def count_series(system: PolySystem, levels, main_term, gamma=None, bound=None, workers=1, ceiling=None, patterns=None):
    """Histogram once per level, then one ErrorSeries per pattern."""
    pats = patterns or PatternSpec.all(system.m)
    per_pattern = {str(p): [] for p in pats}
    for e in levels:
        big = system.over(e)
        hist = character_histogram(big, workers, ceiling)
        for p in pats:
            per_pattern[str(p)].append((big.field, int(hist[p.char_code()])))
    return {
        key: error_report(counts, system.n, system.m, system.degrees, key, main_term, gamma, bound)
        for key, counts in per_pattern.items()
    }


def cmd_sweep(sf: SystemFile, tower, workers=1, bound=None, ceiling=None, patterns=None):
    system = sf.system()
    if system.projective:
        prof = profile_or_none(system, 2, workers, ceiling)
        l = prof.l if prof else 0
        main = lambda q: main_term_projective(system.n, system.m, l, q)  # noqa: E731
        gamma = prof.gamma if prof else None
    else:
        main, gamma = None, None
    return count_series(system, _levels(tower), main, gamma, bound, workers, ceiling, patterns)


# ---------------------------------------------------------------------------
# verify


@dataclass
class VerificationVerdict:
    theorem: str
    series: dict
    claimed: Fraction
    slack: float = SLACK
    bound_required: bool = False
    warnings: list = dc_field(default_factory=list)
    profile: object = None
    witnesses: object = None

    @property
    def fitted(self) -> dict:
        return {k: s.fit for k, s in self.series.items()}

    @property
    def passed(self) -> bool:
        for s in self.series.values():
            if not s.fit.passes(float(self.claimed), self.slack):
                return False
            if self.bound_required and not s.bound_satisfied:
                return False
        return True

    @property
    def min_constant(self) -> float:
        return max(s.min_constant for s in self.series.values())

    def summary(self) -> str:
        lines = [f"{self.theorem}: claimed exponent {self.claimed} (+{self.slack} slack)"]
        for key, s in self.series.items():
            extra = f", bound {'ok' if s.bound_satisfied else 'VIOLATED'} with C={s.bound.C_user}" if self.bound_required else ""
            lines.append(f"  pattern {key}: fitted {s.fit}{extra}")
        lines.append(f"  minimal C_user for the explicit bound: {self.min_constant:.6g}")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        lines.append(f"  verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _quadric_series(system: PolySystem, levels, main_term, gamma, bound, constants):
    counts = []
    for e in levels:
        big = system.over(e)
        consts = tuple(None if c is None else embed(c, big.field) for c in constants)
        counts.append((big.field, geometry.count_external_internal(big.polys[0], big.polys[1], constants=consts)))
    return {"ext/int": error_report(counts, system.n, 2, system.degrees, "ext/int", main_term, gamma, bound)}


def cmd_verify(
    theorem: str,
    sf: SystemFile,
    tower=None,
    workers: int = 1,
    seed: int = 0,
    bound: BoundSpec | None = None,
    ceiling: int | None = None,
    profile_level: int = 2,
    patterns=None,
) -> VerificationVerdict:
    if theorem not in THEOREMS:
        raise SqpatternError(f"unknown theorem id {theorem!r}; choose from {', '.join(THEOREMS)}")
    system = sf.system()
    tower = tower or default_tower(system, ceiling)
    levels = _levels(tower)
    if len(levels) < 2:
        raise SqpatternError("verification needs at least two tower levels")
    bound = bound or BoundSpec(sf.option("C_user", BoundSpec().C_user))
    warnings = []
    n = system.n

    if theorem == "thm1":
        wit = geometry.check_condition_iii(system, 2, seed=seed)
        if not wit.complete:
            warnings.append(f"hypothesis unverified: no condition-(iii) witness for f{wit.missing}")
        series = count_series(system, levels, None, None, bound, workers, ceiling, patterns)
        return VerificationVerdict(theorem, series, Fraction(2 * n - 1, 2), SLACK, True, warnings, None, wit)

    if not system.projective:
        raise SqpatternError(f"{theorem} needs a projective system of quadratic forms")
    prof = geometry.sigma_profile(system, profile_level, workers, ceiling)
    if not prof.exact:
        warnings.append("some T-locus dimensions are estimates, not stabilized counts")

    if theorem in ("thm2", "cor1", "cor2"):
        if system.m != 2:
            raise SqpatternError(f"{theorem} is about a pair of quadrics (m = 2)")
        f1, f2 = system.polys
        if not geometry.check_condition_i_quadratic_pair(f1, f2):
            warnings.append("hypothesis unverified: the pair fails the rank/proportionality criterion")

    if theorem == "thm2":
        claimed = Fraction(n + prof.sigma + 1, 2)
        series = count_series(system, levels, lambda q: main_term_pair(n, q), claimed, bound, workers, ceiling, patterns)
        return VerificationVerdict(theorem, series, claimed, SLACK, False, warnings, prof)

    if theorem == "thm3":
        wit = geometry.check_condition_iii(system, 2, seed=seed)
        if not wit.complete:
            warnings.append(f"hypothesis unverified: no condition-(iii) witness for f{wit.missing}")
        for c in prof.unverified:
            warnings.append(f"hypothesis unverified: no point of V({c.rest}) off V(f{c.last}) at levels 1..{profile_level}")
        l = prof.l
        series = count_series(
            system, levels, lambda q: main_term_projective(n, system.m, l, q), prof.gamma, bound, workers, ceiling, patterns
        )
        return VerificationVerdict(theorem, series, prof.gamma, SLACK, False, warnings, prof, wit)

    # corollaries: external to C, internal to D
    if n % 2:
        raise SqpatternError("external/internal points need n even")
    constants = sf.quadric_constants()
    if n > 2 and any(c is None for c in constants):
        raise SqpatternError("for n > 2 supply option quadric_constants=<cC>,<cD>")
    if theorem == "cor1":
        claimed = Fraction(2 * n - 1, 2)
        series = _quadric_series(system, levels, lambda q: Fraction(q**n, 4), None, bound, constants)
        return VerificationVerdict(theorem, series, claimed, SLACK, True, warnings, prof)
    claimed = Fraction(n + prof.sigma + 1, 2)
    series = _quadric_series(system, levels, lambda q: main_term_pair(n, q), claimed, bound, constants)
    return VerificationVerdict(theorem, series, claimed, SLACK, False, warnings, prof)


# ---------------------------------------------------------------------------
# classify


@dataclass
class ClassificationTable:
    field_name: str
    q: int
    points: list
    tangent_counts: list
    classes: list
    constant: object

    @property
    def totals(self) -> tuple[int, int, int]:
        on = sum(1 for c in self.classes if c == geometry.PointClass.ON_QUADRIC)
        ext = sum(1 for c in self.classes if c == geometry.PointClass.EXTERNAL)
        return on, ext, len(self.classes) - on - ext


def cmd_classify(sf: SystemFile, e: int = 1) -> ClassificationTable:
    system = sf.system()
    if not system.projective or system.n != 2 or system.m != 1:
        raise SqpatternError("classify needs one conic in projective 2-space")
    big = system.over(e)
    conic = big.polys[0]
    points, tcount, cls = geometry.classify_all_conic(conic)
    c = geometry.calibrate_constant(conic)
    names = {1: geometry.PointClass.EXTERNAL, -1: geometry.PointClass.INTERNAL, 0: geometry.PointClass.ON_QUADRIC}
    return ClassificationTable(
        big.field.name, big.field.q, points, [int(t) for t in tcount], [names[int(x)] for x in cls], c
    )
