"""Singular-locus probing, independence-condition checks, and conic point classes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .counting import PolySystem
from .errors import (
    CalibrationError,
    DegreeError,
    FieldMismatch,
    InvariantViolation,
    SingularQuadric,
    SqpatternError,
)
from .ff import FieldElement, FieldSpec, as_value, check_extension, find_nonsquare
from .poly import GramMatrix, Poly, gram_matrix, matrix_rank
from .points import chunks_for, materialize, run_chunks

# ---------------------------------------------------------------------------
# T loci


def _subset_indices(subset, m: int) -> tuple[int, ...]:
    idx = tuple(sorted(set(subset)))
    if not idx:
        raise SqpatternError("the subset must be non-empty")
    if any(not 1 <= i <= m for i in idx):
        raise SqpatternError(f"subset indices must lie in 1..{m}")
    return idx


def _point_field(system: PolySystem, point) -> tuple[FieldSpec, list[int]]:
    fields = {x.field for x in point if isinstance(x, FieldElement)}
    if len(fields) > 1:
        raise FieldMismatch("point coordinates live in different fields")
    K = fields.pop() if fields else system.field
    check_extension(system.field, K)
    return K, [as_value(K, x) for x in point]


def t_membership(system: PolySystem, subset, point) -> bool:
    """Is ``point`` in T(f_i : i in subset), i.e. on every f_i with Jacobian rank < r?"""
    if not system.projective:
        raise SqpatternError("T loci are defined for projective systems")
    idx = _subset_indices(subset, system.m)
    K, pt = _point_field(system, point)
    if len(pt) != system.nvars:
        raise SqpatternError(f"point needs {system.nvars} coordinates")
    if not any(pt):
        raise SqpatternError("the zero vector is not a projective point")
    sysK = system.over(K.k // system.field.k)
    fs = [sysK.polys[i - 1] for i in idx]
    if any(f.evaluate_raw(pt) for f in fs):
        return False
    jac = [[d.evaluate_raw(pt) for d in f.gradient()] for f in fs]
    return matrix_rank(jac, K) < len(idx)


def _level_field(system: PolySystem, level) -> tuple[PolySystem, FieldSpec]:
    if isinstance(level, FieldSpec):
        check_extension(system.field, level)
        e = level.k // system.field.k
    else:
        e = int(level)
    sysK = system.over(e)
    return sysK, sysK.field


def _t_census(sysK: PolySystem, subsets, workers: int = 1, ceiling: int | None = None) -> dict:
    K = sysK.field
    grams = [gram_matrix(f) for f in sysK.polys]
    chunks = chunks_for(K.q, sysK.nvars, True, ceiling)

    def work(c):
        cols = materialize(c, K.q, sysK.nvars)
        zero = [g.evaluate_many(cols) == 0 for g in grams]
        out = {}
        for sub in subsets:
            mask = np.logical_and.reduce([zero[i - 1] for i in sub])
            where = np.flatnonzero(mask)
            if len(sub) == 1:
                g = grams[sub[0] - 1]
                sel = [col[where] for col in cols]
                grad_zero = np.ones(len(where), dtype=bool)
                for row in g.entries:
                    lin = np.zeros(len(where), dtype=np.int64)
                    for a, col in zip(row, sel):
                        if a:
                            lin = K.vadd(lin, K.vscale(a, col))
                    grad_zero &= lin == 0
                out[sub] = int(grad_zero.sum())
            else:
                hits = 0
                for w in where.tolist():
                    x = [int(col[w]) for col in cols]
                    if matrix_rank([grams[i - 1].apply(x) for i in sub], K) < len(sub):
                        hits += 1
                out[sub] = hits
        return out

    total = {sub: 0 for sub in subsets}
    for part in run_chunks(work, chunks, workers):
        for sub, v in part.items():
            total[sub] += v
    return total


def count_T_points(system: PolySystem, subset, tower_field=1, workers: int = 1, ceiling: int | None = None) -> int:
    """#T(F_{q^e}) by sweeping P^n(F_{q^e}); ``tower_field`` is a FieldSpec or the level e."""
    if not system.projective:
        raise SqpatternError("T loci are defined for projective systems")
    sub = _subset_indices(subset, system.m)
    sysK, _ = _level_field(system, tower_field)
    return _t_census(sysK, [sub], workers, ceiling)[sub]


def estimate_dimension(counts, q: int) -> tuple[int, str]:
    """Dimension guess from point counts (e, #T(F_{q^e})) over a tower of F_q.

    Returns ``(dim, "exact" | "estimated")``. "exact" means the last two
    levels agree and the top count is within a factor 4 of (q^e)^dim; it is a
    stability flag, not a proof.
    """
    counts = sorted((int(e), int(c)) for e, c in counts)
    if not counts:
        raise SqpatternError("no counts to estimate a dimension from")
    if all(c == 0 for _, c in counts):
        return -1, "exact"

    def guess(e, c):
        if c == 0:
            return -1
        return max(0, round(math.log(c) / math.log(q**e)))

    e_top, c_top = counts[-1]
    dim = guess(e_top, c_top)
    if len(counts) >= 2 and dim >= 0:
        e_prev, c_prev = counts[-2]
        size = (q**e_top) ** dim
        if guess(e_prev, c_prev) == dim and size / 4 <= c_top <= 4 * size:
            return dim, "exact"
    return dim, "estimated"


@dataclass(frozen=True)
class ContainmentCheck:
    """Witness for V(f_j : j in rest) not contained in V(f_last)."""

    rest: tuple[int, ...]
    last: int
    level: int | None  # tower level of the first witness, None if none was found
    point: tuple[int, ...] | None = None

    @property
    def verified(self) -> bool:
        return self.level is not None


@dataclass(frozen=True)
class SingularProfile:
    n: int
    m: int
    per_subset: dict
    confidence: dict
    counts: dict = dc_field(default_factory=dict, repr=False)
    containment: tuple[ContainmentCheck, ...] = ()

    @property
    def sigma(self) -> int:
        return max(self.per_subset.values())

    @property
    def l(self) -> int:
        return max(self.n - self.m - self.sigma - 1, 0)

    @property
    def gamma(self) -> Fraction:
        return max(Fraction(self.n + self.sigma + 1, 2), Fraction(self.n - self.l - 1))

    @property
    def exact(self) -> bool:
        return all(v == "exact" for v in self.confidence.values())

    @property
    def hypothesis_verified(self) -> bool:
        return all(c.verified for c in self.containment)

    @property
    def unverified(self) -> list[ContainmentCheck]:
        return [c for c in self.containment if not c.verified]

    def summary(self) -> str:
        lines = [f"n={self.n} m={self.m} sigma={self.sigma} l={self.l} gamma={self.gamma}"]
        for sub in sorted(self.per_subset, key=lambda s: (len(s), s)):
            counts = ", ".join(f"e={e}:{c}" for e, c in sorted(self.counts.get(sub, {}).items()))
            lines.append(f"  sigma_{{{','.join(map(str, sub))}}} = {self.per_subset[sub]} ({self.confidence[sub]}; {counts})")
        for c in self.containment:
            state = f"witness at level {c.level}" if c.verified else "UNVERIFIED"
            lines.append(f"  V({','.join(map(str, c.rest)) or 'P^n'}) not in V({c.last}): {state}")
        return "\n".join(lines)


def _containment_checks(system: PolySystem, r_max: int, max_level: int, ceiling=None) -> list[ContainmentCheck]:
    checks = []
    m = system.m
    pending = []
    for r in range(1, r_max + 1):
        for sub in combinations(range(1, m + 1), r):
            for last in sub:
                pending.append((tuple(i for i in sub if i != last), last))
    found: dict = {}
    for e in range(1, max_level + 1):
        todo = [p for p in pending if p not in found]
        if not todo:
            break
        sysK, K = _level_field(system, e)
        grams = [gram_matrix(f) for f in sysK.polys]
        for c in chunks_for(K.q, sysK.nvars, True, ceiling):
            todo = [p for p in todo if p not in found]
            if not todo:
                break
            cols = materialize(c, K.q, sysK.nvars)
            vals = [g.evaluate_many(cols) for g in grams]
            for rest, last in todo:
                mask = vals[last - 1] != 0
                for j in rest:
                    mask &= vals[j - 1] == 0
                hit = np.flatnonzero(mask)
                if len(hit):
                    w = int(hit[0])
                    found[(rest, last)] = (e, tuple(int(col[w]) for col in cols))
    for rest, last in pending:
        e, pt = found.get((rest, last), (None, None))
        checks.append(ContainmentCheck(rest, last, e, pt))
    return checks


def sigma_profile(system: PolySystem, max_level: int = 2, workers: int = 1, ceiling: int | None = None) -> SingularProfile:
    """Per-subset T-locus dimensions from censuses over F_{q^e}, e = 1..max_level."""
    if not system.projective:
        raise SqpatternError("sigma profiles are defined for projective systems")
    if max_level < 1:
        raise SqpatternError("max_level must be >= 1")
    m, q = system.m, system.field.q
    subsets = [s for r in range(1, m + 1) for s in combinations(range(1, m + 1), r)]
    counts = {s: {} for s in subsets}
    for e in range(1, max_level + 1):
        sysK, _ = _level_field(system, e)
        census = _t_census(sysK, subsets, workers, ceiling)
        for s in subsets:
            counts[s][e] = census[s]
    per, conf = {}, {}
    for s in subsets:
        per[s], conf[s] = estimate_dimension(counts[s].items(), q)
    prof = SingularProfile(system.n, m, per, conf, counts)
    r_max = min(prof.l + 1, m)
    checks = _containment_checks(system, r_max, max_level, ceiling)
    return SingularProfile(system.n, m, per, conf, counts, tuple(checks))


# ---------------------------------------------------------------------------
# independence conditions


@dataclass(frozen=True)
class WitnessCertificate:
    """u, v over k_1 with chi(f_i(u) f_i(v)) = -1 and chi(f_j(u) f_j(v)) = +1 for j != i."""

    i: int
    u: tuple[int, ...]
    v: tuple[int, ...]
    field: FieldSpec
    polys: tuple[Poly, ...] = dc_field(repr=False, compare=False)

    def __post_init__(self):
        K = self.field
        for j, f in enumerate(self.polys, 1):
            prod = K.mul(f.evaluate_raw(list(self.u)), f.evaluate_raw(list(self.v)))
            want = -1 if j == self.i else 1
            if K.char(prod) != want:
                raise InvariantViolation(f"certificate for f{self.i} fails at f{j}")

    def describe(self) -> str:
        from .ff import format_element

        fmt = lambda pt: "(" + ", ".join(format_element(self.field, x) for x in pt) + ")"
        return f"f{self.i}: u={fmt(self.u)} v={fmt(self.v)} over {self.field.name}"


@dataclass
class WitnessReport:
    m: int
    certificates: dict
    levels: tuple[int, ...]
    unified_field: FieldSpec | None

    @property
    def complete(self) -> bool:
        return len(self.certificates) == self.m

    @property
    def missing(self) -> list[int]:
        return [i for i in range(1, self.m + 1) if i not in self.certificates]

    @property
    def status(self) -> str:
        return "certified" if self.complete else "inconclusive"


def _first_witness_exhaustive(codes: np.ndarray, i: int, m: int):
    """First (u, v) in (u, v)-lexicographic order; codes hold character vectors of every point."""
    flip = 3 ** (i - 1)
    digits = [(codes // 3**j) % 3 for j in range(m)]
    usable = np.logical_and.reduce([d != 1 for d in digits])
    # partner class: same characters except index i, which flips sign
    target = codes + np.where(digits[i - 1] == 2, -2 * flip, 2 * flip)
    first = np.full(3**m, -1, dtype=np.int64)
    idx = np.flatnonzero(usable)
    uniq, pos = np.unique(codes[idx], return_index=True)
    first[uniq] = idx[pos]
    partner = np.where(usable, first[np.where(usable, target, 0)], -1)
    good = np.flatnonzero(partner >= 0)
    if len(good) == 0:
        return None
    u = int(good[0])
    return u, int(partner[u])


def check_condition_iii(
    system: PolySystem,
    max_extension: int = 2,
    search_budget: int = 200_000,
    seed: int = 0,
    pair_threshold: int = 10**6,
) -> WitnessReport:
    """Search k_1 = F_{q^e}, e = 1..max_extension, for condition-(iii) witnesses.

    Pairs are scanned exhaustively while q^(2N e) <= pair_threshold, and
    sampled with a seeded generator beyond that. A missing witness proves
    nothing.
    """
    if max_extension < 1:
        raise SqpatternError("max_extension must be >= 1")
    m, N = system.m, system.nvars
    certs: dict = {}
    levels = []
    for e in range(1, max_extension + 1):
        todo = [i for i in range(1, m + 1) if i not in certs]
        if not todo:
            break
        levels.append(e)
        sysK = system.over(e)
        K = sysK.field
        weights = [3**j for j in range(m)]

        def codes_of(cols):
            code = np.zeros(len(cols[0]), dtype=np.int64)
            for w, f in zip(weights, sysK.polys):
                code += (K.vchar(f.evaluate_many(cols)).astype(np.int64) + 1) * w
            return code

        npts = K.q**N
        if npts * npts <= pair_threshold:
            idx = np.arange(npts, dtype=np.int64)
            cols = [(idx // K.q**j) % K.q for j in range(N)]
            codes = codes_of(cols)
            for i in todo:
                hit = _first_witness_exhaustive(codes, i, m)
                if hit is not None:
                    u = tuple(int(c[hit[0]]) for c in cols)
                    v = tuple(int(c[hit[1]]) for c in cols)
                    certs[i] = WitnessCertificate(i, u, v, K, sysK.polys)
        else:
            for i in todo:
                rng = np.random.default_rng([seed, i, e])
                left = search_budget
                while left > 0 and i not in certs:
                    batch = min(left, 1 << 14)
                    left -= batch
                    U = [rng.integers(0, K.q, batch) for _ in range(N)]
                    V = [rng.integers(0, K.q, batch) for _ in range(N)]
                    cu, cv = codes_of(U), codes_of(V)
                    ok = np.ones(batch, dtype=bool)
                    for j in range(m):
                        du, dv = (cu // 3**j) % 3 - 1, (cv // 3**j) % 3 - 1
                        prod = du * dv
                        ok &= prod == (-1 if j == i - 1 else 1)
                    hit = np.flatnonzero(ok)
                    if len(hit):
                        w = int(hit[0])
                        certs[i] = WitnessCertificate(
                            i, tuple(int(c[w]) for c in U), tuple(int(c[w]) for c in V), K, sysK.polys
                        )
    unified = system.over(max(levels)).field if levels else None
    return WitnessReport(m, dict(sorted(certs.items())), tuple(levels), unified)


def gram_proportional(a: GramMatrix, b: GramMatrix) -> bool:
    F = a.field
    pivot = next(((i, j) for i, r in enumerate(a.entries) for j, x in enumerate(r) if x), None)
    if pivot is None:
        return not any(x for r in b.entries for x in r)
    i, j = pivot
    lam = F.div(b.entries[i][j], a.entries[i][j])
    return all(F.mul(lam, x) == y for ra, rb in zip(a.entries, b.entries) for x, y in zip(ra, rb))


def check_condition_i_quadratic_pair(f1: Poly, f2: Poly) -> bool:
    """Both Gram ranks >= 2 and the Gram matrices not proportional."""
    for f in (f1, f2):
        if not f.is_homogeneous(2):
            raise DegreeError("both forms must be nonzero homogeneous of degree 2")
    if f1.field != f2.field or f1.nvars != f2.nvars:
        raise FieldMismatch("forms must share field and variables")
    g1, g2 = gram_matrix(f1), gram_matrix(f2)
    F = f1.field
    if matrix_rank(g1.rows(), F) < 2 or matrix_rank(g2.rows(), F) < 2:
        return False
    return not gram_proportional(g1, g2)


# ---------------------------------------------------------------------------
# quadrics: external / internal points


class PointClass(enum.Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"
    ON_QUADRIC = "on"

    def __str__(self):
        return self.value


def _require_smooth(f: Poly) -> GramMatrix:
    if not f.is_homogeneous(2):
        raise DegreeError("expected a homogeneous quadratic form")
    g = gram_matrix(f)
    if matrix_rank(g.rows(), f.field) != f.nvars:
        raise SingularQuadric(f"{f} is singular")
    return g


def _require_conic(f: Poly) -> GramMatrix:
    if f.nvars != 3:
        raise SqpatternError("a conic lives in P^2: three variables expected")
    return _require_smooth(f)


def conic_points(conic: Poly) -> list[tuple[int, ...]]:
    """C(F_q) in canonical order."""
    F = conic.field
    g = _require_conic(conic)
    out = []
    for c in chunks_for(F.q, 3, True):
        cols = materialize(c, F.q, 3)
        hit = np.flatnonzero(g.evaluate_many(cols) == 0)
        out.extend(tuple(int(col[w]) for col in cols) for w in hit)
    return out


def tangent_count(conic: Poly, P) -> int:
    """Number of F_q-points T of C whose tangent (polar) line passes through P."""
    g = _require_conic(conic)
    return sum(1 for T in conic_points(conic) if g.bilinear(list(P), list(T)) == 0)


def _as_point(field: FieldSpec, P) -> list[int]:
    pt = [as_value(field, x) for x in P]
    if not any(pt):
        raise SqpatternError("the zero vector is not a projective point")
    return pt


def classify_point_conic(conic: Poly, P) -> PointClass:
    """Geometric class of P via F_q-tangent lines (polars of the conic's points)."""
    F = conic.field
    _require_conic(conic)
    pt = _as_point(F, P)
    if len(pt) != 3:
        raise SqpatternError("P must have three coordinates")
    if conic.evaluate_raw(pt) == 0:
        return PointClass.ON_QUADRIC
    t = tangent_count(conic, pt)
    if t == 2:
        return PointClass.EXTERNAL
    if t == 0:
        return PointClass.INTERNAL
    raise InvariantViolation(f"{t} tangent lines through an off-conic point")


def classify_all_conic(conic: Poly) -> tuple[list[tuple[int, ...]], np.ndarray, np.ndarray]:
    """Every point of P^2(F_q) in canonical order with its tangent count and class code.

    Class codes: 1 external, -1 internal, 0 on the conic.
    """
    F = conic.field
    g = _require_conic(conic)
    cs = chunks_for(F.q, 3, True)
    cols = [np.concatenate(parts) for parts in zip(*(materialize(c, F.q, 3) for c in cs))]
    Ts = conic_points(conic)
    on = g.evaluate_many(cols) == 0
    # polar of T has coefficients M T; P lies on it iff P . (M T) = 0
    tcount = np.zeros(len(cols[0]), dtype=np.int64)
    for T in Ts:
        lin = g.apply(list(T))
        acc = np.zeros_like(tcount)
        for a, col in zip(lin, cols):
            if a:
                acc = F.vadd(acc, F.vscale(a, col))
        tcount += acc == 0
    tcount[on] = 0
    bad = (~on) & (tcount != 0) & (tcount != 2)
    if bad.any():
        raise InvariantViolation(f"tangent counts {sorted(set(tcount[bad].tolist()))} through off-conic points")
    cls = np.where(on, 0, np.where(tcount == 2, 1, -1))
    points = list(zip(*(c.tolist() for c in cols)))
    return points, tcount, cls


def classify_point_quadric_character(quadric: Poly, c, P) -> PointClass:
    """External iff chi(c f(P)) = +1, internal iff -1."""
    F = quadric.field
    cv = as_value(F, c)
    if cv == 0:
        raise SqpatternError("the constant must be nonzero")
    _require_smooth(quadric)
    val = quadric.evaluate_raw(_as_point(F, P))
    if val == 0:
        return PointClass.ON_QUADRIC
    return PointClass.EXTERNAL if F.char(F.mul(cv, val)) == 1 else PointClass.INTERNAL


def _character_classes(quadric: Poly, c: int, cols) -> np.ndarray:
    F = quadric.field
    g = gram_matrix(quadric)
    return F.vchar(F.vscale(c, g.evaluate_many(cols))).astype(np.int64)


def calibrate_constant(conic: Poly, field: FieldSpec | None = None) -> FieldElement:
    """c in {1, nu} making the character test reproduce the tangent-line classes.

    The choice is pinned at the first off-conic point, then checked on every
    off-conic point; a disagreement raises CalibrationError.
    """
    if field is not None and field != conic.field:
        check_extension(conic.field, field)
        conic = conic.embed(field)
    F = conic.field
    points, _, cls = classify_all_conic(conic)
    off = np.flatnonzero(cls != 0)
    if len(off) == 0:  # pragma: no cover - a smooth conic never covers the plane
        raise SqpatternError("no off-conic point to calibrate on")
    P = points[int(off[0])]
    geometric = cls[int(off[0])]
    nu = find_nonsquare(F)
    c = 1 if F.char(conic.evaluate_raw(list(P))) == geometric else nu.value
    cs = chunks_for(F.q, 3, True)
    cols = [np.concatenate(parts) for parts in zip(*(materialize(ch, F.q, 3) for ch in cs))]
    chars = _character_classes(conic, c, cols)
    if not np.array_equal(chars[off], cls[off]):
        raise CalibrationError(f"character classes with c={c} disagree with tangent-line classes")
    return FieldElement(F, c)


def _class_codes(quadric: Poly, constant=None) -> np.ndarray:
    """Class code per point of P^n(F_q) in canonical order: 1 / -1 / 0."""
    F = quadric.field
    n = quadric.nvars - 1
    if n == 2 and constant is None:
        return classify_all_conic(quadric)[2]
    if constant is None:
        raise SqpatternError("quadrics beyond P^2 need an explicit classification constant")
    _require_smooth(quadric)
    cv = as_value(F, constant)
    cs = chunks_for(F.q, quadric.nvars, True)
    cols = [np.concatenate(parts) for parts in zip(*(materialize(ch, F.q, quadric.nvars) for ch in cs))]
    return _character_classes(quadric, cv, cols)


def joint_class_counts(C: Poly, D: Poly, constants=(None, None)) -> dict:
    """Counts of (class wrt C, class wrt D) over P^n(F_q)."""
    if C.field != D.field or C.nvars != D.nvars:
        raise FieldMismatch("quadrics must share field and ambient space")
    n = C.nvars - 1
    if n % 2:
        raise SqpatternError("external/internal points need n even")
    gc, gd = _require_smooth(C), _require_smooth(D)
    if gram_proportional(gc, gd):
        raise SqpatternError("C and D coincide up to a scalar; distinct quadrics are required")
    a = _class_codes(C, constants[0])
    b = _class_codes(D, constants[1])
    names = {1: PointClass.EXTERNAL, -1: PointClass.INTERNAL, 0: PointClass.ON_QUADRIC}
    out = {}
    for x in (1, -1, 0):
        for y in (1, -1, 0):
            out[(names[x], names[y])] = int(np.sum((a == x) & (b == y)))
    return out


def count_external_internal(C: Poly, D: Poly, field: FieldSpec | None = None, constants=(None, None)) -> int:
    """Points of P^n(F_q) external to C and internal to D."""
    if field is not None:
        C, D = C.embed(field), D.embed(field)
    return joint_class_counts(C, D, constants)[(PointClass.EXTERNAL, PointClass.INTERNAL)]
