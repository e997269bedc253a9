import random
from fractions import Fraction

import pytest

from conftest import brute_patterns, random_system
from sqpattern.counting import (
    PatternSpec,
    PolySystem,
    build_variety,
    character_histogram,
    count_all_patterns,
    count_pattern,
    count_pattern_affine,
    count_pattern_projective,
    count_variety_direct,
    count_variety_fiber,
    error_report,
    fit_exponent,
    main_term_affine,
    main_term_projective,
    pattern_from_variety,
)
from sqpattern.errors import CeilingExceeded, HomogeneityError, SqpatternError, ZeroPolynomial
from sqpattern.ff import FieldElement, make_field
from sqpattern.points import iter_points, pi
from sqpattern.poly import Poly
from sqpattern.polyparse import parse_poly


def system(F, ambient, n, *texts):
    nvars = n + 1 if ambient == "projective" else n
    names = [f"x{j}" for j in range(nvars)] if ambient == "projective" else [f"x{j}" for j in range(1, nvars + 1)]
    return PolySystem(F, ambient, n, tuple(parse_poly(t, F, names) for t in texts))


def test_affine_examples(F5):
    s1 = system(F5, "affine", 1, "x1")
    assert count_pattern_affine(s1, PatternSpec.parse("+")) == 2
    s2 = system(F5, "affine", 2, "x1", "x2")
    assert count_pattern_affine(s2, PatternSpec.parse("++")) == 4
    assert count_pattern_affine(s2, PatternSpec.parse("+-")) == 4


def test_projective_examples():
    F3 = make_field(3)
    s = system(F3, "projective", 1, "x0^2 + x1^2")
    assert count_pattern_projective(s, PatternSpec.parse("+")) == 2
    assert count_pattern_projective(s, PatternSpec.parse("-")) == 2


def test_pattern_strings():
    p = PatternSpec.parse("+-")
    assert p.squares == {1} and p.m == 2
    assert str(PatternSpec.parse("−+")) == "-+"
    assert [str(x) for x in PatternSpec.all(2)] == ["++", "-+", "+-", "--"]
    for bad in ("", "+x", "0"):
        with pytest.raises(SqpatternError):
            PatternSpec.parse(bad)


def test_system_validation(F5):
    with pytest.raises(HomogeneityError):
        system(F5, "projective", 2, "x0^2 + x1")
    with pytest.raises(ZeroPolynomial):
        PolySystem(F5, "affine", 1, (Poly.zero(F5, 1),))
    with pytest.raises(SqpatternError):
        count_pattern_affine(system(F5, "affine", 1, "x1"), PatternSpec.parse("++"))
    with pytest.raises(SqpatternError):
        count_pattern_projective(system(F5, "affine", 1, "x1"), PatternSpec.parse("+"))


def test_ceiling():
    s = system(make_field(7), "affine", 4, "x1")
    with pytest.raises(CeilingExceeded):
        count_pattern(s, PatternSpec.parse("+"), ceiling=1000)


def test_variety_examples(F5):
    s = system(F5, "affine", 1, "x1")
    plus, minus = PatternSpec.parse("+"), PatternSpec.parse("-")
    assert count_variety_direct(build_variety(s, plus)) == 5
    assert count_variety_direct(build_variety(s, minus)) == 5
    assert pattern_from_variety(build_variety(s, plus)) == 2
    assert pattern_from_variety(build_variety(s, minus)) == 2
    s2 = system(F5, "affine", 2, "x1", "x2")
    assert pattern_from_variety(build_variety(s2, PatternSpec.parse("++"))) == 4
    F3 = make_field(3)
    s3 = system(F3, "affine", 2, "x1^2 + x2^2")
    model = build_variety(s3, plus)
    assert count_variety_direct(model) == count_variety_fiber(model)


def test_variety_points_by_hand(F5):
    # X = {x = s^2} off s = 0 is (1, +-1), (4, +-2); with nu = 2, (2, +-1), (3, +-2)
    model = build_variety(system(F5, "affine", 1, "x1"), PatternSpec.parse("+"))
    pts = [p for p in iter_points(5, 2, False) if all(g.evaluate_raw(list(p)) == 0 for g in model.g)]
    assert sorted(p for p in pts if p[1]) == [(1, 1), (1, 4), (4, 2), (4, 3)]
    model = build_variety(system(F5, "affine", 1, "x1"), PatternSpec.parse("-"))
    pts = [p for p in iter_points(5, 2, False) if all(g.evaluate_raw(list(p)) == 0 for g in model.g)]
    assert sorted(p for p in pts if p[1]) == [(2, 1), (2, 4), (3, 2), (3, 3)]


def test_random_systems_against_brute_force():
    rng = random.Random(2024)
    for _ in range(40):
        s = random_system(rng)
        brute, zeros = brute_patterns(s)
        got = count_all_patterns(s)
        for pat in PatternSpec.all(s.m):
            assert got[str(pat)] == brute.get(str(pat), 0)
        total = s.point_count()
        assert sum(got.values()) + zeros == total


def test_partition_identity():
    rng = random.Random(99)
    for _ in range(30):
        s = random_system(rng)
        hist = character_histogram(s)
        patterns = sum(count_all_patterns(s).values())
        total = pi(s.n, s.field.q) if s.projective else s.field.q**s.n
        assert int(hist.sum()) == total
        from sqpattern.counting import zero_count

        assert patterns + zero_count(hist, s.m) == total


def test_nu_independence():
    rng = random.Random(5)
    for _ in range(15):
        s = random_system(rng, fields=((5, 1), (7, 1), (3, 2)), max_total=3)
        F = s.field
        nonsquares = [a for a in range(F.q) if F.char(a) == -1][:2]
        for pat in PatternSpec.all(s.m):
            vals = {pattern_from_variety(build_variety(s, pat, FieldElement(F, nu))) for nu in nonsquares}
            fib = {count_variety_fiber(build_variety(s, pat, FieldElement(F, nu))) for nu in nonsquares}
            assert len(fib) == 1
            assert len(vals) == 1
            assert vals.pop() == count_pattern(s, pat)


def test_nu_must_be_nonsquare(F5):
    s = system(F5, "affine", 1, "x1")
    with pytest.raises(SqpatternError):
        build_variety(s, PatternSpec.parse("+"), FieldElement(F5, 4))


@pytest.mark.parametrize("workers", [2, 8])
def test_parallel_determinism(workers):
    rng = random.Random(8)
    for _ in range(8):
        s = random_system(rng)
        base = character_histogram(s, 1)
        assert character_histogram(s, workers).tolist() == base.tolist()
        model = build_variety(s, PatternSpec.all(s.m)[-1])
        assert count_variety_direct(model, workers) == count_variety_direct(model, 1)


def test_pi_and_main_terms():
    assert pi(2, 3) == 13 and pi(0, 7) == 1 and pi(-1, 7) == 0
    assert main_term_affine(2, 2, 5) == Fraction(25, 4)
    assert main_term_affine(1, 1, 3) == Fraction(3, 2)
    assert main_term_affine(3, 1, 9) == Fraction(729, 2)
    assert main_term_projective(2, 2, 0, 5) == Fraction(31, 4)
    assert main_term_projective(2, 2, 1, 5) == Fraction(19, 4)
    assert main_term_projective(4, 1, 2, 3) == Fraction(81, 2)


def test_fit_exact():
    # N_S = q^n / 2^m on the nose
    s = error_report([(q, q * q // 4) for q in (2, 4, 8)], 2, 2, (1, 1))
    assert s.fit.status == "exact" and s.fit.exponent is None
    assert s.fit.passes(0.0)


def test_fit_planted_slope():
    # N = q^2/4 + q exactly: error q^(n-1)
    s = error_report([(q, Fraction(q * q, 4) + q) for q in (4, 8, 16, 32)], 2, 2, (1, 1))
    assert s.fit.status == "fitted"
    assert abs(s.fit.exponent - 1.0) < 1e-9
    assert s.fit.fit_q == (16, 32)


def test_fit_closed_form_product_system():
    series = []
    for q in (3, 5, 7, 9, 11, 13):
        F = make_field(*{9: (3, 2)}.get(q, (q, 1)))
        s = system(F, "affine", 2, "x1", "x2")
        N = count_pattern(s, PatternSpec.parse("++"))
        assert N == ((q - 1) // 2) ** 2
        series.append((F, N))
    rep = error_report(series, 2, 2, (1, 1), "++")
    for r in rep.reports:
        assert r.abs_error == Fraction(2 * r.q - 1, 4)
    assert abs(rep.fit.exponent - 1) < 0.1


def test_fit_rules():
    with pytest.raises(SqpatternError):
        fit_exponent([(5, 1)])
    f = fit_exponent([(5, 0), (25, 3)])
    assert f.status == "insufficient" and not f.passes(10)
    f = fit_exponent([(5, 2), (25, 0), (125, 0)])
    assert f.status == "insufficient"
    f = fit_exponent([(5, 7), (25, 1), (125, 25)])
    assert f.fit_q == (25, 125) and abs(f.exponent - 2) < 1e-9


def test_report_columns_and_bound():
    rep = error_report([(5, 8), (25, 150)], 2, 2, (2, 2), "++")
    r = rep.reports[0]
    assert r.main_term == Fraction(25, 4)
    assert r.abs_error == Fraction(7, 4)
    assert abs(r.ratio_halfpow - 1.75 / 5**1.5) < 1e-12
    # d = 4: leading coefficient (3*2)/4
    assert abs(r.bound_leading - 1.5 * 5**1.5) < 1e-12
    assert r.required_constant() == 0.0
    assert rep.bound_satisfied


def test_required_constant_is_minimal():
    from sqpattern.counting import BoundSpec

    rep = error_report([(5, 100), (25, 400)], 2, 2, (2, 2), bound=BoundSpec(0.0))
    C = rep.min_constant
    assert C > 0
    assert not rep.bound_satisfied
    assert error_report([(5, 100), (25, 400)], 2, 2, (2, 2), bound=BoundSpec(C)).bound_satisfied
    assert not error_report([(5, 100), (25, 400)], 2, 2, (2, 2), bound=BoundSpec(C * 0.99)).bound_satisfied
