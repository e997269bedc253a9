import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import projective_points
from sqpattern.errors import DegreeError, DimensionMismatch, HomogeneityError, ParseError, SqpatternError
from sqpattern.ff import FieldElement, make_field
from sqpattern.poly import GramMatrix, Poly, gram_matrix, matrix_rank
from sqpattern.polyparse import parse_poly

X3 = ["x0", "x1", "x2"]


def P(text, F, names=X3):
    return parse_poly(text, F, names)


def random_form(F, nvars, rng):
    terms = {}
    for i in range(nvars):
        for j in range(i, nvars):
            c = rng.randrange(F.q)
            if c:
                e = [0] * nvars
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = c
    if not terms:
        terms[(2,) + (0,) * (nvars - 1)] = 1
    return Poly(F, nvars, terms)


def test_evaluate_examples(F5):
    f = P("x0^2 + x1^2 - x2^2", F5)
    assert f.evaluate((1, 0, 1)).value == 0
    assert f.evaluate((1, 1, 0)).value == 2
    assert P("x0*x1", F5, ["x0", "x1"]).evaluate((2, 3)).value == 1


def test_evaluate_errors(F5, F9):
    f = P("x0*x1", F5, ["x0", "x1"])
    with pytest.raises(DimensionMismatch):
        f.evaluate((1, 2, 3))
    with pytest.raises(SqpatternError):
        f.evaluate((FieldElement(F9, 1), FieldElement(F9, 1)))


def test_gradient_examples(F5):
    (d,) = P("x0^2", F5, ["x0"]).gradient()
    assert d == P("2*x0", F5, ["x0"])
    g = P("x0*x1 - x2^2", F5).gradient()
    assert g == (P("x1", F5), P("x0", F5), P("3*x2", F5))
    assert all(h.is_zero() for h in P("3", F5).gradient())


def test_gram_examples(F5):
    assert gram_matrix(P("x0^2 + x1^2 - x2^2", F5)).rows() == [[1, 0, 0], [0, 1, 0], [0, 0, 4]]
    assert gram_matrix(P("(x0+x1)^2", F5, ["x0", "x1"])).rows() == [[1, 1], [1, 1]]
    assert gram_matrix(P("x0*x1", F5, ["x0", "x1"])).rows() == [[0, 3], [3, 0]]


def test_gram_errors(F5):
    with pytest.raises((DegreeError, HomogeneityError)):
        gram_matrix(P("x0^2 + x1", F5))
    with pytest.raises((DegreeError, HomogeneityError)):
        gram_matrix(P("x0^3", F5))


def test_rank_examples(F5):
    assert matrix_rank([[1, 0, 0], [0, 1, 0], [0, 0, 4]], F5) == 3
    assert matrix_rank([[1, 1], [1, 1]], F5) == 1
    # the second row is twice the first, so the rank is 1
    assert matrix_rank([[2, 0, 3], [4, 0, 1]], F5) == 1
    assert matrix_rank([[2, 0, 3], [4, 0, 2]], F5) == 2
    with pytest.raises(DimensionMismatch):
        matrix_rank([[1, 2], [1]], F5)


def test_rank_uses_extension_encodings(F9):
    g = F9.generator
    assert matrix_rank([[1, 0], [0, g]], F9) == 2
    assert matrix_rank([[1, g], [g, F9.mul(g, g)]], F9) == 1


def test_homogeneity_examples(F5):
    assert P("x0^2 + x1*x2", F5).is_homogeneous(2)
    assert not P("x0^2 + x1", F5).is_homogeneous(2)
    assert not Poly.zero(F5, 3).is_homogeneous(2)


@pytest.mark.parametrize("pk", [(3, 1), (5, 1), (3, 2)])
def test_gram_round_trip(pk):
    F = make_field(*pk)
    rng = random.Random(7)
    for _ in range(100):
        f = random_form(F, rng.randint(1, 4), rng)
        assert gram_matrix(f).to_poly() == f


@pytest.mark.parametrize("pk", [(3, 1), (5, 1), (7, 1), (3, 2)])
def test_euler_relation(pk):
    F = make_field(*pk)
    rng = random.Random(3)
    for nvars in (1, 2, 3):
        f = random_form(F, nvars, rng)
        grad = f.gradient()
        for pt in itertools.product(range(F.q), repeat=nvars):
            lhs = 0
            for x, d in zip(pt, grad):
                lhs = F.add(lhs, F.mul(x, d.evaluate_raw(list(pt))))
            assert lhs == F.mul(2, f.evaluate_raw(list(pt)))


@pytest.mark.parametrize("pk", [(3, 1), (5, 1), (3, 2)])
def test_gram_fast_path_matches_scalar(pk):
    import numpy as np

    F = make_field(*pk)
    rng = random.Random(11)
    for _ in range(20):
        f = random_form(F, 3, rng)
        pts = list(itertools.product(range(F.q), repeat=3))
        cols = [np.array(c, dtype=np.int64) for c in zip(*pts)]
        fast = gram_matrix(f).evaluate_many(cols).tolist()
        generic = f.evaluate_many(cols).tolist()
        scalar = [f.evaluate_raw(list(p)) for p in pts]
        assert fast == generic == scalar


@pytest.mark.parametrize("pk", [(3, 1), (5, 1), (7, 1), (3, 2)])
def test_full_rank_iff_smooth(pk):
    F = make_field(*pk)
    rng = random.Random(5)
    for _ in range(25):
        nvars = rng.randint(2, 4)
        f = random_form(F, nvars, rng)
        grad = f.gradient()
        singular = any(
            all(d.evaluate_raw(list(pt)) == 0 for d in grad) and f.evaluate_raw(list(pt)) == 0
            for pt in projective_points(F, nvars)
        )
        assert (matrix_rank(gram_matrix(f).rows(), F) == nvars) == (not singular)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([(3, 1), (5, 1), (7, 1), (3, 2)]), st.data())
def test_rank_invariant_under_row_ops(pk, data):
    F = make_field(*pk)
    nrows = data.draw(st.integers(1, 4))
    ncols = data.draw(st.integers(1, 4))
    rows = [[data.draw(st.integers(0, F.q - 1)) for _ in range(ncols)] for _ in range(nrows)]
    r = matrix_rank(rows, F)
    assert 0 <= r <= min(nrows, ncols)
    perm = data.draw(st.permutations(range(nrows)))
    assert matrix_rank([rows[i] for i in perm], F) == r
    i = data.draw(st.integers(0, nrows - 1))
    lam = data.draw(st.integers(1, F.q - 1))
    scaled = [list(row) for row in rows]
    scaled[i] = [F.mul(lam, x) for x in scaled[i]]
    assert matrix_rank(scaled, F) == r


def test_parser_forms(F5, F9):
    names = ["x", "y"]
    assert P("2x y", F5, names) == P("2*x*y", F5, names)
    assert P("-(x - y)^2", F5, names) == P("-x^2 + 2*x*y - y^2", F5, names)
    assert P("x − y", F5, names) == P("x - y", F5, names)
    g = P("g*x", F9, names)
    assert g.coeff((1, 0)) == F9.generator
    assert P("3*x", F9, names).is_zero()


@pytest.mark.parametrize(
    "text,col",
    [("x0 + z", 6), ("x0 +", 5), ("(x0", 4), ("x0^", 4), ("x0 $ 1", 4)],
)
def test_parse_errors_carry_position(F5, text, col):
    with pytest.raises(ParseError) as info:
        parse_poly(text, F5, X3, line=3)
    assert info.value.line == 3
    assert info.value.column == col


@pytest.mark.parametrize("pk", [(5, 1), (3, 2), (3, 3)])
def test_text_round_trip(pk):
    F = make_field(*pk)
    rng = random.Random(13)
    for _ in range(50):
        nvars = rng.randint(1, 3)
        terms = {}
        for _ in range(rng.randint(1, 5)):
            e = tuple(rng.randint(0, 3) for _ in range(nvars))
            terms[e] = rng.randrange(1, F.q)
        f = Poly(F, nvars, terms)
        names = [f"v{i}" for i in range(nvars)]
        assert parse_poly(f.to_text(names), F, names) == f


def test_gram_matrix_type(F5):
    G = gram_matrix(P("x0*x1 + x2^2", F5))
    assert isinstance(G, GramMatrix)
    assert G.bilinear([1, 0, 0], [0, 1, 0]) == 3
    assert G.apply([1, 1, 1]) == [3, 3, 1]
