import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqpattern import ff
from sqpattern.errors import CeilingExceeded, EvenCharacteristic, FieldMismatch, NonPrime, SqpatternError
from sqpattern.ff import FieldElement, arith, element, embed, find_nonsquare, make_field, quadratic_character

SMALL = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3), (7, 2), (3, 4)]


def test_prime_field():
    F = make_field(5, 1)
    assert (F.p, F.k, F.q) == (5, 1, 5)


def test_f9_modulus_has_no_root():
    F = make_field(3, 2)
    assert F.q == 9
    c0, c1, c2 = F.modulus
    assert c2 == 1
    assert all((c0 + c1 * x + x * x) % 3 for x in range(3))


@pytest.mark.parametrize(
    "p,k,mod",
    [(3, 2, (1, 0, 1)), (5, 2, (2, 0, 1)), (3, 3, (1, 2, 0, 1)), (5, 3, (1, 1, 0, 1)), (3, 6, (2, 1, 0, 0, 0, 0, 1))],
)
def test_smallest_modulus(p, k, mod):
    assert make_field(p, k).modulus == mod


def test_smallest_modulus_is_smallest():
    # every lexicographically smaller monic cubic over F_3 must be reducible
    target = make_field(3, 3).modulus
    for coeffs in itertools.product(range(3), repeat=3):
        cand = tuple(reversed(coeffs)) + (1,)
        if tuple(reversed(cand)) < tuple(reversed(target)):
            assert not ff.is_irreducible(cand, 3)


def test_construction_errors():
    with pytest.raises(NonPrime):
        make_field(4, 1)
    with pytest.raises(EvenCharacteristic):
        make_field(2, 3)
    with pytest.raises(SqpatternError):
        make_field(5, 0)
    with pytest.raises(CeilingExceeded):
        make_field(3, 14)
    errs = {NonPrime, EvenCharacteristic, CeilingExceeded}
    assert len(errs) == 3


def test_ceiling_can_be_raised(restore_ceiling):
    ff.set_ceiling(3**14)
    assert make_field(3, 14, ceiling=3**14).q == 3**14


def test_arith_examples(F5, F9):
    assert arith(element(F5, 2), element(F5, 3), "mul") == element(F5, 1)
    assert arith(element(F5, 3), element(F5, 3), "div") == element(F5, 1)
    g = FieldElement(F9, F9.generator)
    # g^2 = -1 = 2 under modulus x^2 + 1
    assert arith(g, g, "mul").value == 2
    assert F9.coeffs(arith(g, g, "mul").value) == [2, 0]


def test_arith_errors(F5, F9):
    with pytest.raises(ZeroDivisionError):
        arith(element(F5, 1), element(F5, 0), "div")
    with pytest.raises(FieldMismatch):
        arith(element(F5, 1), element(F9, 1), "add")


def test_character_examples(F5):
    assert quadratic_character(element(F5, 0)) == 0
    assert quadratic_character(element(F5, 4)) == 1
    assert quadratic_character(element(F5, 2)) == -1


def test_find_nonsquare(F5, F9):
    assert find_nonsquare(F5).value == 2
    assert find_nonsquare(make_field(3)).value == 2
    nu = find_nonsquare(F9)
    assert F9.pow(nu.value, 4) == F9.from_int(-1)
    assert quadratic_character(nu) == -1
    # first in enumeration order
    assert all(F9.char(a) != -1 for a in range(nu.value))


@pytest.mark.parametrize("p,k", [s for s in SMALL if s[0] ** s[1] <= 81])
def test_character_multiplicative_and_balanced(p, k):
    F = make_field(p, k)
    chars = [F.char(a) for a in range(F.q)]
    assert chars[0] == 0
    assert chars.count(1) == chars.count(-1) == (F.q - 1) // 2
    for a in range(1, F.q):
        for b in range(1, F.q):
            assert chars[F.mul(a, b)] == chars[a] * chars[b]


@pytest.mark.parametrize("p,k", [s for s in SMALL if s[0] ** s[1] <= 81])
def test_table_and_power_paths_agree(p, k):
    F = make_field(p, k)
    vals = np.arange(F.q, dtype=np.int64)
    table = F.vchar(vals)
    power = F.vchar_pow(vals)
    scalar = [F.char_pow(a) for a in range(F.q)]
    assert table.tolist() == power.tolist() == scalar


def test_large_field_without_tables():
    F = make_field(3, 8)  # 6561 > table threshold
    assert not F.has_tables
    rng = np.random.default_rng(1)
    a = rng.integers(0, F.q, 300)
    b = rng.integers(0, F.q, 300)
    prod = F.vmul(a, b)
    for x, y, z in zip(a, b, prod):
        assert F.mul(int(x), int(y)) == int(z)
        assert F.char(int(x)) == F.char_pow(int(x))


@pytest.mark.parametrize("p,k", [(3, 2), (5, 2), (3, 3)])
def test_table_mul_matches_polynomial_mul(p, k):
    F = make_field(p, k)
    for a in range(F.q):
        for b in range(F.q):
            assert F.mul(a, b) == F._mul_poly(a, b)


def test_embed_examples():
    F3, F9 = make_field(3), make_field(3, 2)
    assert embed(element(F3, 1), F9) == element(F9, 1)
    two = embed(element(F3, 2), F9)
    assert arith(two, two, "mul") == embed(element(F3, 1), F9)


@pytest.mark.parametrize("src,dst", [((3, 1), (3, 2)), ((3, 2), (3, 4)), ((5, 1), (5, 2)), ((3, 1), (3, 3))])
def test_embed_is_homomorphism(src, dst):
    A, B = make_field(*src), make_field(*dst)
    for a in range(A.q):
        for b in range(A.q):
            ea, eb = embed(FieldElement(A, a), B), embed(FieldElement(A, b), B)
            assert embed(FieldElement(A, A.add(a, b)), B) == arith(ea, eb, "add")
            assert embed(FieldElement(A, A.mul(a, b)), B) == arith(ea, eb, "mul")
    images = {embed(FieldElement(A, a), B).value for a in range(A.q)}
    assert len(images) == A.q


def test_embed_incompatible():
    with pytest.raises(FieldMismatch):
        embed(element(make_field(3, 2), 1), make_field(3, 3))
    with pytest.raises(FieldMismatch):
        embed(element(make_field(3), 1), make_field(5, 2))


def test_element_text_round_trip(F9):
    for a in range(F9.q):
        assert ff.parse_element(F9, ff.format_element(F9, a)) == a


def test_as_value_convention(F5, F9):
    assert ff.as_value(F5, -1) == 4
    assert ff.as_value(F9, 3) == F9.generator
    with pytest.raises(ValueError):
        ff.as_value(F9, 9)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(3, 2), (5, 2), (7, 1), (3, 3)]), st.data())
def test_field_axioms(pk, data):
    F = make_field(*pk)
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.q - 1) == 1
