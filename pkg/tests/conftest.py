"""Brute-force oracles shared by the test modules.

These deliberately avoid the vectorized kernels: plain itertools enumeration,
scalar polynomial evaluation, and Euler's criterion for the character.
"""

import itertools

import pytest

from sqpattern.ff import make_field, set_ceiling, get_ceiling


def euler_char(F, a):
    if a == 0:
        return 0
    return 1 if F.pow(a, (F.q - 1) // 2) == 1 else -1


def affine_points(F, nvars):
    # odometer order, first coordinate fastest
    for tup in itertools.product(range(F.q), repeat=nvars):
        yield tuple(reversed(tup))


def projective_points(F, nvars):
    # canonical representative: first nonzero coordinate equals 1
    for lead in range(nvars):
        for rest in itertools.product(range(F.q), repeat=nvars - lead - 1):
            yield (0,) * lead + (1,) + tuple(rest)


def brute_patterns(system):
    """Map pattern string -> count, plus the number of points where some f_i vanishes."""
    F = system.field
    pts = projective_points(F, system.nvars) if system.projective else affine_points(F, system.nvars)
    counts = {}
    zeros = 0
    for P in pts:
        chars = [euler_char(F, f.evaluate_raw(list(P))) for f in system.polys]
        if 0 in chars:
            zeros += 1
            continue
        key = "".join("+" if c == 1 else "-" for c in chars)
        counts[key] = counts.get(key, 0) + 1
    return counts, zeros


@pytest.fixture
def F5():
    return make_field(5)


@pytest.fixture
def F9():
    return make_field(3, 2)


@pytest.fixture
def restore_ceiling():
    old = get_ceiling()
    yield
    set_ceiling(old)


def random_poly(F, nvars, rng, max_deg=3, homogeneous=None):
    """Random nonzero polynomial; ``homogeneous`` fixes every monomial degree."""
    from sqpattern.poly import Poly

    while True:
        terms = {}
        for _ in range(rng.randint(1, 4)):
            if homogeneous is None:
                deg = rng.randint(0, max_deg)
            else:
                deg = homogeneous
            e = [0] * nvars
            for _ in range(deg):
                e[rng.randrange(nvars)] += 1
            terms[tuple(e)] = rng.randrange(1, F.q)
        f = Poly(F, nvars, terms)
        if not f.is_zero() and (homogeneous is None or f.is_homogeneous(homogeneous)):
            if homogeneous is not None or f.degree >= 1:
                return f


def random_system(rng, fields=((3, 1), (5, 1), (7, 1), (3, 2)), max_total=4):
    """Affine (degrees 1..3) or projective (quadratic forms) with n + m <= max_total."""
    from sqpattern.counting import PolySystem

    F = make_field(*rng.choice(fields))
    projective = rng.random() < 0.35
    if projective:
        n = rng.randint(1, max_total - 1)
        m = rng.randint(1, max_total - n)
        polys = [random_poly(F, n + 1, rng, homogeneous=2) for _ in range(m)]
        return PolySystem(F, "projective", n, tuple(polys))
    n = rng.randint(1, max_total - 1)
    m = rng.randint(1, max_total - n)
    polys = [random_poly(F, n, rng) for _ in range(m)]
    return PolySystem(F, "affine", n, tuple(polys))


ACCEPTANCE_LINES = {}


def record_acceptance(number, passed, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
