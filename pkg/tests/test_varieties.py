import itertools
import math

import numpy as np
import pytest

from cubicmap.finite_field import BadPrimeError
from cubicmap.modular import primes_upto
from cubicmap.varieties import (
    E,
    E3_PATCH,
    V33,
    BudgetExceeded,
    CountReport,
    ProjectivePoint,
    count_E,
    count_E3,
    count_V33,
    cube_sum_table,
    enumerate_points,
)

GOOD_PRIMES = [p for p in primes_upto(100) if p != 3]


def brute_table(p):
    """Pure-Python pair enumeration, independent of the vectorized kernel."""
    A = [0] * p
    for u in range(p):
        for v in range(p):
            A[(u**3 + v**3) % p] += 1
    return A


def brute_projective_E(p):
    pts = set()
    for c in itertools.product(range(p), repeat=3):
        if any(c) and (c[0] ** 3 + c[1] ** 3 + c[2] ** 3) % p == 0:
            pts.add(ProjectivePoint.normalize(c, p))
    return pts


@pytest.mark.parametrize("p,expected", [(2, 3), (7, 9), (13, 9)])
def test_enumerate_E(p, expected):
    pts = enumerate_points(E, p)
    assert len(pts) == expected
    assert set(pts) == brute_projective_E(p)


def test_projective_points_are_normalized():
    for pt in enumerate_points(E, 7):
        last = [c for c in pt.coords if c][-1]
        assert last == 1


def test_cube_sum_table_p2():
    assert cube_sum_table(2).tolist() == [2, 2]


@pytest.mark.parametrize("p", [2, 5, 7, 11, 13, 19, 31, 37, 43])
def test_cube_sum_table_against_pairs(p):
    A = cube_sum_table(p)
    assert A.tolist() == brute_table(p)
    assert A.sum() == p * p
    if p % 3 == 2:
        assert (A == p).all()


@pytest.mark.parametrize("p,expected", [(2, 3), (7, 9), (13, 9)])
def test_count_E_examples(p, expected):
    assert count_E(p).projective_count == expected


@pytest.mark.parametrize("p", GOOD_PRIMES)
def test_count_E_methods_agree(p):
    table, brute = count_E(p), count_E(p, "brute")
    assert table.affine_cone_count == brute.affine_cone_count
    if p < 30:
        assert table.projective_count == len(brute_projective_E(p))
    n = table.projective_count
    if p % 3 == 2:
        assert n == p + 1
    assert (n - p - 1) ** 2 <= 4 * p


def test_count_V33_p2():
    r = count_V33(2)
    assert (r.affine_cone_count, r.projective_count) == (16, 15)


def test_count_V33_p5_closed_form():
    # brute force first; the closed form p^3+p^2+p+1 is only then trusted
    brute = count_V33(5, "brute")
    assert brute.projective_count == 5**3 + 5**2 + 5 + 1 == 156
    assert count_V33(5).projective_count == 156


@pytest.mark.parametrize("p", [2, 5, 7])
def test_count_V33_methods_agree(p):
    table, brute = count_V33(p), count_V33(p, "brute")
    assert table.affine_cone_count == brute.affine_cone_count
    assert table.projective_count == brute.projective_count


@pytest.mark.parametrize("p", [2, 5, 7])
def test_V33_projective_enumeration_matches_count(p):
    pts = enumerate_points(V33, p)
    assert len(pts) == count_V33(p).projective_count


def test_count_V33_divisibility_and_class():
    for p in [11, 13, 17, 19, 101, 211]:
        r = count_V33(p)
        assert (r.affine_cone_count - 1) % (p - 1) == 0
        if p % 3 == 2:
            assert r.projective_count == p**3 + p**2 + p + 1


@pytest.mark.parametrize("p,expected", [(2, 27), (7, 729), (13, 729)])
def test_count_E3(p, expected):
    assert count_E3(p) == expected


def test_p3_refused():
    for fn in (count_E, count_V33, count_E3):
        with pytest.raises(BadPrimeError):
            fn(3)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        enumerate_points(V33, 101, budget=10**6)
    with pytest.raises(BudgetExceeded):
        count_V33(31, "brute", budget=10**6)


def test_affine_patch_enumeration():
    pts = enumerate_points(E3_PATCH, 5)
    assert len(pts) == 5**3  # each factor x^3 + y^3 = -1 is a line when p = 2 mod 3
    assert all(E3_PATCH.contains(q, 5) for q in pts)


def test_count_report_divisibility_enforced():
    with pytest.raises(AssertionError):
        CountReport.from_cone(7, "E", 56, "table")


def test_large_prime_table_consistency():
    p = 1009
    A = cube_sum_table(p)
    assert A.sum() == p * p
    # A(t) depends only on the cubic class of t for t != 0
    g = next(x for x in range(2, p) if pow(x, (p - 1) // 3, p) != 1)
    for t in (1, 5, 17):
        assert A[t] == A[t * pow(g, 3, p) % p]
    assert math.isclose(np.mean(A[1:]), (p * p - A[0]) / (p - 1))
