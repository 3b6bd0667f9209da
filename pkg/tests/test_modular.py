import pytest

from cubicmap.finite_field import BadPrimeError
from cubicmap.modular import (
    F2,
    F4,
    CMDecomposition,
    EtaProductSpec,
    QSeries,
    ap_weight2,
    ap_weight4,
    cm_decompose,
    eta_expand,
    hecke_check,
    primes_upto,
    sign_class,
    support_violations,
)
from cubicmap.varieties import count_E

N = 300


def naive_eta_product(factors, N):
    """Multiply out prod (1 - q^(a n))^e factor by factor; no pentagonal shortcut."""
    c = [0] * (N + 1)
    c[0] = 1
    for a, e in factors:
        for n in range(1, N // a + 1):
            step = a * n
            for _ in range(e):
                for k in range(N, step - 1, -1):
                    c[k] -= c[k - step]
    lead = sum(a * e for a, e in factors) // 24
    return [0] * lead + c[: N + 1 - lead]


@pytest.fixture(scope="module")
def f4():
    return eta_expand(F4, N)


@pytest.fixture(scope="module")
def f2():
    return eta_expand(F2, N)


def test_eta_matches_naive_oracle(f2, f4):
    assert list(f4.coeffs) == naive_eta_product(F4.factors, N)
    assert list(f2.coeffs) == naive_eta_product(F2.factors, N)


def test_f4_spot_values(f4):
    assert (f4[1], f4[4], f4[7], f4[13]) == (1, -8, 20, -70)


def test_f2_spot_values(f2):
    assert f2[7] == -1 and f2[13] == 5


def test_support(f2, f4):
    assert support_violations(f4) == [] and support_violations(f2) == []
    assert all(f4[n] == 0 for n in range(N + 1) if n % 3 != 1)


def test_negative_exponent_inverse():
    # eta(t)^-1 eta(t) = q^0 series 1; partitions come out of the inverse
    s = eta_expand(EtaProductSpec(((1, 24), (1, -24))), 50)
    assert s.coeffs == (1,) + (0,) * 50
    from cubicmap.modular import euler_product

    partitions = euler_product(1, 12).inverse().coeffs
    assert partitions == (1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77)


def test_non_integral_leading_power_refused():
    with pytest.raises(ValueError):
        eta_expand(EtaProductSpec(((1, 1),)), 10)


def test_truncation_respected(f4):
    with pytest.raises(IndexError):
        f4[N + 1]
    short = eta_expand(F4, 10)
    assert short.bound == 10 and short.coeffs == f4.coeffs[:11]


def test_weights():
    assert F4.weight == 4 and F2.weight == 2
    assert F4.leading_power == 1 and F2.leading_power == 1


def brute_decompositions(p):
    return {(L, M) for M in range(1, 20) for L in range(0, 80) if L * L + 27 * M * M == 4 * p}


@pytest.mark.parametrize("p,absL,absM", [(7, 1, 1), (13, 5, 1), (31, 4, 2)])
def test_cm_decompose_examples(p, absL, absM):
    d = cm_decompose(p)
    assert (abs(d.L), abs(d.M)) == (absL, absM)
    assert brute_decompositions(p) == {(absL, absM)}


def test_cm_decompose_refuses_inert_primes():
    for p in (2, 5, 11, 9):
        with pytest.raises(BadPrimeError):
            cm_decompose(p)


def test_cm_decomposition_invariant():
    with pytest.raises(AssertionError):
        CMDecomposition(7, 2, 1)


def test_sign_normalization_calibrated_by_counting():
    assert sign_class() == (7 + 1 - count_E(7).projective_count) % 3
    for p in primes_upto(400):
        if p % 3 == 1:
            assert cm_decompose(p).L % 3 == sign_class()


@pytest.mark.parametrize("p,expected", [(2, 0), (7, -1), (13, 5)])
def test_ap_weight2_examples(p, expected):
    assert ap_weight2(p) == expected


@pytest.mark.parametrize("p,expected", [(7, 20), (13, -70), (2, 0)])
def test_ap_weight4_examples(p, expected, f4):
    assert ap_weight4(p) == expected == f4[p]


def test_ap_refuses_three():
    with pytest.raises(BadPrimeError):
        ap_weight2(3)
    with pytest.raises(BadPrimeError):
        ap_weight4(3)


def test_three_way_agreement(f2, f4):
    for p in primes_upto(N):
        if p == 3:
            continue
        trace = p + 1 - count_E(p).projective_count
        t = ap_weight2(p)
        assert f2[p] == trace == t
        assert f4[p] == ap_weight4(p) == t**3 - 3 * p * t
        assert t * t <= 4 * p and f4[p] ** 2 <= 4 * p**3


def test_hecke_examples(f2, f4):
    assert f4[4] == f4[2] ** 2 - 2**3 == -8
    assert f4[28] == f4[4] * f4[7] == -160
    assert f2[49] == f2[7] ** 2 - 7 == -6


def test_hecke_check_passes(f2, f4):
    r4 = hecke_check(f4, 4, level=9)
    r2 = hecke_check(f2, 2, level=27)
    assert r4.passed and r2.passed, r4.violations + r2.violations
    assert r4.checked > 100


def test_hecke_check_detects_tampering(f4):
    coeffs = list(f4.coeffs)
    coeffs[28] += 1
    rep = hecke_check(QSeries(tuple(coeffs)), 4)
    assert not rep.passed and any("a_28" in v for v in rep.violations)


def test_hecke_check_requires_enough_terms(f4):
    with pytest.raises(ValueError):
        hecke_check(f4, 4, N + 5)


def test_wrong_weight_is_caught(f4):
    assert not hecke_check(f4, 2).passed


def test_qseries_product_and_inverse():
    s = QSeries((1, 2, 3, 0, 5))
    one = s * s.inverse()
    assert one.coeffs == (1, 0, 0, 0, 0)
    assert s.power(0).coeffs == (1, 0, 0, 0, 0)
    assert s.power(2) == s * s
