import pytest
from hypothesis import assume, given, settings, strategies as st

from cubicmap.finite_field import BadPrimeError, PrimeField, is_prime, require_good_prime
from cubicmap.modular import primes_upto

SMALL_PRIMES = [p for p in primes_upto(200)]


def brute_cube_roots(a, p):
    return {x for x in range(p) if pow(x, 3, p) == a % p}


@pytest.mark.parametrize("p,a,e,expected", [(7, 3, 3, 6), (5, 2, 0, 1), (13, 1, 99, 1)])
def test_pow_examples(p, a, e, expected):
    F = PrimeField(p)
    assert (F(a) ** e).value == expected


def test_pow_zero_zero():
    assert (PrimeField(11)(0) ** 0).value == 1


@pytest.mark.parametrize("p,a,expected", [(7, 2, False), (7, 6, True), (5, 2, True)])
def test_is_cube_examples(p, a, expected):
    assert PrimeField(p)(a).is_cube() is expected


@pytest.mark.parametrize("p,a,expected", [(7, 6, {3, 5, 6}), (5, 2, {3}), (7, 0, {0})])
def test_cube_roots_examples(p, a, expected):
    assert {r.value for r in PrimeField(p)(a).cube_roots()} == expected


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_cube_roots_exhaustive(p):
    F = PrimeField(p)
    total = 0
    cubes = 0
    for a in range(p):
        roots = F.cube_roots(a)
        assert set(roots) == brute_cube_roots(a, p)
        assert F.is_cube(a) == bool(roots)
        total += len(roots)
        cubes += F.is_cube(a)
    assert total == p
    if p % 3 == 1:
        assert cubes == (p - 1) // 3 + 1
    elif p != 3:
        assert cubes == p


@pytest.mark.parametrize("p", [10009, 10007, 100003, 17497, 39367, 5314411, 258280327, 2147483629])
def test_large_prime_cube_roots(p):
    F = PrimeField(p)
    for a in (2, 5, 123456, p - 1):
        roots = F.cube_roots(a)
        assert all(pow(r, 3, p) == a % p for r in roots)
        assert len(roots) == (1 if p % 3 == 2 else (3 if F.is_cube(a) else 0))


@settings(max_examples=200)
@given(st.integers(min_value=1, max_value=10**9), st.sampled_from([17497, 5314411, 258280327]))
def test_sylow_cube_root_on_cubes(x, p):
    # 3^7, 3^12 and 3^17 divide p - 1: deep Sylow-3 subgroups
    assume(x % p)
    F = PrimeField(p)
    a = pow(x, 3, p)
    roots = F.cube_roots(a)
    assert x % p in roots and len(roots) == 3


def test_primality():
    assert [n for n in range(60) if is_prime(n)] == primes_upto(59)
    assert is_prime(2147483647)
    assert not is_prime(2147483647 * 3)


def test_field_rejects_composites_and_large():
    with pytest.raises(BadPrimeError):
        PrimeField(15)
    with pytest.raises(BadPrimeError):
        PrimeField(2**31 + 11)


def test_three_allowed_in_field_but_refused_for_varieties():
    F = PrimeField(3)
    assert (F(2) * F(2)).value == 1
    with pytest.raises(BadPrimeError):
        require_good_prime(3)


def test_element_arithmetic():
    F = PrimeField(13)
    a, b = F(5), F(9)
    assert (a + b).value == 1 and (a - b).value == 9 and (a * b).value == 6
    assert (a / b * b) == a
    assert (-a).value == 8
    with pytest.raises(ZeroDivisionError):
        a / F(0)
    with pytest.raises(ValueError):
        a + PrimeField(7)(1)
