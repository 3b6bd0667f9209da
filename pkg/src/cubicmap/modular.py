"""Eta products, CM coefficients over Q(sqrt(-3)), and Hecke-structure checks.

Two eta products matter:

* ``F4 = eta(3 tau)^8``, weight 4, level 9;
* ``F2 = eta(3 tau)^2 eta(9 tau)^2``, weight 2, level 27, attached to the
  Fermat cubic.

For a split prime p = 1 (mod 3) the Frobenius of E is an element pi of Z[w]
with pi * conj(pi) = p; its trace t satisfies 4p = t^2 + 27 M^2, and the
weight-4 coefficient is pi^3 + conj(pi)^3 = t^3 - 3 p t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .finite_field import BadPrimeError, is_prime, require_good_prime

DEFAULT_BOUND = 1000


@dataclass(frozen=True)
class QSeries:
    """Truncated q-expansion sum_{n <= N} a_n q^n with exact integer coefficients."""

    coeffs: tuple[int, ...]  # coeffs[n] = a_n for 0 <= n <= N

    @property
    def bound(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        if not 0 <= n <= self.bound:
            raise IndexError(f"a_{n} is beyond the truncation bound {self.bound}")
        return self.coeffs[n]

    def __mul__(self, other: QSeries) -> QSeries:
        N = min(self.bound, other.bound)
        a, b = self.coeffs, other.coeffs
        nz = [(j, c) for j, c in enumerate(b[: N + 1]) if c]
        out = [0] * (N + 1)
        for i in range(N + 1):
            ai = a[i]
            if ai:
                for j, c in nz:
                    if i + j > N:
                        break
                    out[i + j] += ai * c
        return QSeries(tuple(out))

    def shift(self, k: int) -> QSeries:
        """Multiply by q^k, keeping the bound."""
        N = self.bound
        return QSeries(tuple([0] * k + list(self.coeffs[: N + 1 - k]))[: N + 1])

    def inverse(self) -> QSeries:
        a = self.coeffs
        if a[0] not in (1, -1):
            raise ValueError("only series with unit constant term are invertible over Z")
        N = self.bound
        nz = [(j, c) for j, c in enumerate(a) if c and j]
        out = [0] * (N + 1)
        out[0] = a[0]
        for n in range(1, N + 1):
            s = 0
            for j, c in nz:
                if j > n:
                    break
                s += c * out[n - j]
            out[n] = -s * a[0]
        return QSeries(tuple(out))

    def power(self, e: int) -> QSeries:
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = QSeries((1,) + (0,) * self.bound)
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result


@lru_cache(maxsize=None)
def euler_product(scale: int, N: int) -> QSeries:
    """prod_{n >= 1} (1 - q^(scale*n)) to order q^N, via pentagonal numbers."""
    out = [0] * (N + 1)
    k = 0
    while True:
        hit = False
        for kk in ((k,) if k == 0 else (k, -k)):
            g = kk * (3 * kk - 1) // 2 * scale
            if g <= N:
                out[g] += -1 if kk % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return QSeries(tuple(out))


@dataclass(frozen=True)
class EtaProductSpec:
    """prod eta(a tau)^e, listed as (a, e) pairs."""

    factors: tuple[tuple[int, int], ...]
    name: str = ""

    @property
    def leading_power(self) -> Fraction:
        return sum((Fraction(a * e, 24) for a, e in self.factors), Fraction(0))

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.factors), 2)


F4 = EtaProductSpec(((3, 8),), "eta(3t)^8")
F2 = EtaProductSpec(((3, 2), (9, 2)), "eta(3t)^2 eta(9t)^2")


def eta_expand(spec: EtaProductSpec, N: int = DEFAULT_BOUND) -> QSeries:
    if N < 1:
        raise ValueError("truncation bound must be at least 1")
    lead = spec.leading_power
    if lead.denominator != 1 or lead < 0:
        raise ValueError(f"leading power {lead} is not a non-negative integer")
    lead = int(lead)
    series = QSeries((1,) + (0,) * N)
    for a, e in spec.factors:
        if a < 1:
            raise ValueError(f"bad eta scale {a}")
        series = series * euler_product(a, N).power(e)
    return series.shift(lead)


# ---------------------------------------------------------------------------
# CM side

@dataclass(frozen=True)
class CMDecomposition:
    p: int
    L: int
    M: int

    def __post_init__(self):
        if 4 * self.p != self.L**2 + 27 * self.M**2:
            raise AssertionError(f"4*{self.p} != {self.L}^2 + 27*{self.M}^2")


def _raw_decomposition(p: int) -> tuple[int, int]:
    for M in range(1, math.isqrt(4 * p // 27) + 1):
        r = 4 * p - 27 * M * M
        L = math.isqrt(r)
        if L * L == r:
            return L, M
    raise AssertionError(f"no representation 4*{p} = L^2 + 27 M^2")


@lru_cache(maxsize=None)
def sign_class() -> int:
    """Residue of the normalized L mod 3, calibrated at p = 7 against #E(F_7).

    Counting points on the curve fixes the sign of the trace at the smallest
    split prime; the class of that trace mod 3 then fixes the sign elsewhere.
    """
    from .varieties import count_E

    p = 7
    L, _ = _raw_decomposition(p)
    trace = p + 1 - count_E(p).projective_count
    if abs(trace) != L:
        raise AssertionError(f"#E(F_7) gives trace {trace}, expected +-{L}")
    return trace % 3


def cm_decompose(p: int) -> CMDecomposition:
    """4p = L^2 + 27 M^2 with L in the calibrated class mod 3 and M > 0."""
    if not is_prime(p) or p % 3 != 1:
        raise BadPrimeError(f"{p} is not a prime congruent to 1 mod 3")
    L, M = _raw_decomposition(p)
    # L^2 = 4p = 1 (mod 3), so exactly one of +-L lands in the class
    if L % 3 != sign_class():
        L = -L
    return CMDecomposition(p, L, M)


def ap_weight2(p: int) -> int:
    p = require_good_prime(p)
    if p % 3 == 2:
        return 0
    return cm_decompose(p).L


def ap_weight4(p: int) -> int:
    t = ap_weight2(p)
    return t**3 - 3 * p * t


# ---------------------------------------------------------------------------
# Hecke structure

def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i:: i] = bytearray(len(sieve[i * i:: i]))
    return [i for i, v in enumerate(sieve) if v]


@dataclass
class HeckeReport:
    weight: int
    bound: int
    level: int
    violations: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations


def hecke_check(series: QSeries, weight: int, N: int | None = None, level: int = 9) -> HeckeReport:
    """Multiplicativity on coprime indices and the prime-power recursion up to N.

    For p dividing the level the recursion degenerates to a_{p^(r+1)} = a_p a_{p^r}.
    """
    N = series.bound if N is None else N
    if N > series.bound:
        raise ValueError(f"series is truncated at {series.bound} < {N}")
    a = series.coeffs
    rep = HeckeReport(weight, N, level)
    if a[1] != 1:
        rep.violations.append(f"a_1 = {a[1]}, expected 1")
    for m in range(2, N + 1):
        for n in range(m + 1, N // m + 1):
            if math.gcd(m, n) == 1:
                rep.checked += 1
                if a[m * n] != a[m] * a[n]:
                    rep.violations.append(f"a_{m * n} = {a[m * n]} != a_{m} a_{n} = {a[m] * a[n]}")
    for p in primes_upto(math.isqrt(N)):
        eps = 0 if level % p == 0 else p ** (weight - 1)
        prev, cur = 1, a[p]
        q = p
        while q * p <= N:
            expected = a[p] * cur - eps * prev
            rep.checked += 1
            if a[q * p] != expected:
                rep.violations.append(f"a_{q * p} = {a[q * p]} != {expected} (prime-power recursion at {p})")
            prev, cur = cur, a[q * p]
            q *= p
    return rep


def support_violations(series: QSeries) -> list[int]:
    """Indices n not congruent to 1 mod 3 with a_n != 0."""
    return [n for n, c in enumerate(series.coeffs) if c and n % 3 != 1]


# ---------------------------------------------------------------------------
# per-prime identity table

@dataclass(frozen=True)
class APRow:
    p: int
    ap_w2: int
    ap_w4: int
    eta_w2: int
    eta_w4: int
    count_trace: int

    @property
    def residue_mod_3(self) -> int:
        return self.p % 3

    @property
    def identity_ok(self) -> bool:
        return (
            self.eta_w2 == self.count_trace == self.ap_w2
            and self.eta_w4 == self.ap_w4 == self.ap_w2**3 - 3 * self.p * self.ap_w2
        )

    @property
    def bounds_ok(self) -> bool:
        p = self.p
        # |a| <= 2 p^((k-1)/2), compared in integers
        return self.eta_w2**2 <= 4 * p and self.eta_w4**2 <= 4 * p**3

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "residue_mod_3": self.residue_mod_3,
            "ap_w2": self.ap_w2,
            "ap_w4": self.ap_w4,
            "identity_ok": self.identity_ok,
        }


def ap_row(p: int, f2: QSeries, f4: QSeries) -> APRow:
    from .varieties import count_E

    p = require_good_prime(p)
    trace = p + 1 - count_E(p).projective_count
    return APRow(p, ap_weight2(p), ap_weight4(p), f2[p], f4[p], trace)
