"""Prime fields F_p with the cubic-residue structure used by the counting code."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

MAX_PRIME = 2**31

# exhaustive search below this bound, Sylow-3 discrete log above it
_BRUTE_CUBE_ROOT_LIMIT = 10_000

_MR_BASES = (2, 3, 5, 7, 11, 13, 17)


class BadPrimeError(ValueError):
    """Raised when a modulus is not an admissible prime."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.4e14."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_good_prime(p: int) -> int:
    """Validate a prime for the cubic-variety code, which needs p != 3."""
    p = int(p)
    if not (2 <= p < MAX_PRIME) or not is_prime(p):
        raise BadPrimeError(f"{p} is not a prime below 2^31")
    if p == 3:
        raise BadPrimeError("p = 3 is a prime of bad reduction and is refused")
    return p


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not (2 <= self.p < MAX_PRIME) or not is_prime(self.p):
            raise BadPrimeError(f"{self.p} is not a prime below 2^31")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value % self.p, self)

    def __repr__(self):
        return f"GF({self.p})"

    @property
    def elements(self):
        return (FieldElement(v, self) for v in range(self.p))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        # Python's pow gives 0**0 == 1, which is the convention we want
        return pow(a % self.p, e, self.p)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(a, -1, self.p)

    @cached_property
    def cube_roots_of_unity(self) -> tuple[int, ...]:
        p = self.p
        if p % 3 != 1:
            return (1,)
        for g in range(2, p):
            w = pow(g, (p - 1) // 3, p)
            if w != 1:
                return tuple(sorted((1, w, w * w % p)))
        raise AssertionError("unreachable for p = 1 mod 3")

    def is_cube(self, a: int) -> bool:
        p = self.p
        a %= p
        if a == 0 or p % 3 != 1:
            return True
        return pow(a, (p - 1) // 3, p) == 1

    def cube_roots(self, a: int) -> frozenset[int]:
        """All x in F_p with x^3 == a."""
        p = self.p
        a %= p
        if a == 0:
            return frozenset({0})
        if p % 3 != 1:
            if p == 3:
                return frozenset({a})  # Frobenius is the identity on F_3
            # 3 is invertible mod p - 1, so cubing is a bijection
            return frozenset({pow(a, pow(3, -1, p - 1), p)})
        if not self.is_cube(a):
            return frozenset()
        if p < _BRUTE_CUBE_ROOT_LIMIT:
            r = next(x for x in range(1, p) if x * x * x % p == a)
        else:
            r = self._sylow_cube_root(a)
        return frozenset(r * w % p for w in self.cube_roots_of_unity)

    def _sylow_cube_root(self, a: int) -> int:
        # Write p - 1 = 3^s * t with 3 not dividing t, and take x0 = a^(3^-1 mod t).
        # Then x0^3 = a * b where b lies in the cyclic Sylow-3 subgroup; solve
        # y^3 = b^-1 there by a base-3 discrete log against a generator.
        p = self.p
        t, s = p - 1, 0
        while t % 3 == 0:
            t //= 3
            s += 1
        x0 = pow(a, pow(3, -1, t), p) if t > 1 else 1
        w = pow(x0, 3, p) * pow(a, -1, p) % p
        w = pow(w, -1, p)  # need y with y^3 = w
        z = next(z for z in range(2, p) if pow(z, (p - 1) // 3, p) != 1)
        g = pow(z, t, p)  # generator of the Sylow-3 subgroup, order 3^s
        order = 3**s
        h = pow(g, order // 3, p)  # primitive cube root of unity
        k = 0
        for i in range(s):
            # digit i of log_g(w)
            rem = w * pow(g, -k, p) % p
            probe = pow(rem, order // 3 ** (i + 1), p)
            digit = next(d for d in range(3) if pow(h, d, p) == probe)
            k += digit * 3**i
        if k % 3:
            raise AssertionError("Sylow component is not a cube")
        y = pow(g, k // 3, p)
        root = x0 * y % p
        assert root * root * root % p == a
        return root


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.field.p}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self.field(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self.field(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self.field(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self.field(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self.field(-self.value)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.field(self.value * self.field.inv(o))

    def __pow__(self, e: int):
        return FieldElement(self.field.pow(self.value, e), self.field)

    def __int__(self):
        return self.value

    def __str__(self):
        return str(self.value)

    def is_cube(self) -> bool:
        return self.field.is_cube(self.value)

    def cube_roots(self) -> frozenset[FieldElement]:
        return frozenset(FieldElement(r, self.field) for r in self.field.cube_roots(self.value))
