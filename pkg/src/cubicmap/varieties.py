"""The Fermat cubic E, its cube E^3, the threefold V33, and point counts over F_p.

Fast counts go through the distribution table A(t) = #{(u, v) : u^3 + v^3 = t}.
Both the projective curve and V33 reduce to short sums over A, so one O(p^2)
table build serves every count for a given prime.  Brute-force enumeration
(vectorized with numpy) stays around as the oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .finite_field import PrimeField, require_good_prime
from .polynomial import MultiPoly, PolyRing

DEFAULT_BUDGET = 10**8

# vectorized chunk size for brute-force enumeration
_CHUNK = 1 << 20


class BudgetExceeded(RuntimeError):
    """The requested enumeration is larger than the configured budget."""


class NotOnVariety(ValueError):
    pass


@dataclass(frozen=True)
class VarietySpec:
    name: str
    ring: PolyRing
    equations: tuple[MultiPoly, ...]
    projective: bool

    def __post_init__(self):
        for f in self.equations:
            if f.ring != self.ring:
                raise ValueError(f"equation {f} is not in {self.ring!r}")
            if self.projective and not f.is_homogeneous():
                raise ValueError(f"projective equation {f} is not homogeneous")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ring.variables

    def contains(self, point: Sequence[int], p: int) -> bool:
        field = PrimeField(p)
        assignment = dict(zip(self.variables, point))
        return all(f.eval_mod_p(assignment, field).value == 0 for f in self.equations)

    def search_space(self, p: int) -> int:
        n = self.ring.nvars
        if self.projective:
            return (p**n - 1) // (p - 1)
        return p**n


def _spec(name, variables, equations, projective):
    ring = PolyRing(variables)
    return VarietySpec(name, ring, tuple(ring.parse(e) for e in equations), projective)


E = _spec("E", ("X0", "X1", "X2"), ["X0^3 + X1^3 + X2^3"], True)
E_PATCH = _spec("E_patch", ("x", "y"), ["x^3 + y^3 + 1"], False)
E3_PATCH = _spec(
    "E3_patch",
    ("x1", "y1", "x2", "y2", "x3", "y3"),
    ["x1^3 + y1^3 + 1", "x2^3 + y2^3 + 1", "x3^3 + y3^3 + 1"],
    False,
)
V33 = _spec(
    "V33",
    ("X0", "X1", "X2", "X3", "X4", "X5"),
    ["X0^3 + X1^3 + X2^3 + X3^3", "X2^3 + X3^3 + X4^3 + X5^3"],
    True,
)
V33_PATCH = _spec(
    "V33_patch",
    ("X0", "X1", "X2", "X4", "X5"),
    ["X0^3 + X1^3 + X2^3 + 1", "X2^3 + 1 + X4^3 + X5^3"],
    False,
)

BY_NAME = {v.name: v for v in (E, E_PATCH, E3_PATCH, V33, V33_PATCH)}


@dataclass(frozen=True, order=True)
class ProjectivePoint:
    """Point of P^n(F_p), normalized so the last nonzero coordinate is 1."""

    coords: tuple[int, ...]
    p: int

    @classmethod
    def normalize(cls, coords: Sequence[int], p: int) -> ProjectivePoint:
        coords = [c % p for c in coords]
        nz = [i for i, c in enumerate(coords) if c]
        if not nz:
            raise ValueError("the zero vector is not a projective point")
        inv = pow(coords[nz[-1]], -1, p)
        return cls(tuple(c * inv % p for c in coords), p)

    @property
    def elements(self):
        field = PrimeField(self.p)
        return tuple(field(c) for c in self.coords)


# ---------------------------------------------------------------------------
# vectorized brute force

class _CompiledSystem:
    """Equations turned into power-table lookups for numpy evaluation mod p."""

    def __init__(self, equations: Sequence[MultiPoly], p: int):
        self.p = p
        maxdeg = max((max(m, default=0) for f in equations for m in f.terms), default=0)
        base = np.arange(p, dtype=np.int64)
        self.powers = [np.ones(p, dtype=np.int64)]
        for _ in range(maxdeg):
            self.powers.append(self.powers[-1] * base % p)
        field = PrimeField(p)
        self.systems = []
        for f in equations:
            terms = []
            for m, c in f.terms.items():
                cm = f.ring.const(c).eval_mod_p({}, field).value
                terms.append((cm, [(i, e) for i, e in enumerate(m) if e]))
            self.systems.append(terms)

    def mask(self, cols: Sequence[np.ndarray | int]) -> np.ndarray | bool:
        p = self.p
        ok = True
        for terms in self.systems:
            total = 0
            for c, factors in terms:
                t = c
                for i, e in factors:
                    t = t * self.powers[e][cols[i]] % p
                total = total + t
            ok = ok & (np.asarray(total) % p == 0)
        return ok


def _grid(n_free: int, p: int) -> Iterator[tuple[tuple[int, ...], list[np.ndarray]]]:
    """Yield (outer prefix, vectorized suffix columns) covering F_p^n_free."""
    k = 0
    while k < n_free and p ** (k + 1) <= _CHUNK:
        k += 1
    k = max(k, 1) if n_free else 0
    inner = [a.ravel() for a in np.meshgrid(*([np.arange(p, dtype=np.int64)] * k), indexing="ij")]
    for prefix in itertools.product(range(p), repeat=n_free - k):
        yield prefix, inner


def _solutions(spec: VarietySpec, p: int, fixed_tail: tuple[int, ...] = ()) -> Iterator[np.ndarray]:
    """Yield arrays of solutions (rows) with the last coordinates fixed."""
    system = _CompiledSystem(spec.equations, p)
    n_free = spec.ring.nvars - len(fixed_tail)
    for prefix, inner in _grid(n_free, p):
        size = inner[0].size if inner else 1
        cols = [np.full(size, v, dtype=np.int64) for v in prefix] + list(inner)
        cols += [np.full(size, v, dtype=np.int64) for v in fixed_tail]
        m = system.mask(cols)
        m = np.broadcast_to(m, (size,))
        if m.any():
            yield np.stack(cols, axis=1)[m]


def _check_budget(size: int, budget: int | None):
    budget = DEFAULT_BUDGET if budget is None else budget
    if size > budget:
        raise BudgetExceeded(f"search space {size} exceeds budget {budget}")


def enumerate_points(spec: VarietySpec, p: int, budget: int | None = None) -> list:
    """All F_p-points: tuples for affine specs, normalized ProjectivePoints otherwise."""
    PrimeField(p)
    _check_budget(spec.search_space(p), budget)
    n = spec.ring.nvars
    if not spec.projective:
        return [tuple(int(v) for v in row) for block in _solutions(spec, p) for row in block]
    points = []
    # last nonzero coordinate at position j, scaled to 1
    for j in range(n):
        tail = (1,) + (0,) * (n - 1 - j)
        for block in _solutions(spec, p, tail):
            points.extend(ProjectivePoint(tuple(int(v) for v in row), p) for row in block)
    return sorted(points)


def count_affine_solutions(spec: VarietySpec, p: int, budget: int | None = None) -> int:
    """#{x in F_p^n : all equations vanish}, by exhaustive search."""
    PrimeField(p)
    _check_budget(p**spec.ring.nvars, budget)
    return sum(len(block) for block in _solutions(spec, p))


# ---------------------------------------------------------------------------
# table method

def cube_counts(p: int) -> np.ndarray:
    """C[c] = #{x : x^3 = c} for c in F_p."""
    x = np.arange(p, dtype=np.int64)
    return np.bincount(x * x % p * x % p, minlength=p)


def cube_sum_table(p: int) -> np.ndarray:
    """A[t] = #{(u, v) in F_p^2 : u^3 + v^3 = t}."""
    PrimeField(p)
    C = cube_counts(p)
    A = np.zeros(p, dtype=np.int64)
    # A[t] = sum_u C[t - u^3]: one cyclic shift of C per u
    for u in range(p):
        s = u * u * u % p
        if s:
            A[s:] += C[: p - s]
            A[:s] += C[p - s:]
        else:
            A += C
    return A


@dataclass(frozen=True)
class CountReport:
    p: int
    variety: str
    affine_cone_count: int
    projective_count: int
    method: str

    def __post_init__(self):
        if self.method not in ("brute", "table"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.affine_cone_count - 1 != self.projective_count * (self.p - 1):
            raise AssertionError(f"cone/projective mismatch in {self}")

    @classmethod
    def from_cone(cls, p: int, variety: str, cone: int, method: str) -> CountReport:
        q, r = divmod(cone - 1, p - 1)
        if r:
            raise AssertionError(f"affine cone count {cone} - 1 not divisible by {p - 1}")
        return cls(p, variety, cone, q, method)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "variety": self.variety,
            "method": self.method,
            "affine_cone": self.affine_cone_count,
            "projective": self.projective_count,
        }


def count_E(p: int, method: str = "table", table: np.ndarray | None = None,
            budget: int | None = None) -> CountReport:
    p = require_good_prime(p)
    if method == "brute":
        return CountReport.from_cone(p, "E", count_affine_solutions(E, p, budget), "brute")
    if method != "table":
        raise ValueError(f"unknown method {method!r}")
    A = cube_sum_table(p) if table is None else table
    z = np.arange(p, dtype=np.int64)
    cone = int(A[(-(z * z % p * z)) % p].sum())
    return CountReport.from_cone(p, "E", cone, "table")


def count_V33(p: int, method: str = "table", table: np.ndarray | None = None,
              budget: int | None = None) -> CountReport:
    p = require_good_prime(p)
    if method == "brute":
        return CountReport.from_cone(p, "V33", count_affine_solutions(V33, p, budget), "brute")
    if method != "table":
        raise ValueError(f"unknown method {method!r}")
    A = cube_sum_table(p) if table is None else table
    # t = X2^3 + X3^3 decouples (X0, X1) and (X4, X5): N = sum_t A(t) A(-t)^2
    a = A.tolist()
    cone = sum(a[t] * a[-t % p] ** 2 for t in range(p))
    return CountReport.from_cone(p, "V33", cone, "table")


def count_E3(p: int) -> int:
    return count_E(p).projective_count ** 3
