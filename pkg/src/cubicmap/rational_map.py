"""The cubic map E^3 --> V33: forward evaluation, fibers over F_p, and census.

On the affine pieces (X2 != 0 on each factor of E^3, X3 != 0 on V33) the map
is the substitution

    X0 -> -x1*y3,  X1 -> -y1*y3,  X2 -> x3,  X4 -> -x2*y3,  X5 -> -y2*y3.

Given a target point, y3 is pinned down by y3^3 = -(X2^3 + 1) and everything
else is then linear in 1/y3, so fibers are enumerated via cube roots.
Targets with X2^3 + 1 = 0 would need y3 = 0 and are reported as undefined.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .finite_field import PrimeField, require_good_prime
from .groebner import MembershipReport, buchberger, membership_row
from .polynomial import MapSpec, MultiPoly, PolyRing
from .varieties import (
    E3_PATCH,
    E_PATCH,
    V33,
    V33_PATCH,
    NotOnVariety,
    enumerate_points,
)

AFFINE_ASSIGNMENTS = {
    "X0": "-x1*y3",
    "X1": "-y1*y3",
    "X2": "x3",
    "X4": "-x2*y3",
    "X5": "-y2*y3",
}

SOURCE_VARS = E3_PATCH.variables  # x1 y1 x2 y2 x3 y3
TARGET_VARS = V33_PATCH.variables  # X0 X1 X2 X4 X5


def affine_map(**overrides: str) -> MapSpec:
    """The map on affine patches; keyword overrides replace single assignments."""
    spec = MapSpec.from_text(E3_PATCH.ring, V33_PATCH.ring, AFFINE_ASSIGNMENTS)
    return spec.replace(**overrides) if overrides else spec


class MapError(AssertionError):
    """A forward image failed to land on V33."""


def forward(src: Sequence[int], p: int, m: MapSpec | None = None) -> tuple[int, ...]:
    """Image of an E^3 patch point (x1, y1, x2, y2, x3, y3) on the V33 patch."""
    p = require_good_prime(p)
    m = m or affine_map()
    src = tuple(int(v) % p for v in src)
    if not E3_PATCH.contains(src, p):
        raise NotOnVariety(f"{src} is not on the E^3 patch mod {p}")
    image = m.apply_mod_p(dict(zip(SOURCE_VARS, src)), PrimeField(p))
    target = tuple(image[v] for v in TARGET_VARS)
    if not V33_PATCH.contains(target, p):
        raise MapError(f"image {target} of {src} is not on V33 mod {p}")
    return target


def _on_e3_patch(q: Sequence[int], p: int) -> bool:
    x1, y1, x2, y2, x3, y3 = q
    return all((x**3 + y**3 + 1) % p == 0 for x, y in ((x1, y1), (x2, y2), (x3, y3)))


def _on_v33_patch(t: Sequence[int], p: int) -> bool:
    X0, X1, X2, X4, X5 = t
    s = X2**3 + 1
    return (X0**3 + X1**3 + s) % p == 0 and (s + X4**3 + X5**3) % p == 0


def _forward_fast(src: Sequence[int], p: int) -> tuple[int, ...]:
    x1, y1, x2, y2, x3, y3 = src
    return (-x1 * y3 % p, -y1 * y3 % p, x3 % p, -x2 * y3 % p, -y2 * y3 % p)


@dataclass(frozen=True)
class Fiber:
    base: tuple[int, ...]
    preimages: tuple[tuple[int, ...], ...]
    defined: bool

    @property
    def size(self) -> int:
        return len(self.preimages)


def fiber(target: Sequence[int], p: int, m: MapSpec | None = None) -> Fiber:
    """F_p-rational preimages of a V33 patch point (X0, X1, X2, X4, X5).

    Each candidate is pushed forward again and kept only if it lies on E^3 and
    hits ``target``; nothing about the algebra is taken on trust.
    """
    p = require_good_prime(p)
    field_ = PrimeField(p)
    target = tuple(int(v) % p for v in target)
    if not _on_v33_patch(target, p):
        raise NotOnVariety(f"{target} is not on the V33 patch mod {p}")
    X0, X1, X2, X4, X5 = target
    c = (X2**3 + 1) % p
    if c == 0:
        return Fiber(target, (), False)
    preimages = []
    for y3 in sorted(field_.cube_roots(-c)):
        inv = field_.inv(y3)
        q = (-X0 * inv % p, -X1 * inv % p, -X4 * inv % p, -X5 * inv % p, X2, y3)
        if not _on_e3_patch(q, p):
            continue
        if m is None:
            image = _forward_fast(q, p)
        else:
            image = tuple(m.apply_mod_p(dict(zip(SOURCE_VARS, q)), field_)[v] for v in TARGET_VARS)
        if image == target:
            preimages.append(q)
    return Fiber(target, tuple(preimages), True)


@dataclass
class CensusReport:
    p: int
    targets_total: int
    undefined: int
    sizes: Counter
    source_total: int
    source_matched: int
    source_on_exceptional: int
    fiber_sum: int

    @property
    def conserved(self) -> bool:
        return self.fiber_sum == self.source_matched

    @property
    def defined(self) -> int:
        return self.targets_total - self.undefined

    @property
    def fraction_size3(self) -> float:
        return self.sizes.get(3, 0) / self.defined if self.defined else 0.0

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "targets_total": self.targets_total,
            "undefined": self.undefined,
            "fiber0": self.sizes.get(0, 0),
            "fiber1": self.sizes.get(1, 0),
            "fiber3": self.sizes.get(3, 0),
            "source_matched": self.source_matched,
            "conserved": self.conserved,
        }


def fiber_census(p: int, budget: int | None = None) -> CensusReport:
    """Fiber sizes over every F_p-point of the V33 patch.

    ``source_matched`` counts E^3 patch points with y3 != 0, i.e. the domain of
    definition; those with y3 = 0 land on the undefined locus X2^3 + 1 = 0 and
    are tallied separately.
    """
    p = require_good_prime(p)
    targets = enumerate_points(V33_PATCH, p, budget)
    sizes: Counter = Counter()
    undefined = 0
    fiber_sum = 0
    for t in targets:
        f = fiber(t, p)
        if not f.defined:
            undefined += 1
            continue
        if f.size not in (0, 1, 3):
            raise AssertionError(f"fiber of size {f.size} over {t}")
        sizes[f.size] += 1
        fiber_sum += f.size

    curve = enumerate_points(E_PATCH, p, budget)
    target_set = set(targets)
    source_total = len(curve) ** 3
    matched = exceptional = 0
    for a in curve:
        for b in curve:
            for c in curve:
                src = a + b + c
                image = _forward_fast(src, p)
                if image not in target_set:
                    raise MapError(f"image of {src} is off the V33 patch")
                if c[1] == 0:
                    exceptional += 1
                else:
                    matched += 1
    return CensusReport(p, len(targets), undefined, sizes, source_total, matched,
                        exceptional, fiber_sum)


# ---------------------------------------------------------------------------
# homogenized form

TRI_RING = PolyRing(("x1", "y1", "z1", "x2", "y2", "z2", "x3", "y3", "z3"))
P5_RING = V33.ring

HOMOGENEOUS_ASSIGNMENTS = {
    "X0": "-x1*y3*z2",
    "X1": "-y1*y3*z2",
    "X2": "x3*z1*z2",
    "X3": "z1*z2*z3",
    "X4": "-x2*y3*z1",
    "X5": "-y2*y3*z1",
}

TRI_IDEAL = tuple(TRI_RING.parse(f"x{i}^3 + y{i}^3 + z{i}^3") for i in (1, 2, 3))


def homogenize_map(**overrides: str) -> MapSpec:
    """Six tri-degree (1,1,1) forms obtained by clearing denominators."""
    spec = MapSpec.from_text(TRI_RING, P5_RING, HOMOGENEOUS_ASSIGNMENTS)
    return spec.replace(**overrides) if overrides else spec


def tridegree(f: MultiPoly) -> set[tuple[int, int, int]]:
    out = set()
    for mono in f.terms:
        out.add(tuple(sum(mono[3 * k: 3 * k + 3]) for k in range(3)))
    return out


@dataclass
class HomogenizedReport:
    membership: MembershipReport
    tridegrees_ok: bool
    restriction: dict[str, tuple[str, str]] = field(default_factory=dict)

    @property
    def restriction_ok(self) -> bool:
        return all(a == b for a, b in self.restriction.values())

    @property
    def passed(self) -> bool:
        return self.membership.passed and self.tridegrees_ok and self.restriction_ok

    def as_dict(self) -> dict:
        return {
            "check": "homogenized_map",
            "passed": self.passed,
            "tridegrees_ok": self.tridegrees_ok,
            "restriction_ok": self.restriction_ok,
            "restriction": {k: {"restricted": a, "affine": b} for k, (a, b) in self.restriction.items()},
            "rows": [r.as_dict() for r in self.membership.rows],
        }


def check_homogenized(hmap: MapSpec | None = None, affine: MapSpec | None = None) -> HomogenizedReport:
    hmap = hmap or homogenize_map()
    affine = affine or affine_map()
    gb = buchberger(TRI_IDEAL)
    rows = [membership_row(g, hmap.pullback(g), gb) for g in V33.equations]
    degs_ok = all(tridegree(f) == {(1, 1, 1)} for f in hmap.assignments.values())

    # z_i = 1 makes X3 = 1 identically, so no division is needed
    ones = {"z1": 1, "z2": 1, "z3": 1}
    x3 = hmap.assignments["X3"].substitute(ones)
    restriction = {}
    for v in TARGET_VARS:
        restricted = _to_patch_ring(hmap.assignments[v].substitute(ones))
        restriction[v] = (str(restricted), str(affine.assignments[v]))
    restriction["X3"] = (str(x3), "1")
    return HomogenizedReport(MembershipReport("homogenized_map", rows), degs_ok, restriction)


def _to_patch_ring(f: MultiPoly) -> MultiPoly:
    if f.variables_used() & {"z1", "z2", "z3"}:
        raise ValueError(f"{f} still depends on z")
    return E3_PATCH.ring.parse(str(f))


def is_indeterminate(point: Sequence[int], p: int, hmap: MapSpec | None = None) -> bool:
    """True when all six homogeneous forms vanish at a point of (P^2)^3."""
    hmap = hmap or homogenize_map()
    values = hmap.apply_mod_p(dict(zip(TRI_RING.variables, point)), PrimeField(p))
    return all(v == 0 for v in values.values())

