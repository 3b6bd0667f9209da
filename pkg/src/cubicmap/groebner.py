"""Buchberger's algorithm over Q and the membership certificates for the map.

The engine is general (any ideal, grevlex or lex), although the ideals that
matter here are generated by three Fermat relations in disjoint variables.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .polynomial import MapSpec, Monomial, MultiPoly, PolyRing, grevlex_key


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grevlex"
    variables: tuple[str, ...] | None = None  # priority; None means ring order

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key_function(self, ring: PolyRing):
        if self.variables is None:
            perm = tuple(range(ring.nvars))
        else:
            if sorted(self.variables) != sorted(ring.variables):
                raise ValueError("order priority must list exactly the ring variables")
            perm = tuple(ring.index[v] for v in self.variables)
        if self.kind == "lex":
            return lambda m: tuple(m[i] for i in perm)
        return lambda m: grevlex_key(tuple(m[i] for i in perm))


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _quot(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


class _Poly:
    """Working polynomial for reduction: Fraction coefficients and a cached leader."""

    __slots__ = ("terms", "key", "lm")

    def __init__(self, terms: dict, key):
        self.terms = {m: c for m, c in terms.items() if c}
        self.key = key
        self.lm = max(self.terms, key=key) if self.terms else None

    @property
    def lc(self):
        return self.terms[self.lm]

    def monic(self) -> _Poly:
        lc = self.lc
        return _Poly({m: Fraction(c) / lc for m, c in self.terms.items()}, self.key)


def _sub_multiple(f: dict, g: _Poly, coeff, shift: Monomial) -> None:
    # f -= coeff * x^shift * g, in place
    for m, c in g.terms.items():
        mm = tuple(a + b for a, b in zip(m, shift))
        v = f.get(mm, 0) - coeff * c
        if v:
            f[mm] = v
        else:
            f.pop(mm, None)


def _reduce(terms: dict, basis: Sequence[_Poly], key) -> dict:
    """Remainder of ``terms`` on division by monic ``basis``."""
    f = dict(terms)
    remainder: dict = {}
    while f:
        lm = max(f, key=key)
        c = f[lm]
        for g in basis:
            if _divides(g.lm, lm):
                _sub_multiple(f, g, c, _quot(lm, g.lm))
                break
        else:
            remainder[lm] = c
            del f[lm]
    return remainder


def _spoly(f: _Poly, g: _Poly) -> dict:
    l = _lcm(f.lm, g.lm)
    out: dict = {}
    _sub_multiple(out, f, -Fraction(1) / f.lc, _quot(l, f.lm))
    _sub_multiple(out, g, Fraction(1) / g.lc, _quot(l, g.lm))
    return out


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple[MultiPoly, ...]
    order: MonomialOrder
    source: tuple[MultiPoly, ...] = field(repr=False)
    ring: PolyRing = field(repr=False)

    def _working(self) -> list[_Poly]:
        key = self.order.key_function(self.ring)
        return [_Poly(g.terms, key) for g in self.generators]

    def normal_form(self, f: MultiPoly) -> MultiPoly:
        return normal_form(f, self)

    def contains(self, f: MultiPoly) -> bool:
        return normal_form(f, self).is_zero()

    def leading_monomials(self) -> list[Monomial]:
        return [g.lm for g in self._working()]


def buchberger(gens: Sequence[MultiPoly], order: MonomialOrder = GREVLEX) -> GroebnerBasis:
    """Reduced Groebner basis with the normal selection strategy.

    Pairs are taken by smallest lcm under the order, ties broken by generator
    indices; pairs with coprime leaders (first criterion) and pairs covered by
    the chain criterion (second) are skipped.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    ring = gens[0].ring
    if any(g.ring != ring for g in gens):
        raise ValueError("generators live in different rings")
    key = order.key_function(ring)

    G: list[_Poly] = []
    for g in gens:
        if not g.is_zero():
            G.append(_Poly({m: Fraction(c) for m, c in g.terms.items()}, key).monic())
    if not G:
        return GroebnerBasis((), order, tuple(gens), ring)

    pairs: set[tuple[int, int]] = set()
    heap: list = []

    def add_pair(i, j):
        pairs.add((i, j))
        heapq.heappush(heap, (key(_lcm(G[i].lm, G[j].lm)), i, j))

    for j in range(len(G)):
        for i in range(j):
            add_pair(i, j)

    while heap:
        _, i, j = heapq.heappop(heap)
        pair = (i, j)
        pairs.discard(pair)
        l = _lcm(G[i].lm, G[j].lm)
        if all(a == 0 or b == 0 for a, b in zip(G[i].lm, G[j].lm)):
            continue
        if any(
            k not in pair
            and _divides(G[k].lm, l)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue
        r = _reduce(_spoly(G[i], G[j]), G, key)
        if r:
            G.append(_Poly(r, key).monic())
            n = len(G) - 1
            for k in range(n):
                add_pair(k, n)

    # minimal basis: drop elements whose leader is divisible by another's
    keep: list[_Poly] = []
    for idx, g in enumerate(G):
        if any(
            _divides(h.lm, g.lm) and (h.lm != g.lm or jdx < idx)
            for jdx, h in enumerate(G)
            if jdx != idx
        ):
            continue
        keep.append(g)
    # interreduce
    reduced = []
    for idx, g in enumerate(keep):
        others = [h for jdx, h in enumerate(keep) if jdx != idx]
        tail = {m: c for m, c in g.terms.items() if m != g.lm}
        r = _reduce(tail, others, key)
        r[g.lm] = g.lc
        reduced.append(_Poly(r, key).monic())
    reduced.sort(key=lambda g: key(g.lm), reverse=True)
    return GroebnerBasis(
        tuple(MultiPoly(ring, g.terms) for g in reduced), order, tuple(gens), ring
    )


def normal_form(f: MultiPoly, gb: GroebnerBasis) -> MultiPoly:
    if f.ring != gb.ring:
        raise ValueError(f"{f} is not in {gb.ring!r}")
    key = gb.order.key_function(gb.ring)
    r = _reduce({m: Fraction(c) for m, c in f.terms.items()}, gb._working(), key)
    return MultiPoly(gb.ring, r)


def is_groebner(gb: GroebnerBasis) -> bool:
    """Check that every S-polynomial of the basis reduces to zero."""
    W = gb._working()
    key = gb.order.key_function(gb.ring)
    for j in range(len(W)):
        for i in range(j):
            if _reduce(_spoly(W[i], W[j]), W, key):
                return False
    return True


def is_reduced(gb: GroebnerBasis) -> bool:
    W = gb._working()
    for i, g in enumerate(W):
        if g.lc != 1:
            return False
        for j, h in enumerate(W):
            if i != j and any(_divides(h.lm, m) for m in g.terms):
                return False
    return True


# ---------------------------------------------------------------------------
# certificates for the cubic map

@dataclass
class MembershipRow:
    generator: str
    pullback: str
    normal_form: str
    member: bool

    def as_dict(self) -> dict:
        return {
            "generator": self.generator,
            "pullback": self.pullback,
            "normal_form": self.normal_form,
            "member": self.member,
        }


@dataclass
class MembershipReport:
    name: str
    rows: list[MembershipRow]

    @property
    def passed(self) -> bool:
        return all(r.member for r in self.rows)

    def as_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "rows": [r.as_dict() for r in self.rows]}


def membership_row(label: MultiPoly, image: MultiPoly, gb: GroebnerBasis) -> MembershipRow:
    nf = normal_form(image, gb)
    return MembershipRow(str(label), str(image), str(nf), nf.is_zero())


def verify_map_well_defined(
    affine_map: MapSpec | None = None,
    generators: Sequence[MultiPoly] | None = None,
) -> MembershipReport:
    """Pull back the patch equations of V33 and reduce modulo the E^3 patch ideal."""
    from . import rational_map, varieties

    affine_map = affine_map or rational_map.affine_map()
    if generators is None:
        generators = varieties.V33_PATCH.equations
    gb = patch_ideal_basis()
    rows = [membership_row(g, affine_map.pullback(g), gb) for g in generators]
    return MembershipReport("map_well_defined", rows)


def verify_degree_relation(
    relation: MultiPoly | None = None, affine_map: MapSpec | None = None
) -> MembershipReport:
    """Certify y3^3 + X2^3 + 1 = 0 on the source once X2 is pulled back.

    ``relation`` is written over the mixed variables (y3 from the source,
    X2 from the target); X2 is replaced by its pullback before reduction.
    """
    from . import rational_map

    affine_map = affine_map or rational_map.affine_map()
    mixed = PolyRing(("y3", "X2"))
    if relation is None:
        relation = mixed.parse("y3^3 + X2^3 + 1")
    if relation.ring != mixed:
        relation = mixed.parse(str(relation))
    src = affine_map.source
    lift = MapSpec(src, mixed, {"y3": src.var("y3"), "X2": affine_map.assignments["X2"]})
    row = membership_row(relation, lift.pullback(relation), patch_ideal_basis())
    return MembershipReport("degree_relation", [row])


_PATCH_GB: GroebnerBasis | None = None


def patch_ideal_basis() -> GroebnerBasis:
    """Grevlex basis of (x1^3+y1^3+1, x2^3+y2^3+1, x3^3+y3^3+1)."""
    global _PATCH_GB
    if _PATCH_GB is None:
        from . import varieties

        _PATCH_GB = buchberger(varieties.E3_PATCH.equations, GREVLEX)
    return _PATCH_GB
