"""Sparse multivariate polynomials with exact coefficients.

A polynomial lives in a :class:`PolyRing`, which fixes the variable names and
their order once.  Monomials are exponent tuples aligned with that order, so a
misspelled variable is an error rather than a silently new indeterminate.

Coefficients are Python ints (arbitrary precision).  Rationals are allowed as
:class:`fractions.Fraction` because Groebner reduction over Q produces them;
a fraction with denominator 1 is always stored as an int.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .finite_field import FieldElement, PrimeField

Coeff = Union[int, Fraction]
Monomial = tuple  # tuple[int, ...], one exponent per ring variable


def _normalize(c) -> Coeff:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    raise TypeError(f"unsupported coefficient {c!r}")


def grevlex_key(m: Monomial):
    """Sort key: larger key means larger monomial in graded reverse lex."""
    return (sum(m), tuple(-e for e in reversed(m)))


class PolyRing:
    """A polynomial ring Q[v_1, ..., v_n] with a fixed variable order."""

    def __init__(self, variables: Iterable[str]):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variables in {self.variables}")
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise ValueError(f"bad variable name {v!r}")
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.nvars = len(self.variables)

    def __repr__(self):
        return f"PolyRing({', '.join(self.variables)})"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    @property
    def one_monomial(self) -> Monomial:
        return (0,) * self.nvars

    def zero(self) -> MultiPoly:
        return MultiPoly(self, {})

    def one(self) -> MultiPoly:
        return self.const(1)

    def const(self, c: Coeff) -> MultiPoly:
        return MultiPoly(self, {self.one_monomial: c})

    def var(self, name: str) -> MultiPoly:
        if name not in self.index:
            raise ValueError(f"unknown variable {name!r} for {self!r}")
        exps = [0] * self.nvars
        exps[self.index[name]] = 1
        return MultiPoly(self, {tuple(exps): 1})

    def gens(self) -> tuple[MultiPoly, ...]:
        return tuple(self.var(v) for v in self.variables)

    def monomial(self, exponents: Mapping[str, int]) -> Monomial:
        exps = [0] * self.nvars
        for v, e in exponents.items():
            if v not in self.index:
                raise ValueError(f"unknown variable {v!r} for {self!r}")
            if e < 0:
                raise ValueError("negative exponent")
            exps[self.index[v]] = e
        return tuple(exps)

    def parse(self, text: str) -> MultiPoly:
        return parse(text, self)


class MultiPoly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Monomial, Coeff]):
        clean = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != ring.nvars or any(e < 0 for e in m):
                raise ValueError(f"bad monomial {m} for {ring!r}")
            c = _normalize(c)
            if c:
                clean[m] = c
        self.ring = ring
        self.terms = clean
        self._hash = None

    # -- structure ----------------------------------------------------

    def _check(self, other) -> MultiPoly:
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if other.ring != self.ring:
            raise ValueError(f"variable universes differ: {self.ring!r} vs {other.ring!r}")
        return other

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self) -> list[tuple[Monomial, Coeff]]:
        """Terms in descending grevlex order, the canonical display order."""
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def variables_used(self) -> set[str]:
        used = set()
        for m in self.terms:
            used.update(v for v, e in zip(self.ring.variables, m) if e)
        return used

    def constant_term(self) -> Coeff:
        return self.terms.get(self.ring.one_monomial, 0)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative int")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Coeff) -> MultiPoly:
        return MultiPoly(self.ring, {m: c * a for m, a in self.terms.items()})

    # -- evaluation ---------------------------------------------------

    def substitute(self, values: Mapping[str, Coeff]) -> MultiPoly:
        """Partially evaluate at exact constants; untouched variables stay symbolic."""
        for v in values:
            if v not in self.ring.index:
                raise ValueError(f"unknown variable {v!r} for {self.ring!r}")
        fixed = {self.ring.index[v]: c for v, c in values.items()}
        out: dict = {}
        for m, c in self.terms.items():
            coeff = c
            rest = list(m)
            for i, val in fixed.items():
                if m[i]:
                    coeff = coeff * Fraction(val) ** m[i]
                    rest[i] = 0
            key = tuple(rest)
            out[key] = out.get(key, 0) + coeff
        return MultiPoly(self.ring, out)

    def eval_mod_p(self, point: Mapping[str, FieldElement | int], field: PrimeField) -> FieldElement:
        """Value at a point of F_p^n with coefficients reduced mod p."""
        p = field.p
        vals = []
        for v in self.ring.variables:
            if v in point:
                vals.append(int(point[v]) % p)
            else:
                vals.append(None)
        total = 0
        for m, c in self.terms.items():
            if isinstance(c, Fraction):
                term = c.numerator * field.inv(c.denominator) % p
            else:
                term = c % p
            for i, e in enumerate(m):
                if e:
                    if vals[i] is None:
                        raise ValueError(f"variable {self.ring.variables[i]!r} is unassigned")
                    term = term * pow(vals[i], e, p) % p
            total += term
        return field(total)

    # -- text ---------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            factors = []
            for v, e in zip(self.ring.variables, m):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MultiPoly({str(self)!r})"


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def parse(text: str, ring: PolyRing) -> MultiPoly:
    """Parse ``-x1^3*y3 + 2``-style text.  ``**`` is accepted for ``^``; parentheses nest."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", Fraction(num)))
        elif name is not None:
            tokens.append(("var", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    if not tokens:
        raise ValueError("empty polynomial text")

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term().scale(sign)
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = power()
        while peek() == ("op", "*"):
            take()
            acc = acc * power()
        return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            if kind != "num" or val.denominator != 1:
                raise ValueError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom():
        if i >= len(tokens):
            raise ValueError(f"unexpected end of {text!r}")
        kind, val = take()
        if kind == "num":
            return ring.const(val)
        if kind == "var":
            return ring.var(val)
        if val == "(":
            inner = expr()
            if take() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {text!r}")
            return inner
        if val == "-":
            return -atom()
        raise ValueError(f"unexpected {val!r} in {text!r}")

    result = expr()
    if i != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return result


@dataclass(frozen=True)
class MapSpec:
    """A ring homomorphism target_ring -> source_ring given on generators.

    Geometrically this is a map from Spec(source) to Spec(target); ``pullback``
    composes a target-side polynomial with the assignments.
    """

    source: PolyRing
    target: PolyRing
    assignments: Mapping[str, MultiPoly]

    def __post_init__(self):
        missing = set(self.target.variables) - set(self.assignments)
        extra = set(self.assignments) - set(self.target.variables)
        if missing or extra:
            raise ValueError(f"assignments must cover exactly {self.target.variables}; "
                             f"missing={sorted(missing)} extra={sorted(extra)}")
        for v, f in self.assignments.items():
            if f.ring != self.source:
                raise ValueError(f"assignment for {v} is not in {self.source!r}")

    @classmethod
    def from_text(cls, source: PolyRing, target: PolyRing, assignments: Mapping[str, str]) -> MapSpec:
        return cls(source, target, {v: source.parse(t) for v, t in assignments.items()})

    def replace(self, **changes: str | MultiPoly) -> MapSpec:
        new = dict(self.assignments)
        for v, f in changes.items():
            new[v] = self.source.parse(f) if isinstance(f, str) else f
        return MapSpec(self.source, self.target, new)

    def pullback(self, f: MultiPoly) -> MultiPoly:
        return pullback(self, f)

    def apply_mod_p(self, point: Mapping[str, int | FieldElement], field: PrimeField) -> dict[str, int]:
        """Push a source point forward: target coordinate -> residue."""
        return {v: f.eval_mod_p(point, field).value for v, f in self.assignments.items()}


def pullback(m: MapSpec, f: MultiPoly) -> MultiPoly:
    if f.ring != m.target:
        raise ValueError(f"{f} is not in the map's target ring {m.target!r}")
    for v in f.variables_used():
        if v not in m.assignments:
            raise ValueError(f"variable {v!r} has no assignment")
    images = [m.assignments[v] for v in m.target.variables]
    power_cache: dict[tuple[int, int], MultiPoly] = {}

    def img_pow(i, e):
        key = (i, e)
        if key not in power_cache:
            power_cache[key] = images[i] ** e
        return power_cache[key]

    result = m.source.zero()
    for mono, c in f.terms.items():
        term = m.source.const(c)
        for i, e in enumerate(mono):
            if e:
                term = term * img_pow(i, e)
        result = result + term
    return result
