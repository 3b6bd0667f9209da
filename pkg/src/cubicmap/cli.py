"""Command-line driver: ``cubicmap verify-map | count | fiber-stats | ap | check-identities``.

Exit codes: 0 when every check passes, 1 on a mathematical violation, 2 on a
usage or budget error.  Tables stream one line per prime, in prime order.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TextIO

from . import modular, rational_map, varieties
from .finite_field import BadPrimeError, PrimeField, is_prime, require_good_prime
from .groebner import verify_degree_relation, verify_map_well_defined
from .polynomial import MapSpec, MultiPoly

log = logging.getLogger("cubicmap")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

COUNT_COLUMNS = ("p", "variety", "method", "affine_cone", "projective")
CENSUS_COLUMNS = ("p", "targets_total", "undefined", "fiber0", "fiber1", "fiber3",
                  "source_matched", "conserved")
AP_COLUMNS = ("p", "residue_mod_3", "ap_w2", "ap_w4", "identity_ok")
MAP_COLUMNS = ("check", "generator", "pullback", "normal_form", "member")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# table output

def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _parse_cell(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        return s


def parse_tsv(text: str) -> list[dict]:
    """Inverse of the TSV writer; comment lines (#) are skipped."""
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    if not lines:
        return []
    header = lines[0].split("\t")
    return [dict(zip(header, map(_parse_cell, l.split("\t")))) for l in lines[1:]]


class TableWriter:
    """Writes rows as they arrive: TSV lines, or one JSON array at close."""

    def __init__(self, columns: Sequence[str], fmt: str, out: TextIO):
        self.columns = columns
        self.fmt = fmt
        self.out = out
        self.rows: list[dict] = []
        if fmt == "tsv":
            print("\t".join(columns), file=out, flush=True)

    def write(self, row: dict):
        row = {c: row[c] for c in self.columns}
        self.rows.append(row)
        if self.fmt == "tsv":
            print("\t".join(_cell(row[c]) for c in self.columns), file=self.out, flush=True)

    def close(self, extra: dict | None = None):
        if self.fmt == "json":
            payload = self.rows if extra is None else {"rows": self.rows, **extra}
            json.dump(payload, self.out, indent=2)
            self.out.write("\n")
        elif extra:
            for k, v in extra.items():
                print(f"# {k}: {json.dumps(v)}", file=self.out)


# ---------------------------------------------------------------------------
# argument helpers

def parse_primes(text: str, allow_three: bool = False) -> list[int]:
    """``7``, ``5,7,13`` or ``2..100``; ranges silently skip 3, explicit 3 is refused."""
    primes: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = (int(x) for x in part.split("..", 1))
            primes.extend(modular.primes_upto(hi)[len(modular.primes_upto(lo - 1)):])
            if not allow_three and 3 in primes:
                primes.remove(3)
                log.warning("skipping p = 3 (bad reduction)")
        else:
            p = int(part)
            if not is_prime(p):
                raise UsageError(f"{p} is not prime")
            if p == 3 and not allow_three:
                raise UsageError("p = 3 is a prime of bad reduction and is refused")
            primes.append(p)
    return sorted(set(primes))


def _pool_map(fn: Callable, items: Iterable, threads: int):
    if threads <= 1:
        yield from map(fn, items)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(fn, items)


# ---------------------------------------------------------------------------
# commands, callable directly with injected objects for negative controls

def run_verify_map(
    out: TextIO = sys.stdout,
    fmt: str = "tsv",
    seed: int = 0,
    affine: MapSpec | None = None,
    homogeneous: MapSpec | None = None,
    samples: int = 50,
) -> int:
    affine = affine or rational_map.affine_map()
    reports = [
        verify_map_well_defined(affine),
        verify_degree_relation(affine_map=affine),
    ]
    homog = rational_map.check_homogenized(homogeneous, affine)
    spot_ok = _spot_check_pullback(affine, seed, samples)

    writer = TableWriter(MAP_COLUMNS, fmt, out)
    for rep in reports + [homog.membership]:
        for row in rep.rows:
            writer.write({"check": rep.name, **row.as_dict()})
    passed = all(r.passed for r in reports) and homog.passed and spot_ok
    writer.close({
        "tridegrees_ok": homog.tridegrees_ok,
        "restriction_ok": homog.restriction_ok,
        "random_pullback_spot_check": spot_ok,
        "seed": seed,
        "passed": passed,
    })
    if not passed:
        for rep in reports + [homog.membership]:
            for row in rep.rows:
                if not row.member:
                    print(f"FAIL {rep.name}: {row.generator} has normal form {row.normal_form}",
                          file=sys.stderr)
    return EXIT_OK if passed else EXIT_VIOLATION


def _spot_check_pullback(affine: MapSpec, seed: int, samples: int) -> bool:
    """Evaluating a pulled-back polynomial equals evaluating at the pushed-forward point."""
    rng = random.Random(seed)
    target = affine.target
    ok = True
    for _ in range(samples):
        p = rng.choice([5, 7, 11, 13, 101, 1009])
        field = PrimeField(p)
        terms = {}
        for _ in range(rng.randint(1, 4)):
            mono = tuple(rng.randint(0, 3) for _ in target.variables)
            terms[mono] = rng.randint(-5, 5)
        f = MultiPoly(target, terms)
        point = {v: rng.randrange(p) for v in affine.source.variables}
        pushed = affine.apply_mod_p(point, field)
        ok &= affine.pullback(f).eval_mod_p(point, field) == f.eval_mod_p(pushed, field)
    return ok


def _count_rows(variety: str, p: int, check: bool, budget: int) -> list[dict]:
    counter = {"E": varieties.count_E, "V33": varieties.count_V33}[variety]
    rows = []
    table = counter(p, "table")
    rows.append(table.as_dict())
    if check:
        spec = varieties.BY_NAME[variety]
        if p ** spec.ring.nvars > budget:
            rows.append({"p": p, "variety": variety, "method": "brute",
                         "affine_cone": "refused", "projective": "refused"})
        else:
            rows.append(counter(p, "brute", budget=budget).as_dict())
    return rows


def run_count(variety: str, primes: Sequence[int], out: TextIO = sys.stdout, fmt: str = "tsv",
              check: bool = False, budget: int = varieties.DEFAULT_BUDGET, threads: int = 1) -> int:
    if variety not in ("E", "V33"):
        raise UsageError(f"unknown variety {variety!r} (expected E or V33)")
    for p in primes:
        require_good_prime(p)
    writer = TableWriter(COUNT_COLUMNS, fmt, out)
    refused = mismatch = False
    for rows in _pool_map(lambda p: _count_rows(variety, p, check, budget), primes, threads):
        for row in rows:
            writer.write(row)
        if len(rows) == 2:
            if rows[1]["affine_cone"] == "refused":
                refused = True
            elif rows[0]["affine_cone"] != rows[1]["affine_cone"]:
                mismatch = True
    writer.close()
    if mismatch:
        return EXIT_VIOLATION
    return EXIT_USAGE if refused else EXIT_OK


def run_fiber_stats(primes: Sequence[int], out: TextIO = sys.stdout, fmt: str = "tsv",
                    budget: int = varieties.DEFAULT_BUDGET, threads: int = 1) -> int:
    for p in primes:
        require_good_prime(p)
        if p ** 5 > budget:
            raise varieties.BudgetExceeded(f"census at p = {p} needs {p ** 5} > {budget} tuples")
    writer = TableWriter(CENSUS_COLUMNS, fmt, out)
    ok = True
    for census in _pool_map(lambda p: rational_map.fiber_census(p, budget), primes, threads):
        writer.write(census.as_dict())
        ok &= census.conserved
    writer.close()
    return EXIT_OK if ok else EXIT_VIOLATION


def _series(bound: int, f2: modular.EtaProductSpec, f4: modular.EtaProductSpec):
    return modular.eta_expand(f2, bound), modular.eta_expand(f4, bound)


def run_ap(primes: Sequence[int], out: TextIO = sys.stdout, fmt: str = "tsv",
           bound: int = modular.DEFAULT_BOUND, threads: int = 1,
           f2: modular.EtaProductSpec = modular.F2, f4: modular.EtaProductSpec = modular.F4) -> int:
    if primes and max(primes) > bound:
        raise UsageError(f"largest prime {max(primes)} exceeds the truncation bound {bound}")
    s2, s4 = _series(bound, f2, f4)
    writer = TableWriter(AP_COLUMNS, fmt, out)
    ok = True
    for row in _pool_map(lambda p: modular.ap_row(p, s2, s4), primes, threads):
        writer.write(row.as_dict())
        ok &= row.identity_ok
    writer.close()
    return EXIT_OK if ok else EXIT_VIOLATION


def run_check_identities(max_prime: int, out: TextIO = sys.stdout, fmt: str = "tsv",
                         bound: int | None = None, threads: int = 1,
                         f2: modular.EtaProductSpec = modular.F2,
                         f4: modular.EtaProductSpec = modular.F4) -> int:
    bound = max(max_prime, modular.DEFAULT_BOUND) if bound is None else bound
    if max_prime > bound:
        raise UsageError(f"max prime {max_prime} exceeds the truncation bound {bound}")
    s2, s4 = _series(bound, f2, f4)
    primes = [p for p in modular.primes_upto(max_prime) if p != 3]
    writer = TableWriter(AP_COLUMNS, fmt, out)
    violations: list[str] = []
    for row in _pool_map(lambda p: modular.ap_row(p, s2, s4), primes, threads):
        writer.write(row.as_dict())
        if not row.identity_ok:
            violations.append(
                f"p={row.p}: eta_w2={row.eta_w2} trace={row.count_trace} cm={row.ap_w2} "
                f"eta_w4={row.eta_w4} cm_w4={row.ap_w4}")
        if not row.bounds_ok:
            violations.append(f"p={row.p}: Weil bound violated")
    for name, series in (("f2", s2), ("f4", s4)):
        bad = modular.support_violations(series)
        if bad:
            violations.append(f"{name}: nonzero a_n at n = {bad[:10]} (n != 1 mod 3)")
    h2 = modular.hecke_check(s2, 2, level=27)
    h4 = modular.hecke_check(s4, 4, level=9)
    violations += [f"f2: {v}" for v in h2.violations[:20]]
    violations += [f"f4: {v}" for v in h4.violations[:20]]
    writer.close({"bound": bound, "hecke_checks": h2.checked + h4.checked,
                  "violations": violations, "passed": not violations})
    for v in violations:
        print(f"VIOLATION {v}", file=sys.stderr)
    return EXIT_OK if not violations else EXIT_VIOLATION


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")
    common.add_argument("--budget", type=int, default=varieties.DEFAULT_BUDGET)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cubicmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify-map", parents=[common], help="symbolic certificates for the map")

    c = sub.add_parser("count", parents=[common], help="point counts over F_p")
    c.add_argument("variety", choices=("E", "V33"))
    c.add_argument("prime_spec", nargs="?", help="p, p1,p2,... or a..b")
    c.add_argument("--primes")
    c.add_argument("--check", action="store_true", help="cross-check by brute force")

    f = sub.add_parser("fiber-stats", parents=[common], help="fiber census of the map")
    f.add_argument("prime_spec", nargs="?")
    f.add_argument("--primes")

    a = sub.add_parser("ap", parents=[common], help="Frobenius traces, weight 2 and 4")
    a.add_argument("prime_spec", nargs="?")
    a.add_argument("--primes")
    a.add_argument("--bound", type=int, default=modular.DEFAULT_BOUND)

    i = sub.add_parser("check-identities", parents=[common], help="eta/CM/count identities")
    i.add_argument("max_prime", nargs="?", type=int, default=1000)
    i.add_argument("--bound", type=int)
    return parser


def _primes_arg(args) -> list[int]:
    text = args.primes or args.prime_spec
    if not text:
        raise UsageError("no primes given (use --primes a..b)")
    return parse_primes(text)


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "verify-map":
            return run_verify_map(out, args.format, args.seed)
        if args.command == "count":
            return run_count(args.variety, _primes_arg(args), out, args.format,
                             args.check, args.budget, args.threads)
        if args.command == "fiber-stats":
            return run_fiber_stats(_primes_arg(args), out, args.format, args.budget, args.threads)
        if args.command == "ap":
            return run_ap(_primes_arg(args), out, args.format, args.bound, args.threads)
        if args.command == "check-identities":
            return run_check_identities(args.max_prime, out, args.format, args.bound, args.threads)
    except (UsageError, BadPrimeError, varieties.BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
