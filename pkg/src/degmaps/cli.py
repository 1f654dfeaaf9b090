"""Command-line interface: ``degmaps {compute,table,trace,verify}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from itertools import product

from . import __version__
from .catalog import CATALOG_ENV, CatalogError, load_catalog
from .degsets import DegreeSet, brute_force_oracle
from .obstruction import PAIRS, PairResult, compute_all, compute_pair, make_context, theorem_sets
from .spaces import MANIFOLDS

log = logging.getLogger("degmaps")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
NAMES = {"s3xs5": "S3xS5", "m01": "M01", "su3": "SU3"}
# kl reaches every integer in [-d, d] only when the box is at least d wide
DEFAULT_B, DEFAULT_D = 100, 100


@dataclass
class RunConfig:
    command: str
    pair: tuple[str, str] | None = None
    catalog: str | None = None
    sign: int = 1
    oracle_b: int = DEFAULT_B
    oracle_d: int = DEFAULT_D
    fmt: str = "text"
    replay: bool = False

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.oracle_b <= 0 or self.oracle_d < 0:
            raise ValueError("oracle bounds must be positive")


def space_name(text: str) -> str:
    try:
        return NAMES[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown manifold {text!r} (choose from {', '.join(NAMES)})"
        ) from None


def _sign(text: str) -> int:
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise argparse.ArgumentTypeError("sign must be +1 or -1")


# rendering ----------------------------------------------------------------------


def render_result(r: PairResult, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(r.to_json(), ensure_ascii=False)
    if fmt == "md":
        return (
            "| domain | target | condition | polynomial | D |\n|---|---|---|---|---|\n"
            f"| {r.pair[0]} | {r.pair[1]} | {r.condition} | {r.polynomial} | {r.degree_set} |"
        )
    lines = [
        f"{r.pair[0]} -> {r.pair[1]} (case {r.case})",
        f"skeleton classes: {r.family.describe()}",
    ]
    if r.obstruction is not None:
        lines.append(f"obstruction: {r.obstruction}")
    lines += [
        f"condition: {r.condition}",
        f"polynomial: {r.polynomial}",
        f"D = {r.degree_set}",
    ]
    return "\n".join(lines)


def render_table(results: dict[tuple[str, str], PairResult], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([results[p].to_json() for p in PAIRS], ensure_ascii=False, indent=1)
    cells = {p: str(results[p].degree_set) for p in PAIRS}
    if fmt == "md":
        out = ["| M \\ N | " + " | ".join(MANIFOLDS) + " |", "|---" * (len(MANIFOLDS) + 1) + "|"]
        for a in MANIFOLDS:
            out.append(f"| {a} | " + " | ".join(cells[(a, b)] for b in MANIFOLDS) + " |")
        return "\n".join(out)
    width = max(len(c) for c in [*cells.values(), *MANIFOLDS]) + 2
    out = ["D(M,N)".ljust(8) + "".join(b.ljust(width) for b in MANIFOLDS)]
    for a in MANIFOLDS:
        out.append(a.ljust(8) + "".join(cells[(a, b)].ljust(width) for b in MANIFOLDS))
    return "\n".join(line.rstrip() for line in out)


def render_trace(r: PairResult, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(
            {"pair": list(r.pair), "traces": [t.to_records() for t in r.traces], "notes": r.notes},
            ensure_ascii=False,
            indent=1,
        )
    parts = [f"== {r.pair[0]} -> {r.pair[1]} (case {r.case}) =="]
    parts += [t.render_text() for t in r.traces]
    parts += [f"note: {n}" for n in r.notes]
    parts.append(f"D = {r.degree_set}")
    return "\n\n".join(parts)


# verification ---------------------------------------------------------------------


@dataclass
class VerifyReport:
    failures: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    verified: int = 0
    total: int = len(PAIRS)

    @property
    def ok(self) -> bool:
        return not self.failures

    def render(self) -> str:
        lines = [f"warning: {w}" for w in self.warnings]
        lines += [f"FAIL {f}" for f in self.failures]
        lines.append(f"{self.verified}/{self.total} pairs verified")
        return "\n".join(lines)


def composition_failures(res: dict[tuple[str, str], PairResult], d: int) -> list[str]:
    """Degrees multiply under composition: D(A,B)*D(B,C) inside D(A,C) on [-d, d]."""
    out = []
    for a, b, c in product(MANIFOLDS, repeat=3):
        s1, s2, s3 = res[(a, b)].degree_set, res[(b, c)].degree_set, res[(a, c)].degree_set
        if not (s1.resolved and s2.resolved and s3.resolved):
            continue
        bad = sorted(
            {x * y for x in s1.window(d) for y in s2.window(d) if abs(x * y) <= d and x * y not in s3}
        )
        if bad:
            out.append(f"composition {a}->{b}->{c}: products {bad[:5]} not in D({a},{c}) on [-{d},{d}]")
    return out


def run_verify(catalog: str | None, b: int, d: int) -> VerifyReport:
    rep = VerifyReport()
    if d == 0:
        rep.warnings.append("oracle window has size zero; oracle comparisons are vacuous")
    per_sign: dict[int, dict] = {}
    pair_ok = {p: True for p in PAIRS}
    expected = theorem_sets()
    for sign in (1, -1):
        cat = load_catalog(catalog, sign=sign, validate=False)
        if sign == 1:
            for v in cat.violations:
                rep.failures.append(f"catalog [{v.rule}] {v.message}")
        ctx = make_context(cat)
        try:
            res = compute_all(ctx)
        except Exception as exc:  # a broken catalog must not crash the report
            rep.failures.append(f"sign {sign:+d}: pipeline error: {exc}")
            return rep
        per_sign[sign] = res
        for p, r in res.items():
            tag = f"{p[0]}->{p[1]} (s={sign:+d})"
            if not r.degree_set.resolved:
                rep.failures.append(f"{tag}: {r.degree_set}")
                pair_ok[p] = False
                continue
            if r.degree_set != expected[p]:
                rep.failures.append(f"{tag}: got {r.degree_set}, expected {expected[p]}")
                pair_ok[p] = False
            oracle = brute_force_oracle(r.polynomial, r.condition, b, d)
            if r.degree_set.window(d) != oracle:
                diff = sorted(r.degree_set.window(d) ^ oracle)
                hint = " (box smaller than window)" if b < d else ""
                rep.failures.append(f"{tag}: oracle mismatch on [-{d},{d}] with B={b}: {diff[:8]}{hint}")
                pair_ok[p] = False
            if 0 not in r.degree_set or (p[0] == p[1] and 1 not in r.degree_set):
                rep.failures.append(f"{tag}: missing 0 or the identity degree")
                pair_ok[p] = False
            try:
                r.replay()
            except Exception as exc:
                rep.failures.append(f"{tag}: trace replay failed: {exc}")
                pair_ok[p] = False
        for f in composition_failures(res, d):
            rep.failures.append(f"s={sign:+d}: {f}")
    for p in PAIRS:
        a, b_ = per_sign[1][p], per_sign[-1][p]
        if (a.degree_set, str(a.condition)) != (b_.degree_set, str(b_.condition)):
            rep.failures.append(f"{p[0]}->{p[1]}: result depends on the sign")
            pair_ok[p] = False
    rep.verified = sum(pair_ok.values())
    return rep


# entry point ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help=f"catalog JSON (default: ${CATALOG_ENV} or the bundled file)")
    common.add_argument("--sign", type=_sign, default=1, metavar="{+1,-1}",
                        help="sign s in [iota_4, iota_4] = 2 nu_4 + s a_4")
    common.add_argument("--format", dest="fmt", choices=("text", "json", "md"), default="text")
    common.add_argument("--oracle-b", type=int, default=DEFAULT_B, help="parameter box for the oracle")
    common.add_argument("--oracle-d", type=int, default=DEFAULT_D, help="degree window for the oracle")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="degmaps", description="Mapping degrees between S3xS5, M01 and SU(3).")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("compute", "degree set of one pair"), ("trace", "derivation of one pair")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("domain", type=space_name)
        sp.add_argument("target", type=space_name)
        if name == "trace":
            sp.add_argument("--replay", action="store_true", help="re-execute every step and compare")
    sub.add_parser("table", parents=[common], help="3x3 table of degree sets")
    sub.add_parser("verify", parents=[common], help="run every consistency check")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = RunConfig(
            command=args.command,
            pair=(args.domain, args.target) if hasattr(args, "domain") else None,
            catalog=args.catalog,
            sign=args.sign,
            oracle_b=args.oracle_b,
            oracle_d=args.oracle_d,
            fmt=args.fmt,
            replay=getattr(args, "replay", False),
        )
    except ValueError as exc:
        ap.error(str(exc))
    try:
        return _dispatch(cfg)
    except CatalogError as exc:
        print(f"degmaps: catalog error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(cfg: RunConfig) -> int:
    if cfg.command == "verify":
        rep = run_verify(cfg.catalog, cfg.oracle_b, cfg.oracle_d)
        print(rep.render())
        return EXIT_OK if rep.ok else EXIT_FAIL
    ctx = make_context(load_catalog(cfg.catalog, sign=cfg.sign))
    if cfg.command == "table":
        print(render_table(compute_all(ctx), cfg.fmt))
        return EXIT_OK
    assert cfg.pair is not None
    r = compute_pair(*cfg.pair, ctx=ctx)
    if cfg.command == "compute":
        print(render_result(r, cfg.fmt))
        return EXIT_OK if r.degree_set.resolved else EXIT_FAIL
    print(render_trace(r, cfg.fmt))
    if cfg.replay:
        try:
            r.replay()
        except Exception as exc:
            print(f"replay: FAILED ({exc})", file=sys.stderr)
            return EXIT_FAIL
        print(f"replay: {len(r.traces)} traces reproduced")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
