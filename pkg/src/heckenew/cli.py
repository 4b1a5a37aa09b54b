"""Command-line front end.

Exit codes: 0 success, 1 domain error (bad parity, m not coprime to N, ...),
2 I/O error.  Numbers in JSON output are exact decimal strings; the only
inexact values are envelope bounds, which are labelled and rounded upward.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import arith, bounds, oracles, quadforms, scanner, secondcoef, tracefm
from .arith import DomainError
from .characters import DirichletCharacter

ENV_PREFIX = "HECKE_"
DEFAULTS = {"threads": "1", "cache_mb": "256", "output_dir": "."}
# rough size of one cached factorization, used to turn megabytes into entries
_BYTES_PER_FACTOR_ENTRY = 256


@dataclass(frozen=True)
class Config:
    threads: int
    cache_mb: int
    output_dir: Path


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lower().replace("-", "_")] = value
    return out


def load_config(flags: dict | None = None, env=None, path=None) -> Config:
    """Merge settings with precedence flag > environment > file > default."""
    env = os.environ if env is None else env
    merged = dict(DEFAULTS)
    if path is None:
        path = env.get(ENV_PREFIX + "CONFIG")
    if path:
        merged.update({k: v for k, v in read_config_file(path).items() if k in DEFAULTS})
    for key in DEFAULTS:
        value = env.get(ENV_PREFIX + key.upper())
        if value:
            merged[key] = value
    for key, value in (flags or {}).items():
        if value is not None:
            merged[key] = str(value)
    try:
        threads = int(merged["threads"])
        cache_mb = int(merged["cache_mb"])
    except ValueError as exc:
        raise DomainError(f"bad numeric setting: {exc}") from None
    if threads < 1 or cache_mb < 1:
        raise DomainError("threads and cache_mb must be positive")
    return Config(threads, cache_mb, Path(merged["output_dir"]))


def parse_chi(N: int, text: str | None) -> DirichletCharacter | None:
    if text is None:
        return None
    try:
        exps = tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise DomainError(f"--chi expects comma-separated integers, got {text!r}") from None
    return DirichletCharacter(N, exps)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


# --- subcommands -----------------------------------------------------------------------

def cmd_trace(args, cfg) -> int:
    chi = parse_chi(args.N, args.chi)
    if args.new:
        if chi is None:
            b = tracefm.new_trace_breakdown(args.m, args.N, args.k)
            _emit({**b.to_json(), "space": "new"})
        else:
            tr = tracefm.trace_new(args.m, args.N, args.k, chi)
            _emit({"m": args.m, "N": args.N, "k": args.k, "chi": chi.to_json(),
                   "space": "new", "trace": tracefm.exact_str(tr)})
    else:
        b = tracefm.trace_full(args.m, args.N, args.k, chi)
        _emit({**b.to_json(), "space": "full"})
    return 0


def cmd_a2new(args, cfg) -> int:
    chi = parse_chi(args.N, args.chi)
    _emit(secondcoef.a2_new(args.m, args.N, args.k, chi).to_json())
    return 0


def _out_path(cfg: Config, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else cfg.output_dir / p


def cmd_scan(args, cfg) -> int:
    out = _out_path(cfg, args.out)
    ckpt = _out_path(cfg, args.checkpoint) if args.checkpoint else None
    out.parent.mkdir(parents=True, exist_ok=True)
    summary = scanner.scan(
        args.m,
        args.n_max,
        out,
        k_max=args.k_max,
        workers=cfg.threads,
        checkpoint=ckpt,
        csv_out=args.csv,
        block_size=args.block_size,
    )
    _emit(summary.to_json())
    return 0


def cmd_scan_chi(args, cfg) -> int:
    out = _out_path(cfg, args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _emit(scanner.scan_characters(args.m, args.n_max, args.k_max, out).to_json())
    return 0


def cmd_trace_scan(args, cfg) -> int:
    """Newspace traces for trivial character over a grid; zeros are only reported."""
    out = _out_path(cfg, args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    zeros = []
    with open(out, "w") as fh:
        for N in range(1, args.n_max + 1):
            if math.gcd(N, args.m) != 1:
                continue
            terms = tracefm.trace_terms(args.m, N, new=True).integer_weights()
            dims = tracefm.trace_terms(1, N, new=True).integer_weights()
            for k in range(2, args.k_max + 1, 2):
                tr = terms.trace(k)
                dim = dims.trace(k)
                fh.write(json.dumps({"m": args.m, "N": N, "k": k, "trace": str(tr),
                                     "dim_new": dim}, separators=(",", ":")) + "\n")
                if tr == 0 and dim > 0:
                    zeros.append((N, k))
    _emit({"m": args.m, "n_limit": args.n_max, "k_max": args.k_max, "zero_traces": zeros})
    return 0


def cmd_bounds(args, cfg) -> int:
    """Exact budget at a level coprime to m; the envelope alone works for any N."""
    coprime = math.gcd(args.m, args.N) == 1
    if not coprime and not args.envelope:
        raise DomainError(f"m={args.m} and N={args.N} are not coprime")
    res: dict = {"m": args.m, "N": args.N}
    if coprime:
        budget = bounds.error_budget(args.m, args.N)
        th = bounds.theta(args.N)
        res.update(
            {
                "theta": {f"theta{i}": str(v) for i, v in enumerate(th.as_tuple(), 1)},
                "c0": str(budget.c0),
                "c1": str(budget.c1),
                "c0_decimal_up": bounds.decimal_up(budget.c0),
                "c1_decimal_up": bounds.decimal_up(budget.c1),
                "threshold": str(budget.threshold),
                "k_cutoff": bounds.k_cutoff(budget),
            }
        )
    if args.envelope:
        env = bounds.envelope_bounds(args.N)
        res["envelope"] = {
            "rounding": "upward",
            "theta_bounds": [bounds.decimal_up(x) for x in env],
            "error_bound": bounds.decimal_up(bounds.envelope_error(args.m, args.N)),
        }
    _emit(res)
    return 0


def cmd_table(args, cfg) -> int:
    _emit([{"D": D, "h_w": str(h)} for D, h in quadforms.table(args.min)])
    return 0


def cmd_oracle(args, cfg) -> int:
    if args.which == "tau":
        _emit({"tau": oracles.tau(args.max)})
    else:
        _emit({"N": args.N, "k": args.k, "dim": oracles.dim_cuspforms(args.N, args.k)})
    return 0


# --- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hecke",
        description="Exact traces of Hecke operators on newspaces and the second "
        "coefficient of their characteristic polynomials.",
    )
    p.add_argument("--config", help="key=value settings file (threads, cache_mb, output_dir)")
    p.add_argument("--cache-mb", type=int, help="memory budget for the factorization cache")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, chi=True):
        sp.add_argument("--m", type=int, required=True, help="Hecke operator index m (coprime to N)")
        sp.add_argument("--N", type=int, required=True, help="level N")
        sp.add_argument("--k", type=int, required=True, help="weight k; parity must match chi(-1)")
        if chi:
            sp.add_argument(
                "--chi",
                help="character mod N as comma-separated exponents on the generators of "
                "(Z/NZ)^* (one per odd prime power; -1 and 5 for powers of 2); "
                "omit for the trivial character",
            )

    sp = sub.add_parser("trace", help="Tr T_m with its identity, elliptic, hyperbolic and parabolic terms")
    common(sp)
    sp.add_argument("--new", action="store_true",
                    help="restrict to the newspace (beta-convolution over levels M | N)")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("a2new", help="second coefficient a2 of the newspace characteristic polynomial")
    common(sp)
    sp.set_defaults(func=cmd_a2new)

    sp = sub.add_parser("scan", help="all (N, k) below the certified weight cutoff, with classification")
    sp.add_argument("--m", type=int, required=True,
                    help="Hecke index; 2 and 4 have certified per-level cutoffs k*(N)")
    sp.add_argument("--n-max", type=int, required=True, help="largest level scanned")
    sp.add_argument("--k-max", type=int,
                    help="scan even k up to this weight instead of below k*(N); required for m not in {2,4}")
    sp.add_argument("--threads", type=int, help="worker processes (default from config)")
    sp.add_argument("--out", required=True, help="JSON-lines output, one record per (N, k)")
    sp.add_argument("--checkpoint", help="checkpoint file; an existing one resumes the scan")
    sp.add_argument("--csv", action="store_true", help="also write a CSV mirror next to --out")
    sp.add_argument("--block-size", type=int, default=scanner.DEFAULT_BLOCK,
                    help="levels per work unit (part of the checkpoint identity)")
    sp.add_argument("--output-dir", help="directory for relative output paths")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("scan-chi", help="exhaustive scan over all characters mod N (small N)")
    sp.add_argument("--m", type=int, required=True, help="Hecke index")
    sp.add_argument("--n-max", type=int, required=True, help="largest level (keep it at a few hundred)")
    sp.add_argument("--k-max", type=int, required=True, help="largest weight; both parities are used")
    sp.add_argument("--out", required=True, help="JSON-lines output")
    sp.add_argument("--output-dir", help="directory for relative output paths")
    sp.set_defaults(func=cmd_scan_chi)

    sp = sub.add_parser("trace-scan",
                        help="raw newspace traces of T_m over a grid (exploratory, no certificate)")
    sp.add_argument("--m", type=int, required=True, help="Hecke index")
    sp.add_argument("--n-max", type=int, required=True, help="largest level")
    sp.add_argument("--k-max", type=int, required=True, help="largest even weight")
    sp.add_argument("--out", required=True, help="JSON-lines output")
    sp.add_argument("--output-dir", help="directory for relative output paths")
    sp.set_defaults(func=cmd_trace_scan)

    sp = sub.add_parser("bounds", help="theta values, error budget and weight cutoff at level N")
    sp.add_argument("--m", type=int, required=True, choices=(2, 4),
                    help="2: slope 1/16 main term; 4: slope 1/192 main term with 1/(k-1) part")
    sp.add_argument("--N", type=int, required=True, help="level (coprime to m)")
    sp.add_argument("--envelope", action="store_true",
                    help="also evaluate the N-power envelopes of the theta values (upward rounded)")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("table", help="reference tables")
    tsub = sp.add_subparsers(dest="which", required=True)
    tp = tsub.add_parser("hw", help="weighted class numbers h_w(D) for -3 >= D >= --min")
    tp.add_argument("--min", type=int, default=-67, help="most negative discriminant listed")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("oracle", help="independent reference computations")
    osub = sp.add_subparsers(dest="which", required=True)
    op = osub.add_parser("tau", help="Ramanujan tau(1..max) from the eta product")
    op.add_argument("--max", type=int, default=50, help="number of coefficients")
    op = osub.add_parser("dim", help="dim S_k(Gamma_0(N)) from the genus formula")
    op.add_argument("--N", type=int, required=True, help="level")
    op.add_argument("--k", type=int, required=True, help="even weight")
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(
            {
                "threads": getattr(args, "threads", None),
                "cache_mb": args.cache_mb,
                "output_dir": getattr(args, "output_dir", None),
            },
            path=args.config,
        )
        arith.set_cache_limit(cfg.cache_mb * (1 << 20) // _BYTES_PER_FACTOR_ENTRY)
        return args.func(args, cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
