"""Command-line front end: ``shiftprimes <command> [flags]``.

Every command prints its result as JSON on stdout. With ``--out DIR`` it also
writes ``<command>.json`` and/or ``<command>.csv`` plus ``manifest.json``.
Flags override values read from ``--config FILE`` (flat ``key = value`` lines,
``#`` starts a comment).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import re
import sys
import time
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from . import __version__, kernels
from ._io import csv_text, jsonable, to_json
from .errors import CacheFormatError, DomainError, ResourceError
from .model import PrimeSet, dickman_rho
from .poisson_lab import (PrimePartition, empirical_joint_integers, empirical_joint_shifted,
                          pgf_check, theorem2_report)
from .prime_engine import SmoothEnumConfig, build_sieve, load_sieve, save_sieve, verify_sieve
from .transfer_lab import (TRANSFERENCE_COLUMNS, LilConfig, ZScanConfig, hypothesis_z_scan,
                           iterated_log, joint_gap, lil_profiles, omega_moments_shifted,
                           random_rectangles, rectangle, transference_report)
from .tv_lab import CSV_COLUMNS, dtv_integers, dtv_shifted

CACHE_ENV = "SHIFTPRIMES_CACHE_DIR"
_CACHE_RE = re.compile(r"^spf_(\d+)\.bin$")


class UsageError(Exception):
    pass


# -- value parsing ----------------------------------------------------------------

def parse_int(text):
    """Integer flag; accepts scientific notation such as 1e7 or 2.5E3."""
    try:
        d = Decimal(str(text).strip())
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not d.is_finite() or d != d.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(d)


def parse_float(text):
    try:
        v = float(str(text).strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def parse_complex(text):
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


_ATOM = re.compile(
    r"(omega|bigomega)\s*:\s*(?:\(\s*([^,\s]+)\s*,\s*([^\]\s]+)\s*\]|\{([^}]*)\})")


def parse_prime_sets(text):
    """``omega:(10,100], bigomega:{2,3,7}`` -> list of PrimeSet.

    Interval atoms hold the primes in (l, r]; brace atoms list primes.
    """
    text = str(text).strip()
    atoms = list(_ATOM.finditer(text))
    leftover = _ATOM.sub("", text).replace(",", "").strip()
    if not atoms or leftover:
        raise DomainError(f"cannot parse partition spec {text!r}")
    sets = []
    for m in atoms:
        mode = m.group(1)
        if m.group(4) is not None:
            ps = [parse_int(v) for v in m.group(4).split(",") if v.strip()]
            sets.append(PrimeSet(tuple(sorted(ps)), mode))
        else:
            sets.append(PrimeSet.interval(parse_int(m.group(2)), parse_int(m.group(3)), mode))
    return sets


def parse_partition(text) -> PrimePartition:
    return PrimePartition(tuple(parse_prime_sets(text)))


def parse_region(text, dim):
    """``lo:hi,lo:hi`` rectangle, one closed interval per coordinate; an
    empty hi leaves that side open."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != dim:
        raise DomainError(f"region {text!r} needs {dim} coordinates")
    bounds = []
    for p in parts:
        lo, sep, hi = p.partition(":")
        if not sep:
            lo = hi = p
        bounds.append((parse_int(lo or 0), parse_int(hi) if hi else None))
    return rectangle(*bounds)


def read_config(path):
    """Flat ``key = value`` lines; ``#`` comments; keys use - or _."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key = value")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


# -- sieve cache --------------------------------------------------------------------

def cache_dir(arg=None):
    if arg:
        return Path(arg)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "shiftprimes"


def cache_path(directory, limit):
    return Path(directory) / f"spf_{limit}.bin"


def _cached_limits(directory):
    if not Path(directory).is_dir():
        return []
    found = (_CACHE_RE.match(p.name) for p in Path(directory).iterdir())
    return sorted(int(m.group(1)) for m in found if m)


def get_table(limit, directory, use_cache=True, exact_limit=False):
    """Smallest cached table covering ``limit``, else a fresh one (saved).

    Returns (table, source, path).
    """
    if use_cache:
        for lim in _cached_limits(directory):
            if lim == limit or (lim > limit and not exact_limit):
                path = cache_path(directory, lim)
                try:
                    return load_sieve(path), "cache", path
                except CacheFormatError:
                    continue
    table = build_sieve(limit)
    path = None
    if use_cache:
        try:
            path = save_sieve(table, cache_path(directory, limit))
        except OSError:
            path = None
    return table, "built", path


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


# -- commands ----------------------------------------------------------------------
# Each returns (result dict, csv columns or None, csv rows, extra files).

def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


def _resolve_y(args):
    if args.y is not None and args.u is not None:
        raise UsageError("--u and --y are mutually exclusive")
    if args.u is not None:
        if not args.u > 0:
            raise DomainError(f"u must be positive, got {args.u}")
        return int(round(args.x ** (1.0 / args.u)))
    return args.y


def _table(args, bound):
    table, _, _ = get_table(bound, cache_dir(args.cache_dir), not args.no_cache)
    return table


def cmd_sieve(args):
    _need(args, "limit")
    directory = cache_dir(args.cache_dir)
    table, source, path = get_table(args.limit, directory, not args.no_cache, exact_limit=True)
    problems = verify_sieve(table)
    digest = hashlib.sha256(np.ascontiguousarray(table.spf[2:], dtype="<u4").tobytes())
    result = {"limit": table.limit, "source": source, "path": str(path) if path else None,
              "prime_count": int(table.prime_array.size), "spf_sha256": digest.hexdigest(),
              "file_sha256": file_sha256(path) if path else None, "verified": not problems,
              "problems": problems}
    if problems:
        raise ResourceError(f"sieve verification failed: {problems}")
    return result, None, [], {}


def _enum_cfg(args, y, bound):
    if args.enum_budget is None:
        return None
    return SmoothEnumConfig(y, bound, args.enum_budget)


def cmd_dtv_shifted(args):
    _need(args, "x")
    y = _resolve_y(args)
    if y is None:
        raise UsageError("one of --y or --u is required")
    table = _table(args, args.x + max(args.a, 0))
    rep = dtv_shifted(args.x, y, args.a, table, _enum_cfg(args, y, args.x + abs(args.a)),
                      args.alpha, args.A, threads=args.threads)
    return rep.as_dict(), CSV_COLUMNS, [rep.csv_row()], {}


def cmd_dtv_integers(args):
    _need(args, "x")
    y = _resolve_y(args)
    if y is None:
        raise UsageError("one of --y or --u is required")
    table = _table(args, args.x)
    rep = dtv_integers(args.x, y, table, _enum_cfg(args, y, args.x), args.alpha, args.A,
                       threads=args.threads)
    return rep.as_dict(), CSV_COLUMNS, [rep.csv_row()], {}


def _partition_and_y(args):
    _need(args, "x", "partition")
    part = parse_partition(args.partition)
    y = _resolve_y(args)
    return part, (part.max_prime if y is None else y)


def cmd_poisson(args):
    part, y = _partition_and_y(args)
    table = _table(args, args.x + max(args.a, 0))
    joint = empirical_joint_shifted(args.x, args.a, part, table, args.threads)
    rep = theorem2_report(args.x, y, args.a, part, table, args.alpha, args.A, joint=joint)
    return rep.as_dict(), CSV_COLUMNS, [rep.csv_row()], {"poisson_joint.jsonl": joint.to_jsonl()}


def cmd_transfer(args):
    part, y = _partition_and_y(args)
    table = _table(args, args.x + max(args.a, 0))
    joints = (empirical_joint_integers(args.x, part, table, args.threads),
              empirical_joint_shifted(args.x, args.a, part, table, args.threads))
    regions = [(f"r{i}", parse_region(r, len(part))) for i, r in enumerate(args.region or [])]
    rng = np.random.default_rng(args.seed)
    regions += [(f"rand{i}", r) for i, r in
                enumerate(random_rectangles(len(part), args.regions, rng))]
    if not regions:
        raise UsageError("give --region and/or --regions N")
    reports = [transference_report(args.x, y, args.a, part, reg, table, args.alpha, args.A,
                                   joints=joints, region_id=rid) for rid, reg in regions]
    gap = float(joint_gap(joints))
    rows = [r.csv_row() for r in reports]
    result = {"x": args.x, "y": y, "a": args.a, "lambdas": [float(v) for v in part.lambdas],
              "joint_dtv": gap, "bound": reports[0].bound, "regions": rows,
              "max_diff": max(r.diff for r in reports),
              "all_within_bound": all(r.diff <= r.bound for r in reports),
              "all_within_joint_dtv": all(r.diff <= gap + 1e-12 for r in reports)}
    return result, TRANSFERENCE_COLUMNS, rows, {}


def cmd_pgf(args):
    _need(args, "partition")
    sets = parse_prime_sets(args.partition)
    zs = args.z or [complex(v) for v in (-1.9, -1, -0.5, 0, 0.5, 1, 1.5, 1.9)]
    rows = []
    for i, T in enumerate(sets):
        for z in zs:
            lhs, rhs, err = pgf_check(T, args.a, z, args.truncation)
            rows.append({"set": i, "mode": T.mode, "z_re": z.real, "z_im": z.imag,
                         "lhs_re": lhs.real, "lhs_im": lhs.imag, "rhs_re": rhs.real,
                         "rhs_im": rhs.imag, "abs_err": err})
    cols = tuple(rows[0])
    return {"a": args.a, "max_abs_err": max(r["abs_err"] for r in rows), "rows": rows}, cols, rows, {}


def cmd_lil(args):
    _need(args, "x")
    cfg = LilConfig(args.x, args.a, ratio=args.ratio)
    table = _table(args, args.x + max(args.a, 0))
    ps, lo, hi = lil_profiles(cfg, table, args.threads)
    qs = [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99]
    result = {"x": args.x, "a": args.a, "t_grid": cfg.t_grid(), "primes": int(ps.size),
              "log4_x": iterated_log(args.x, 4),
              "inf_quantiles": dict(zip(map(str, qs), np.quantile(lo, qs).tolist())),
              "sup_quantiles": dict(zip(map(str, qs), np.quantile(hi, qs).tolist()))}
    rows = zip(ps.tolist(), lo.tolist(), hi.tolist())
    return result, ("p", "inf", "sup"), rows, {}


def cmd_zscan(args):
    _need(args, "x", "M")
    cfg = ZScanConfig(args.x, args.M, args.delta, args.a, args.theta, args.A)
    table = _table(args, max(args.x, int(args.x ** cfg.theta) + 1))
    total, per_m, members = hypothesis_z_scan(cfg, table)
    inE = set(members)
    rows = [(m, d, m in inE) for m, d in per_m]
    result = {"x": args.x, "M": args.M, "delta": args.delta, "a": args.a, "theta": args.theta,
              "A": args.A, "deviation_sum": total, "moduli": len(per_m),
              "members_of_E": list(members)}
    return result, ("m", "deviation", "in_E"), rows, {}


def cmd_moments(args):
    _need(args, "x")
    table = _table(args, args.x + max(args.a, 0))
    mean, var = omega_moments_shifted(args.x, args.a, table, args.threads)
    ll = iterated_log(args.x, 2)
    result = {"x": args.x, "a": args.a, "mean": float(mean), "variance": float(var),
              "mean_exact": mean, "variance_exact": var, "log2_x": ll,
              "window": [ll - 0.5, ll + 1.5], "mean_in_window": ll - 0.5 <= mean <= ll + 1.5}
    return result, ("x", "a", "mean", "variance", "log2_x"), [result], {}


def cmd_rho(args):
    _need(args, "u")
    v = dickman_rho(args.u)
    return {"u": args.u, "rho": v}, ("u", "rho"), [{"u": args.u, "rho": v}], {}


COMMANDS = {
    "sieve": cmd_sieve, "dtv-shifted": cmd_dtv_shifted, "dtv-integers": cmd_dtv_integers,
    "poisson": cmd_poisson, "transfer": cmd_transfer, "pgf": cmd_pgf, "lil": cmd_lil,
    "zscan": cmd_zscan, "moments": cmd_moments, "rho": cmd_rho,
}


# -- parser ------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--config", help="key = value file; flags override it")
    g.add_argument("--out", help="directory for <command>.json/.csv and manifest.json")
    g.add_argument("--format", choices=("json", "csv", "both"), default="json")
    g.add_argument("--threads", type=parse_int, default=kernels.default_threads())
    g.add_argument("--seed", type=parse_int, default=0)
    g.add_argument("--cache-dir", help=f"sieve cache directory (default ${CACHE_ENV})")
    g.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")

    p = argparse.ArgumentParser(prog="shiftprimes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, help, *opts):
        sp = sub.add_parser(name, parents=[common], help=help)
        for o in opts:
            o(sp)
        return sp

    def x(sp):
        sp.add_argument("--x", type=parse_int)

    def yu(sp):
        grp = sp.add_mutually_exclusive_group()
        grp.add_argument("--y", type=parse_int)
        grp.add_argument("--u", type=parse_float)

    def a(sp):
        sp.add_argument("--a", type=parse_int, default=1)

    def bounds(sp):
        sp.add_argument("--alpha", type=parse_float, default=0.5)
        sp.add_argument("--A", type=parse_float, default=1.0)

    def part(sp):
        sp.add_argument("--partition", help="e.g. 'omega:(10,100], omega:(100,1000]'")

    def enum(sp):
        sp.add_argument("--enum-budget", type=parse_int,
                        help="max smooth numbers to enumerate for the mass cross-check")

    add("sieve", "build, verify and cache the SPF table",
        lambda sp: sp.add_argument("--limit", type=parse_int))
    add("dtv-shifted", "exact d_TV for shifted primes", x, yu, a, bounds, enum)
    add("dtv-integers", "exact d_TV for integers", x, yu, bounds, enum)
    add("poisson", "joint divisor counts against independent Poissons", x, yu, a, bounds, part)

    def regions(sp):
        sp.add_argument("--region", action="append", help="rectangle 'lo:hi,lo:hi' (repeatable)")
        sp.add_argument("--regions", type=parse_int, default=0, help="random rectangles to add")
    add("transfer", "integer vs shifted-prime region probabilities", x, yu, a, bounds, part,
        regions)

    def pgf_opts(sp):
        sp.add_argument("--z", type=parse_complex, action="append", help="repeatable")
        sp.add_argument("--truncation", type=parse_int)
    add("pgf", "pgf identities for R_T and its Omega analogue", a, part, pgf_opts)
    add("lil", "Lambda(p + a, t) profiles over a geometric t-grid", x, a,
        lambda sp: sp.add_argument("--ratio", type=parse_float, default=2.0))

    def z_opts(sp):
        sp.add_argument("--M", type=parse_int)
        sp.add_argument("--delta", type=parse_float, default=1.0)
        sp.add_argument("--theta", type=parse_float, default=0.51)
        sp.add_argument("--A", type=parse_float, default=1.0)
    add("zscan", "deviation of primes in progressions over smooth moduli", x, a, z_opts)
    add("moments", "mean and variance of omega(p + a)", x, a)
    add("rho", "Dickman rho", lambda sp: sp.add_argument("--u", type=parse_float))
    return p, sub


def parse_args(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = read_config(args.config)
        except OSError as e:
            parser.error(f"cannot read config: {e}")
        except UsageError as e:
            parser.error(str(e))
        sp = sub.choices[args.command]
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for k, v in values.items():
            if k not in known or k in ("help", "config"):
                parser.error(f"unknown config key {k!r} for {args.command}")
            act = known[k]
            try:
                if act.const is True and act.nargs == 0:
                    defaults[k] = v.lower() in ("1", "true", "yes", "on")
                elif act.type is not None:
                    defaults[k] = act.type(v)
                else:
                    defaults[k] = v
            except argparse.ArgumentTypeError as e:
                parser.error(f"config key {k}: {e}")
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return parser, args


def manifest(args, wall, argv):
    params = {k: v for k, v in vars(args).items() if k not in ("out", "config")}
    return {
        "command": args.command, "argv": list(argv), "params": jsonable(params),
        "seed": args.seed, "backend": kernels.BACKEND,
        "versions": {"shiftprimes": __version__, "python": platform.python_version(),
                     "numpy": np.__version__},
        "wall_time_s": wall, "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def run(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, args = parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    t0 = time.perf_counter()
    try:
        result, cols, rows, extra = COMMANDS[args.command](args)
    except UsageError as e:
        parser.error(str(e))
    except (DomainError, ResourceError, CacheFormatError) as e:
        err = {"error": type(e).__name__, "message": str(e), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return 1
    wall = time.perf_counter() - t0
    text = to_json(result)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.format in ("json", "both"):
            (out / f"{args.command}.json").write_text(text + "\n")
        if args.format in ("csv", "both") and cols:
            (out / f"{args.command}.csv").write_text(csv_text(cols, rows))
        for name, body in extra.items():
            (out / name).write_text(body)
        (out / "manifest.json").write_text(to_json(manifest(args, wall, argv)) + "\n")
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
