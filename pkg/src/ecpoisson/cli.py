"""Command-line entry point: ``ecpoisson <command> ...``.

Exit status is 0 on success, 1 on an internal failure (or a failing verify
suite) and 2 on bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .arith import sieve_primes
from .cache import OrderTableCache
from .census import FamilySpec, hasse_interval, moment_census, run_census
from .classnum import kronecker_H
from .config import Config, RunManifest, load_config
from .constants import C_constant, K_constant, d_coeff
from .curves import curve_order
from . import reports, verify

log = logging.getLogger("ecpoisson")


class UserError(Exception):
    pass


def parse_N(text: str) -> list[int] | int:
    """``9`` or an inclusive range ``100..200``."""
    try:
        if ".." in text:
            lo, hi = (int(s) for s in text.split("..", 1))
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N: {text!r} (use 9 or 100..200)") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run options")
    g.add_argument("--config", type=Path, help="key = value config file")
    g.add_argument("--cache-dir", type=Path)
    g.add_argument("--workers", type=int)
    g.add_argument("--prime-bound", type=int)
    g.add_argument("--budget", type=int, dest="table_memory_budget", help="table memory budget, bytes")
    g.add_argument("--format", choices=("json", "csv"), dest="output_format")
    g.add_argument("--out", type=Path, help="directory for output files and the run manifest")
    g.add_argument("--plot-data", action="store_true", help="also write (x, y) series files")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="ecpoisson", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("order", parents=[common], help="|E(F_p)| for y^2 = x^3 + s x + t")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--t", type=int, required=True)

    s = sub.add_parser("classnum", parents=[common], help="Kronecker-Hurwitz class number H(D)")
    s.add_argument("--D", type=int, required=True)

    s = sub.add_parser("kconst", parents=[common], help="Euler product K(N)")
    s.add_argument("--N", type=int, required=True)

    s = sub.add_parser("cconst", parents=[common], help="Euler product C(m)")
    s.add_argument("--m", type=int, required=True)

    s = sub.add_parser("dcoeff", parents=[common], help="exact d_{l,r}(m)")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--m", type=int, required=True)

    s = sub.add_parser("scan", parents=[common], help="census of M_E(N) over a box family")
    s.add_argument("--A", type=int, required=True)
    s.add_argument("--B", type=int, required=True)
    s.add_argument("--N", type=parse_N, required=True, help="9 or 100..200")
    s.add_argument("--aggregate", action="store_true", help="pool an N range into one histogram")
    s.add_argument("--ell-max", type=int)
    s.add_argument("--block", type=int, default=1024)
    s.add_argument("--no-cache", action="store_true", help="use in-memory class data only")

    s = sub.add_parser("moments", parents=[common], help="family moment against its Li_m prediction")
    s.add_argument("--A", type=int, required=True)
    s.add_argument("--B", type=int, required=True)
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--gamma1", type=int, default=0)
    s.add_argument("--block", type=int, default=1024)
    s.add_argument("--cache", action="store_true",
                   help="read dense tables through the disk cache (4 p^2 bytes per prime)")

    s = sub.add_parser("verify", parents=[common], help="run a self-check suite")
    s.add_argument("suite", choices=sorted(verify.SUITES))
    s.add_argument("--pmax", type=int, default=199)
    s.add_argument("--max", type=int, default=12, dest="max_size")
    s.add_argument("--cases", type=int, default=1000)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--family", type=int, default=10, help="box size for oracle-census")

    s = sub.add_parser("cache", help="order-table cache maintenance")
    csub = s.add_subparsers(dest="cache_command", required=True)
    w = csub.add_parser("warm", parents=[common], help="build tables for primes in a range")
    w.add_argument("--pmin", type=int, default=5)
    w.add_argument("--pmax", type=int, required=True)
    csub.add_parser("ls", parents=[common], help="list cached tables")
    g = csub.add_parser("gc", parents=[common], help="remove temp files and invalid tables")
    g.add_argument("--all", action="store_true", help="remove every table")
    return ap


def _config(args) -> Config:
    try:
        return load_config(
            args.config,
            cache_dir=args.cache_dir,
            workers=args.workers,
            prime_bound=args.prime_bound,
            table_memory_budget=args.table_memory_budget,
            output_format=args.output_format,
        )
    except (ValueError, OSError) as exc:
        raise UserError(str(exc)) from exc


class Output:
    """Collects result files under ``--out`` and writes the manifest last."""

    def __init__(self, args, cfg: Config):
        self.dir = args.out
        self.files: list[str] = []
        self.args = args
        self.cfg = cfg
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def emit(self, name: str, text: str) -> None:
        if self.dir is None:
            sys.stdout.write(text)
            return
        path = self.dir / name
        path.write_text(text)
        self.files.append(str(path))

    def add(self, paths) -> None:
        self.files.extend(str(p) for p in paths)

    def manifest(self, started: float) -> None:
        if self.dir is None:
            return
        params = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(self.args).items())
                  if k not in ("out", "config", "func", "verbose")}
        params["config"] = self.cfg.as_dict()
        m = RunManifest(self.args.command, params, __version__, time.perf_counter() - started,
                        sorted(self.files))
        m.write(self.dir / "manifest.json")


def _print_value(out: Output, name: str, value: dict, text: str) -> None:
    if out.dir is None:
        print(text)
    else:
        out.emit(f"{name}.json", reports.dumps(value))


def cmd_order(args, cfg, out):
    n = curve_order(args.p, args.s, args.t)
    _print_value(out, "order", {"p": args.p, "s": args.s, "t": args.t, "order": n}, str(n))


def cmd_classnum(args, cfg, out):
    H = kronecker_H(args.D).H
    _print_value(out, "classnum", {"D": args.D, "H": str(H), "decimal": float(H)},
                 f"{H}\t{float(H)!r}")


def cmd_kconst(args, cfg, out):
    k = K_constant(args.N, cfg.prime_bound)
    _print_value(out, "kconst", {"N": args.N, "value": k.value, "prime_bound": k.prime_bound,
                                 "tail_estimate": k.tail_estimate},
                 f"{k.value!r}\t+/- {k.tail_estimate:.3e}")


def cmd_cconst(args, cfg, out):
    c = C_constant(args.m, cfg.prime_bound)
    _print_value(out, "cconst", {"m": args.m, "value": c.value, "prime_bound": c.prime_bound,
                                 "tail_estimate": c.tail_estimate},
                 f"{c.value!r}\t+/- {c.tail_estimate:.3e}")


def cmd_dcoeff(args, cfg, out):
    d = d_coeff(args.ell, args.r, args.m)
    _print_value(out, "dcoeff", {"ell": args.ell, "r": args.r, "m": args.m, "value": str(d)}, str(d))


def _tables(args, cfg):
    if args.no_cache:
        return None
    return OrderTableCache(cfg.cache_dir, cfg.table_memory_budget)


def _check_budget(cfg, pmax: int) -> None:
    need = 12 + 4 * pmax * pmax
    if need > cfg.table_memory_budget:
        raise UserError(f"table for p={pmax} needs {need} bytes, budget {cfg.table_memory_budget}")


def cmd_scan(args, cfg, out):
    if isinstance(args.N, list) and len(args.N) > 1 and not args.aggregate:
        raise UserError("an N range needs --aggregate")
    Ns = args.N if isinstance(args.N, list) else [args.N]
    if not args.no_cache:
        _check_budget(cfg, max(hasse_interval(n)[1] for n in Ns))
    report = run_census(FamilySpec(args.A, args.B), args.N if len(Ns) > 1 else Ns[0],
                        workers=cfg.workers, tables=_tables(args, cfg), block=args.block,
                        ell_max=args.ell_max)
    if cfg.output_format == "csv":
        out.emit("census.csv", reports.census_to_csv(report))
    else:
        out.emit("census.json", reports.dumps(reports.census_to_dict(report)))
    if args.plot_data:
        _need_out(out)
        out.add(reports.write_series(out.dir, "census", reports.census_plot_series(report)))


def cmd_moments(args, cfg, out):
    tables = None
    if args.cache:
        _check_budget(cfg, hasse_interval(args.x)[1])
        tables = OrderTableCache(cfg.cache_dir, cfg.table_memory_budget)
    report = moment_census(FamilySpec(args.A, args.B), args.x, args.ell, args.r, args.gamma1,
                           workers=cfg.workers, tables=tables, block=args.block,
                           prime_bound=cfg.prime_bound)
    if cfg.output_format == "csv":
        out.emit("moments.csv", reports.moment_to_csv(report))
    else:
        out.emit("moments.json", reports.dumps(reports.moment_to_dict(report)))
    if args.plot_data:
        _need_out(out)
        out.add(reports.write_series(out.dir, "moments", reports.moment_plot_series(report)))


def _need_out(out):
    if out.dir is None:
        raise UserError("--plot-data needs --out")


def cmd_verify(args, cfg, out):
    suite = args.suite
    if suite in ("deuring", "mass"):
        res = verify.SUITES[suite](args.pmax)
    elif suite == "combinatorics":
        res = verify.suite_combinatorics(args.max_size)
    elif suite == "weil":
        res = verify.suite_weil(args.cases, args.seed)
    elif suite == "constants":
        res = verify.suite_constants(cfg.prime_bound)
    else:
        res = verify.suite_oracle_census(args.family)
    lines = [res.summary(), *res.notes, *res.failures]
    if out.dir is None:
        print("\n".join(lines))
    else:
        print(res.summary())
        out.emit(f"verify-{suite}.txt", "\n".join(lines) + "\n")
    return 0 if res.passed else 1


def cmd_cache(args, cfg, out):
    cache = OrderTableCache(cfg.cache_dir, cfg.table_memory_budget)
    if args.cache_command == "warm":
        _check_budget(cfg, args.pmax)
        primes = [int(p) for p in sieve_primes(max(args.pmax, 2)).primes
                  if max(args.pmin, 5) <= p <= args.pmax]
        cache.warm(primes, cfg.workers)
        print(f"warmed {len(primes)} tables in {cache.cache_dir}")
    elif args.cache_command == "ls":
        entries = cache.entries()
        for e in entries:
            print(f"{e.p}\t{e.size}\t{'ok' if e.valid else 'INVALID'}\t{e.path}")
        print(f"{len(entries)} tables, {sum(e.size for e in entries)} bytes")
    else:
        removed = cache.gc(remove_all=args.all)
        print(f"removed {len(removed)} files")


COMMANDS = {
    "order": cmd_order,
    "classnum": cmd_classnum,
    "kconst": cmd_kconst,
    "cconst": cmd_cconst,
    "dcoeff": cmd_dcoeff,
    "scan": cmd_scan,
    "moments": cmd_moments,
    "verify": cmd_verify,
    "cache": cmd_cache,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        cfg = _config(args)
        out = Output(args, cfg)
        status = COMMANDS[args.command](args, cfg, out) or 0
        out.manifest(started)
        return status
    except (UserError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
