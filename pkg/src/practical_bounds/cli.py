"""``practical-bounds`` command line: ``bounds``, ``selftest`` and ``table``.

Every flag can also be set through ``PRACTICAL_BOUNDS_<FLAG>`` (e.g.
``PRACTICAL_BOUNDS_N_MAX``); an explicit flag wins over the environment.

Exit codes: 0 ok, 1 selftest failure, 2 bad configuration, 3 internal
consistency or rigor failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from .aggregation import aggregate, augmented_table, dump_augmented, load_augmented
from .bounds import bounds_from_aggregates, report_serialize
from .config import DEFAULT_MEM_BUDGET, FORMATS, VERIFY_LEVELS, RunConfig
from .errors import ConfigError, ConsistencyError
from .interval import RigorError, ensure_transcendentals_verified
from .practical import dump_rows, enumerate_practical
from .primes import DEFAULT_SEGMENT
from .selftest import run_checks

log = logging.getLogger("practical_bounds")

ENV_PREFIX = "PRACTICAL_BOUNDS_"
EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_CONSISTENCY, EXIT_IO = 0, 1, 2, 3, 4

_SUFFIXES = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30, "t": 1 << 40}


def parse_bytes(text: str) -> int:
    """``"512M"`` -> 536870912; plain integers are bytes."""
    t = text.strip().lower().removesuffix("b").removesuffix("i")
    mult = _SUFFIXES.get(t[-1:], 1)
    if mult != 1:
        t = t[:-1]
    try:
        return int(float(t) * mult) if "." in t else int(t) * mult
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a byte count: {text!r}") from None


def _env(dest: str):
    return os.environ.get(ENV_PREFIX + dest.upper())


def _add(parser: argparse.ArgumentParser, *flags: str, type=str, default=None, **kw) -> None:
    """Add a flag whose default comes from the environment when set."""
    dest = kw.pop("dest", None) or flags[0].lstrip("-").replace("-", "_")
    raw = _env(dest)
    if raw is not None:
        try:
            default = type(raw)
        except (ValueError, argparse.ArgumentTypeError):
            parser.error(f"bad value in {ENV_PREFIX}{dest.upper()}: {raw!r}")
    parser.add_argument(*flags, dest=dest, type=type, default=default, **kw)


def _run_flags(p: argparse.ArgumentParser) -> None:
    _add(p, "--n-max", type=int, help="truncation level N (required)")
    _add(p, "--j", type=int, default=13, help="order J of the divisor series (default 13)")
    _add(p, "--k0", type=int, default=24, help="table row M_k0 used below 2^24 (default 24)")
    _add(p, "--mem-budget", type=parse_bytes, default=DEFAULT_MEM_BUDGET, help="e.g. 2G")
    _add(p, "--checkpoint", type=Path, help="directory for reusable augmented tables")
    _add(p, "--threads", type=int, default=1, help="sieve worker threads")
    _add(p, "--segment-length", type=int, default=DEFAULT_SEGMENT, help=argparse.SUPPRESS)
    _add(p, "--output", "--out", type=Path, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="practical-bounds",
        description="Certified bounds for the density constant of practical numbers.",
    )
    parser.add_argument("--log-level", default=_env("log_level") or "INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="compute the certified interval for c")
    _run_flags(b)
    _add(b, "--format", type=str, default="text", choices=FORMATS)
    _add(b, "--verify", type=str, default="none", choices=VERIFY_LEVELS, help="selftest first")

    s = sub.add_parser("selftest", help="run the built-in checks")
    s.add_argument("level", choices=("fast", "full"))
    _add(s, "--threads", type=int, default=1)

    t = sub.add_parser("table", help="dump the practical rows for reuse")
    _run_flags(t)
    _add(t, "--format", type=str, default="csv", choices=("csv", "binary"))
    t.add_argument("--augmented", action="store_true", help="also write the augmented table")
    for p in (b, s, t):
        p.set_defaults(subparser=p)
    return parser


def _config(args: argparse.Namespace, fmt: str) -> RunConfig:
    if args.n_max is None:
        raise ConfigError("--n-max is required")
    return RunConfig(
        n_max=args.n_max,
        j_order=args.j,
        extension_k0=args.k0,
        mem_budget_bytes=args.mem_budget,
        output_format=fmt,
        checkpoint_dir=args.checkpoint,
        verify_level=getattr(args, "verify", "none"),
        threads=args.threads,
        segment_length=args.segment_length,
    ).validate()


def _checkpoint_path(cfg: RunConfig) -> Path | None:
    if cfg.checkpoint_dir is None:
        return None
    return cfg.checkpoint_dir / f"augmented_N{cfg.n_max}_J{cfg.j_order}.bin"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _selftest(level: str, threads: int) -> int:
    failed = 0
    for r in run_checks(level, threads=threads):
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}", file=sys.stderr)
        failed += not r.passed
    return EXIT_SELFTEST if failed else EXIT_OK


def cmd_bounds(cfg: RunConfig, out: Path | None = None) -> int:
    if cfg.verify_level != "none" and _selftest(cfg.verify_level, cfg.threads):
        return EXIT_SELFTEST
    ensure_transcendentals_verified()
    kw = {"segment_length": cfg.segment_length, "threads": cfg.threads}
    ckpt = _checkpoint_path(cfg)
    if ckpt is not None and ckpt.exists():
        log.info("reusing checkpoint %s", ckpt)
        table = load_augmented(ckpt, cfg.j_order, "binary", N=cfg.n_max)
    else:
        table = augmented_table(cfg.n_max, cfg.j_order, **kw)
        if ckpt is not None:
            ckpt.parent.mkdir(parents=True, exist_ok=True)
            dump_augmented(table, ckpt, "binary")
    report = bounds_from_aggregates(aggregate(table), cfg.extension_k0, **kw)
    _emit(report_serialize(report, cfg.output_format), out)
    return EXIT_OK


def cmd_table(cfg: RunConfig, out: Path | None, fmt: str, augmented: bool) -> int:
    if out is None:
        if cfg.checkpoint_dir is None:
            raise ConfigError("table needs --out or --checkpoint")
        ext = "csv" if fmt == "csv" else "bin"
        out = cfg.checkpoint_dir / f"rows_N{cfg.n_max}.{ext}"
    out.parent.mkdir(parents=True, exist_ok=True)
    if augmented:
        table = augmented_table(cfg.n_max, cfg.j_order, segment_length=cfg.segment_length, threads=cfg.threads)
        dump_rows(table.rows, out, fmt)
        dump_augmented(table, out.with_name(out.stem + f"_aug_J{cfg.j_order}" + out.suffix), fmt)
    else:
        dump_rows(enumerate_practical(cfg.n_max), out, fmt)
    log.info("wrote %s", out)
    return EXIT_OK


def _failing_module(exc: BaseException) -> str:
    tb, name = exc.__traceback__, "practical_bounds"
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        if mod.startswith("practical_bounds"):
            name = mod
        tb = tb.tb_next
    return name


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=args.log_level.upper(), format="%(asctime)s %(name)s %(message)s"
    )
    t0 = time.perf_counter()
    try:
        if args.command == "selftest":
            status = _selftest(args.level, args.threads)
        elif args.command == "bounds":
            status = cmd_bounds(_config(args, args.format), args.output)
        else:
            status = cmd_table(_config(args, "csv"), args.output, args.format, args.augmented)
    except ConfigError as exc:
        sub = args.subparser
        sub.print_usage(sys.stderr)
        print(f"{sub.prog}: error: [{_failing_module(exc)}] {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConsistencyError, RigorError) as exc:
        print(f"error: [{_failing_module(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except OSError as exc:
        print(f"error: [{_failing_module(exc)}] I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("%s finished in %.2fs (exit %d)", args.command, time.perf_counter() - t0, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
