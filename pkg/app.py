"""Command-line entry point for the G-irregular prime toolkit (``girr``)."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import mpmath

from src.config import Config
from src.errors import (
    CoverageError,
    DomainError,
    InvariantError,
    PrecisionError,
    ResourceLimitError,
    StoreCorruptionError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_COVERAGE = 3
EXIT_CORRUPT = 4


def _configure_logging(verbose: bool) -> None:
    # Configure logging
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def _store_path(path: Optional[str], default_name: str) -> Path:
    if path:
        return Path(path)
    return Config.STORE_DIR / default_name


def cmd_scan(args: argparse.Namespace) -> int:
    """Run or resume a scan."""
    from src.scan import scan
    from src.schemas import ScanConfig, ScanKind

    kinds = ScanKind.parse(args.kinds)
    config = ScanConfig(
        x_max=args.x_max,
        kinds=kinds,
        d=args.d,
        a=args.a,
        worker_count=args.threads or Config.WORKERS,
        output_path=_store_path(args.out, f"scan_{'_'.join(k.value for k in kinds)}.jsonl"),
        resume=args.resume,
        chunk_size=args.chunk_size or Config.CHUNK_SIZE,
    )
    summary = scan(config)
    print(f"store:     {summary.output_path}")
    print(f"x_max:     {summary.x_max}")
    print(f"kinds:     {','.join(summary.kinds)}")
    print(f"classified {summary.processed} primes ({summary.resumed_from} already committed)")
    print(f"chunks:    {summary.chunks}")
    print(f"elapsed:   {summary.seconds:.1f} s")
    return EXIT_OK


def cmd_ratio(args: argparse.Namespace) -> int:
    """Print the experimental ratio of a kind in a residue class."""
    from src.scan import ratio

    row = ratio(Path(args.store), args.d, args.a, args.x, args.kind)
    print(f"kind={row.kind.value} d={row.d} a={row.a} x={row.x}")
    print(f"count:       {row.numerator}")
    print(f"pi(x;d,a):   {row.denominator}")
    print(f"ratio:       {row.ratio}")
    if row.theoretical is not None:
        print(f"theoretical: {row.theoretical}")
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    """Regenerate one of the tables and print or export it."""
    from src.export import TableExporter
    from src.schemas import TableExportOptions
    from src.tables import build_table

    table = build_table(args.which, full=args.full, max_x=args.max_x, workers=args.threads)
    exporter = TableExporter()
    print(exporter.render_text(table), end="")
    if args.csv:
        exporter.export_csv(table, TableExportOptions(format="csv"), Path(args.csv))
    if args.pdf:
        exporter.export_pdf(table, TableExportOptions(format="pdf"), Path(args.pdf))
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    """Print c(d,a), R(d,a), delta(d,a) and 1 - delta/sqrt(e)."""
    from src.density import R_factor, delta

    result = delta(args.d, args.a, args.digits)
    digits = args.digits or Config.DIGITS
    r_value = result.R_over_A_part if result.R_over_A_part is not None else R_factor(result.modulus, result.a)
    print(f"d = {result.modulus.d}")
    print(f"a = {result.a}")
    print(f"c = {result.c}")
    print(f"R = {r_value}")
    print(f"delta = {mpmath.nstr(result.delta, digits)}")
    print(f"1 - delta/sqrt(e) = {mpmath.nstr(result.conjectured_g_ratio, digits)}")
    return EXIT_OK


def cmd_artin(args: argparse.Namespace) -> int:
    """Print Artin's constant."""
    from src.density import artin_constant

    print(mpmath.nstr(artin_constant(args.digits), args.digits))
    return EXIT_OK


def cmd_irregular(args: argparse.Namespace) -> int:
    """List the first irregular primes of a kind."""
    from src.classify import first_irregular

    for p, indices in first_irregular(args.kind, args.count):
        if args.kind.upper() == "G":
            print(p)
        else:
            print(f"{p}  {' '.join(str(i) for i in indices)}")
    return EXIT_OK


def cmd_store(args: argparse.Namespace) -> int:
    """Inspect a scan store through its index."""
    from src.scan import list_store_primes, store_record, store_statistics

    if args.prime is not None:
        print(store_record(Path(args.store), args.prime).model_dump_json(indent=2))
        return EXIT_OK
    if args.list:
        primes = list_store_primes(Path(args.store), args.list, limit=args.limit, offset=args.offset)
        print(" ".join(str(p) for p in primes))
        return EXIT_OK

    stats = store_statistics(Path(args.store))
    print(f"store:    {stats['store_path']}")
    print(f"kinds:    {','.join(stats['kinds'])}")
    if stats["residue_filter"]:
        d, a = stats["residue_filter"]
        print(f"class:    p = {a} (mod {d})")
    state = "complete" if stats["complete"] else "partial"
    print(f"covered:  {stats['covered']} ({state}, {stats['chunks']} chunks)")
    print(f"records:  {stats['total_records']}")
    for kind in stats["kinds"]:
        print(f"{kind}:        {stats['counts'][kind]}")
    return EXIT_OK


def cmd_config(args: argparse.Namespace) -> int:
    """Show the active configuration."""
    print(Config.get_status_message())
    return EXIT_OK if Config.validate() else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for all subcommands."""
    parser = argparse.ArgumentParser(
        prog="girr",
        description="Irregular primes for Bernoulli, Euler and Genocchi numbers, and their densities.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="Classify every prime up to a bound")
    p_scan.add_argument("--x-max", type=int, required=True)
    p_scan.add_argument("--kinds", default="B,E,G,Q,W", help="Comma separated subset of B,E,G,Q,W")
    p_scan.add_argument("--d", type=int, help="Restrict to primes p = a (mod d)")
    p_scan.add_argument("--a", type=int)
    p_scan.add_argument("--threads", type=int, help="Worker processes (default GIRR_WORKERS)")
    p_scan.add_argument("--out", help="Store file (default under GIRR_STORE)")
    p_scan.add_argument("--resume", action="store_true", help="Continue after the last committed chunk")
    p_scan.add_argument("--chunk-size", type=int)
    p_scan.set_defaults(func=cmd_scan)

    p_ratio = sub.add_parser("ratio", help="Experimental ratio from a scan store")
    p_ratio.add_argument("--kind", required=True, choices=["B", "E", "G", "Q", "W"])
    p_ratio.add_argument("--d", type=int, default=1)
    p_ratio.add_argument("--a", type=int, default=1)
    p_ratio.add_argument("--x", type=int, required=True)
    p_ratio.add_argument("--store", required=True)
    p_ratio.set_defaults(func=cmd_ratio)

    p_table = sub.add_parser("table", help="Regenerate a numerical table")
    p_table.add_argument("--which", type=int, required=True, choices=[1, 2, 3, 4, 5])
    p_table.add_argument("--full", action="store_true", help="Full bounds (multi-hour for tables 3 and 4)")
    p_table.add_argument("--max-x", type=int, help="Largest scan bound to use")
    p_table.add_argument("--threads", type=int)
    p_table.add_argument("--csv", help="Also write CSV to this path")
    p_table.add_argument("--pdf", help="Also write PDF to this path")
    p_table.set_defaults(func=cmd_table)

    p_density = sub.add_parser("density", help="delta(d, a) and the conjectured G-ratio")
    p_density.add_argument("--d", type=int, required=True)
    p_density.add_argument("--a", type=int, required=True)
    p_density.add_argument("--digits", type=int)
    p_density.set_defaults(func=cmd_density)

    p_artin = sub.add_parser("artin", help="Artin's constant")
    p_artin.add_argument("--digits", type=int, default=30)
    p_artin.set_defaults(func=cmd_artin)

    p_irr = sub.add_parser("irregular", help="First irregular primes of a kind")
    p_irr.add_argument("--kind", required=True, choices=["B", "E", "G"])
    p_irr.add_argument("--count", type=int, default=20)
    p_irr.set_defaults(func=cmd_irregular)

    p_store = sub.add_parser("store", help="Statistics, listings and records of a scan store")
    p_store.add_argument("--store", required=True)
    p_store.add_argument("--list", choices=["B", "E", "G", "Q", "W"], help="List primes of this kind")
    p_store.add_argument("--limit", type=int, default=50)
    p_store.add_argument("--offset", type=int, default=0)
    p_store.add_argument("--prime", type=int, help="Show the record of one prime")
    p_store.set_defaults(func=cmd_store)

    p_config = sub.add_parser("config", help="Show configuration")
    p_config.set_defaults(func=cmd_config)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run a subcommand and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except CoverageError as e:
        logger.error(f"{e} (covered up to {e.covered})")
        return EXIT_COVERAGE
    except StoreCorruptionError as e:
        logger.error(f"{e} (last valid chunk {e.last_valid_chunk})")
        return EXIT_CORRUPT
    except ResourceLimitError as e:
        logger.error(f"Over budget: {e}")
        return EXIT_COVERAGE
    except (DomainError, PrecisionError, ValueError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except InvariantError as e:
        logger.critical(f"Invariant violated: {e}")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
