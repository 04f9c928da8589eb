"""Regeneration of the five numerical tables."""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

from src.config import Config
from src.density import conjectured_ratio, primorial_family, truncate_decimal
from src.errors import DomainError
from src.modarith import FactorSieve
from src.scan import PrimeScanner, ratio
from src.schemas import ReproducedTable, ScanConfig, ScanKind
from src.storage import ScanStore

logger = logging.getLogger(__name__)

PRIMORIAL_ROWS = (10 ** 3, 10 ** 4, 10 ** 5)
PRIMORIAL_FULL_ROW = 10 ** 6

RESIDUE_ROWS_BE: Tuple[Tuple[int, int], ...] = (
    (3, 2), (4, 1), (5, 4), (7, 4), (9, 8), (12, 5), (15, 13), (20, 13),
)
RESIDUE_ROWS_GQ: Tuple[Tuple[int, int], ...] = (
    (3, 1), (5, 2), (4, 1), (20, 9), (12, 11), (20, 19), (8, 7), (24, 13),
)
G_RATIO_XS = (10 ** 5, 10 ** 6, 2 * 10 ** 6, 3 * 10 ** 6, 4 * 10 ** 6, 5 * 10 ** 6)
BE_X = 10 ** 5

BE_STORE = "be_scan.jsonl"
G_STORE = "g_scan.jsonl"
Q_STORE = "q_scan.jsonl"


def _ensure_scan(path: Path, kinds: List[ScanKind], x: int, workers: Optional[int]) -> Path:
    """Run or extend a scan so the store covers x."""
    store = ScanStore(path)
    if store.exists():
        state = store.verify()
        if state.covered >= x:
            return path
    config = ScanConfig(
        x_max=x,
        kinds=kinds,
        worker_count=workers or Config.WORKERS,
        output_path=path,
        resume=True,
        chunk_size=Config.CHUNK_SIZE,
    )
    PrimeScanner(config).run()
    return path


def _label(d: int, a: int) -> str:
    return f"({d},{a})"


def table_primorial(full: bool = False) -> ReproducedTable:
    """delta(4 d_n, 1), its normalisation and delta(8 d_n, a_n) for the primorial family."""
    rows_n = PRIMORIAL_ROWS + ((PRIMORIAL_FULL_ROW,) if full else ())
    sieve = FactorSieve(max(rows_n))
    rows = []
    for n in rows_n:
        row = primorial_family(n, sieve=sieve)
        rows.append([
            str(n),
            truncate_decimal(row.delta_4dn_1.delta),
            truncate_decimal(row.normalization),
            truncate_decimal(row.delta_8dn_an.delta),
        ])
    footnotes = [] if full else [f"Row n = {PRIMORIAL_FULL_ROW} needs --full."]
    return ReproducedTable(
        which=1,
        title="delta(4d_n,1) and delta(8d_n,a_n) for the primorial family",
        headers=["n", "delta(4d_n,1)", "delta(4d_n,1)e^gamma loglog(4d_n)", "delta(8d_n,a_n)"],
        rows=rows,
        footnotes=footnotes,
    )


def table_be(limit: int, workers: Optional[int] = None) -> ReproducedTable:
    """B- and E-irregular shares in residue classes at x = 10^5."""
    theoretical = truncate_decimal(conjectured_ratio(ScanKind.B, 1, 1))
    headers = ["(d,a)", "B ratio", "E ratio", "theoretical"]
    if limit < BE_X:
        return ReproducedTable(
            which=2,
            title=f"B- and E-irregular primes in residue classes, x = {BE_X}",
            headers=headers,
            rows=[[_label(d, a), "-", "-", theoretical] for d, a in RESIDUE_ROWS_BE],
            footnotes=[f"Experimental columns need x = {BE_X}, above --max-x {limit}."],
        )
    path = _ensure_scan(Config.STORE_DIR / BE_STORE, [ScanKind.B, ScanKind.E], BE_X, workers)
    sieve = FactorSieve(BE_X)
    rows = []
    for d, a in RESIDUE_ROWS_BE:
        b_row = ratio(path, d, a, BE_X, ScanKind.B, sieve)
        e_row = ratio(path, d, a, BE_X, ScanKind.E, sieve)
        rows.append([_label(d, a), b_row.ratio, e_row.ratio, theoretical])
    return ReproducedTable(
        which=2,
        title=f"B- and E-irregular primes in residue classes, x = {BE_X}",
        headers=headers,
        rows=rows,
    )


def table_g_growth(limit: int, workers: Optional[int] = None) -> ReproducedTable:
    """P_G(x)/pi(x) over growing x."""
    theoretical = truncate_decimal(conjectured_ratio(ScanKind.G, 1, 1))
    reachable = [x for x in G_RATIO_XS if x <= limit]
    rows = []
    if reachable:
        path = _ensure_scan(Config.STORE_DIR / G_STORE, [ScanKind.G], max(reachable), workers)
        sieve = FactorSieve(max(reachable))
        for x in reachable:
            row = ratio(path, 1, 1, x, ScanKind.G, sieve)
            rows.append([str(x), str(row.numerator), str(row.denominator), row.ratio, theoretical])
    skipped = [x for x in G_RATIO_XS if x > limit]
    footnotes = []
    if skipped:
        footnotes.append(
            f"Rows x = {', '.join(str(x) for x in skipped)} not computed (--max-x {limit}); use --full."
        )
    return ReproducedTable(
        which=3,
        title="The ratio P_G(x)/pi(x)",
        headers=["x", "P_G(x)", "pi(x)", "ratio", "1-3A/(2 sqrt e)"],
        rows=rows,
        footnotes=footnotes,
    )


def _class_table(
    which: int,
    kind: ScanKind,
    store_name: str,
    x: int,
    title: str,
    workers: Optional[int],
) -> ReproducedTable:
    path = _ensure_scan(Config.STORE_DIR / store_name, [kind], x, workers)
    sieve = FactorSieve(x)
    rows = []
    for d, a in RESIDUE_ROWS_GQ:
        row = ratio(path, d, a, x, kind, sieve)
        rows.append([_label(d, a), str(row.numerator), str(row.denominator), row.ratio, row.theoretical])
    return ReproducedTable(
        which=which,
        title=title,
        headers=["(d,a)", "count", "pi(x;d,a)", "ratio", "theoretical"],
        rows=rows,
    )


def table_g_classes(limit: int, full: bool, workers: Optional[int] = None) -> ReproducedTable:
    """G-irregular shares in residue classes."""
    x = Config.FULL_MAX_X if full else min(limit, Config.FULL_MAX_X)
    table = _class_table(4, ScanKind.G, G_STORE, x, f"G-irregular primes in residue classes, x = {x}", workers)
    if x < Config.FULL_MAX_X:
        table.footnotes.append(f"Computed at x = {x}; the full table uses x = {Config.FULL_MAX_X} (--full).")
    return table


def table_q_classes(x: int, workers: Optional[int] = None) -> ReproducedTable:
    """Q(d,a)(x)/pi(x;d,a) against delta(d,a); order computations only."""
    return _class_table(5, ScanKind.Q, Q_STORE, x, f"The ratio Q(d,a)(x)/pi(x;d,a), x = {x}", workers)


def build_table(
    which: int,
    full: bool = False,
    max_x: Optional[int] = None,
    workers: Optional[int] = None,
) -> ReproducedTable:
    """Regenerate one of the tables 1-5.

    Args:
        which: Table number
        full: Use the full bounds (multi-hour for tables 3 and 4)
        max_x: Largest scan bound to use; defaults to the desk or full bound
        workers: Worker processes for any scan that has to run

    Returns:
        The table, with footnotes for rows left out
    """
    if which not in (1, 2, 3, 4, 5):
        raise DomainError(f"table must be 1-5, got {which}")
    limit = max_x or (Config.FULL_MAX_X if full else Config.DESK_MAX_X)
    logger.info(f"Building table {which} (full={full}, max x={limit:,})")

    if which == 1:
        return table_primorial(full)
    if which == 2:
        return table_be(limit, workers)
    if which == 3:
        return table_g_growth(limit, workers)
    if which == 4:
        return table_g_classes(limit, full, workers)
    return table_q_classes(max_x or Config.FULL_MAX_X, workers)
