"""Parallel, resumable prime scans and the ratios read back from them."""

import logging
import time
from contextlib import contextmanager
from fractions import Fraction
from math import gcd, log2
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.classify import scan_record
from src.config import Config
from src.density import conjectured_ratio, truncate_decimal
from src.errors import CoverageError, DomainError
from src.modarith import FactorSieve
from src.schemas import PrimeRecord, RatioRow, ScanConfig, ScanKind, ScanSummary, StoreHeader, StoreState
from src.storage import RecordIndex, ScanStore

logger = logging.getLogger(__name__)

SERIES_KINDS = frozenset({"B", "E", "G"})

# Per-process state installed by the pool initializer
_WORKER_SIEVE: Optional[FactorSieve] = None
_WORKER_KINDS: Tuple[str, ...] = ()


def _install(sieve: FactorSieve, kinds: Sequence[str]) -> None:
    global _WORKER_SIEVE, _WORKER_KINDS
    _WORKER_SIEVE = sieve
    _WORKER_KINDS = tuple(kinds)


def _init_worker(limit: int, kinds: Sequence[str]) -> None:
    _install(FactorSieve(limit), kinds)


def _classify_chunk(primes: List[int]) -> List[str]:
    return [scan_record(p, _WORKER_KINDS, _WORKER_SIEVE).model_dump_json() for p in primes]


def prime_cost(p: int, series: bool) -> float:
    """Relative work for one prime: p log2 p when a residue series is needed."""
    return p * log2(p) if series else 1.0


def plan_chunks(primes: Iterable[int], chunk_size: int, series: bool) -> List[List[int]]:
    """Split primes into contiguous work units.

    A chunk closes after chunk_size primes or once its cost reaches that of
    chunk_size primes at Config.CHUNK_PIVOT_PRIME, so chunks of large primes
    shrink. The rule restarts at every chunk boundary, which makes the plan
    of any suffix starting at a boundary identical to the original plan.
    """
    budget = chunk_size * prime_cost(max(Config.CHUNK_PIVOT_PRIME, 3), series)
    chunks: List[List[int]] = []
    current: List[int] = []
    spent = 0.0
    for p in primes:
        p = int(p)
        current.append(p)
        spent += prime_cost(p, series)
        if len(current) >= chunk_size or spent >= budget:
            chunks.append(current)
            current, spent = [], 0.0
    if current:
        chunks.append(current)
    return chunks


def class_primes(sieve: FactorSieve, lo: int, hi: int, d: Optional[int] = None, a: Optional[int] = None) -> np.ndarray:
    """Primes in [lo, hi], restricted to p = a (mod d) when a class is given."""
    primes = sieve.primes(lo, hi)
    if d is not None and d > 1:
        primes = primes[primes % d == a % d]
    return primes


def pi_count(x: int, d: int = 1, a: int = 1, sieve: Optional[FactorSieve] = None) -> int:
    """pi(x; d, a), counting 2 when it lies in the class."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if d < 1 or gcd(a, d) != 1:
        raise DomainError(f"need d >= 1 and gcd(a, d) = 1, got d={d}, a={a}")
    if sieve is None or sieve.limit < x:
        sieve = FactorSieve(x)
    if d == 1:
        return sieve.prime_count(x)
    return int(class_primes(sieve, 2, x, d, a).size)


class PrimeScanner:
    """Runs one scan into a JSONL store."""

    def __init__(self, config: ScanConfig):
        """Initialize scanner.

        Args:
            config: Scan parameters
        """
        self.config = config
        self.kinds = config.normalized_kinds()
        self.series = bool(SERIES_KINDS & set(self.kinds))
        self.store = ScanStore(config.output_path)

    def _header(self) -> StoreHeader:
        return StoreHeader(
            kinds=self.kinds,
            d=self.config.d,
            a=self.config.a,
            chunk_size=self.config.chunk_size,
        )

    def _open_store(self) -> StoreState:
        header = self._header()
        if self.config.resume and self.store.exists():
            state = self.store.verify()
            if state.header != header:
                raise DomainError(
                    f"{self.store.path} was written with {state.header.model_dump()}, "
                    f"cannot resume with {header.model_dump()}"
                )
            if state.complete is not None and state.complete >= self.config.x_max:
                return state
            state = self.store.truncate_uncommitted(drop_completion=state.complete is not None)
            logger.info(f"Resuming {self.store.path} after p={state.last_prime} ({len(state.chunks)} chunks)")
            return state
        if self.store.exists():
            logger.warning(f"Overwriting existing store {self.store.path}")
        return self.store.create(header)

    def estimate_seconds(self, primes: Sequence[int]) -> float:
        """Rough wall time from the series cost model."""
        if not self.series or len(primes) == 0:
            return 0.0
        passes = 2 if "E" in self.kinds else 1
        work = float(np.sum(np.asarray(primes, dtype=np.float64) * np.log2(np.asarray(primes, dtype=np.float64))))
        return passes * work * Config.SERIES_COST / self.config.worker_count

    def _results(self, chunks: List[List[int]], sieve: FactorSieve) -> Iterator[List[str]]:
        if self.config.worker_count == 1 or len(chunks) <= 1:
            _install(sieve, self.kinds)
            for chunk in chunks:
                yield _classify_chunk(chunk)
            return
        with Pool(
            processes=self.config.worker_count,
            initializer=_init_worker,
            initargs=(self.config.x_max, self.kinds),
        ) as pool:
            yield from pool.imap(_classify_chunk, chunks)

    def run(self) -> ScanSummary:
        """Scan every prime up to x_max not yet committed to the store."""
        started = time.time()
        config = self.config
        state = self._open_store()
        resumed_from = state.record_count

        if state.complete is not None and state.complete >= config.x_max:
            logger.info(f"{self.store.path} already covers x={config.x_max:,}")
            self._finish(state)
            return ScanSummary(
                output_path=self.store.path,
                x_max=config.x_max,
                kinds=self.kinds,
                resumed_from=resumed_from,
                chunks=len(state.chunks),
                seconds=time.time() - started,
            )

        sieve = FactorSieve(config.x_max)
        start = (state.last_prime or 2) + 1
        primes = class_primes(sieve, max(start, 3), config.x_max, config.d, config.a)
        chunks = plan_chunks(primes, config.chunk_size, self.series)

        eta = self.estimate_seconds(primes)
        if eta > Config.SCAN_TIME_BUDGET:
            logger.warning(
                f"Scan of {len(primes):,} primes up to {config.x_max:,} for {','.join(self.kinds)} "
                f"has an ETA of {eta / 3600:.1f} h, above the {Config.SCAN_TIME_BUDGET / 3600:.1f} h budget"
            )

        logger.info(
            f"Scanning {len(primes):,} primes in {len(chunks)} chunks "
            f"with {config.worker_count} worker(s): {self.store.path}"
        )
        chunk_id = len(state.chunks)
        processed = 0
        for lines in self._results(chunks, sieve):
            self.store.append_chunk(chunk_id, lines)
            chunk_id += 1
            processed += len(lines)
            if chunk_id % 50 == 0:
                logger.info(f"{processed:,}/{len(primes):,} primes classified")

        self.store.mark_complete(config.x_max)
        state = self.store.verify()
        self._finish(state)

        elapsed = time.time() - started
        logger.info(f"Scan finished: {processed:,} primes in {elapsed:.1f} s")
        return ScanSummary(
            output_path=self.store.path,
            x_max=config.x_max,
            kinds=self.kinds,
            processed=processed,
            resumed_from=resumed_from,
            chunks=len(state.chunks),
            seconds=elapsed,
        )

    def _finish(self, state: StoreState) -> None:
        self.store.write_sorted(state)
        index = RecordIndex(self.store.index_path)
        try:
            index.ensure_current(self.store, state)
        finally:
            index.dispose()


def scan(config: ScanConfig) -> ScanSummary:
    """Classify every prime up to config.x_max into config.output_path."""
    return PrimeScanner(config).run()


def _verified_store(store_path: Path) -> Tuple[ScanStore, StoreState]:
    store = ScanStore(store_path)
    if not store.exists():
        raise CoverageError(f"no scan store at {store.path}", covered=None)
    return store, store.verify()


def _require_kind(store: ScanStore, state: StoreState, kind: ScanKind) -> None:
    if kind.value not in state.header.kinds:
        raise CoverageError(f"{store.path} does not record kind {kind.value}", covered=state.covered)


@contextmanager
def _current_index(store: ScanStore, state: StoreState) -> Iterator[RecordIndex]:
    """The store's SQLite index, rebuilt first when it lags the store."""
    index = RecordIndex(store.index_path)
    try:
        index.ensure_current(store, state)
        yield index
    finally:
        index.dispose()


def store_statistics(store_path: Path) -> Dict[str, Any]:
    """Record totals, per-kind counts and coverage of a store."""
    store, state = _verified_store(store_path)
    with _current_index(store, state) as index:
        stats = index.get_statistics()
    stats.update(
        store_path=str(store.path),
        kinds=state.header.kinds,
        residue_filter=None if state.header.d is None else (state.header.d, state.header.a),
        chunks=len(state.chunks),
        covered=state.covered,
        complete=state.complete is not None,
    )
    return stats


def list_store_primes(store_path: Path, kind: str, limit: int = 50, offset: int = 0) -> List[int]:
    """Primes of the store having the kind's property, in increasing order."""
    kind = ScanKind(kind)
    if limit < 1 or offset < 0:
        raise DomainError(f"need limit >= 1 and offset >= 0, got limit={limit}, offset={offset}")
    store, state = _verified_store(store_path)
    _require_kind(store, state, kind)
    with _current_index(store, state) as index:
        return index.list_primes(kind, limit=limit, offset=offset)


def store_record(store_path: Path, p: int) -> PrimeRecord:
    """The committed record of one prime.

    Raises:
        CoverageError: p lies beyond the store's coverage
        DomainError: p is not an odd prime held by the store
    """
    store, state = _verified_store(store_path)
    if p > state.covered:
        raise CoverageError(f"{store.path} covers primes up to {state.covered:,} only", covered=state.covered)
    with _current_index(store, state) as index:
        record = index.get_record(p)
    if record is None:
        raise DomainError(f"{p} is not an odd prime recorded in {store.path}")
    return record


def ratio(store_path: Path, d: int, a: int, x: int, kind: str, sieve: Optional[FactorSieve] = None) -> RatioRow:
    """Share of primes p <= x, p = a (mod d), having the kind's property.

    Raises:
        CoverageError: the store lacks the kind, the class or the range up to x
    """
    kind = ScanKind(kind)
    if d < 1 or gcd(a, d) != 1:
        raise DomainError(f"need d >= 1 and gcd(a, d) = 1, got d={d}, a={a}")
    # d = 1 keeps the residue as typed
    shown = a if d == 1 else a % d
    a %= d

    store, state = _verified_store(store_path)
    header = state.header
    _require_kind(store, state, kind)
    if header.d is not None and (d % header.d or a % header.d != header.a % header.d):
        raise CoverageError(
            f"{store.path} only holds p = {header.a} (mod {header.d}), not the class {a} mod {d}",
            covered=state.covered,
        )
    if state.covered < x:
        logger.error(f"Store covers p <= {state.covered:,}, requested x={x:,}")
        raise CoverageError(f"{store.path} covers primes up to {state.covered:,} only", covered=state.covered)

    with _current_index(store, state) as index:
        numerator = index.count(kind, d, a, x)
    denominator = pi_count(x, d, a, sieve)
    if denominator == 0:
        raise DomainError(f"no primes p <= {x} with p = {a} (mod {d})")

    theoretical = None
    if kind != ScanKind.W:
        theoretical = truncate_decimal(conjectured_ratio(kind, d, a))
    return RatioRow(
        kind=kind,
        d=d,
        a=shown,
        x=x,
        numerator=numerator,
        denominator=denominator,
        ratio=truncate_decimal(Fraction(numerator, denominator)),
        theoretical=theoretical,
    )
