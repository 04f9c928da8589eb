"""Tests for scan module."""

import shutil
import tempfile
from math import gcd
from pathlib import Path

import pytest

from src.config import Config
from src.errors import CoverageError, DomainError
from src.modarith import FactorSieve
from src.scan import (
    PrimeScanner,
    list_store_primes,
    pi_count,
    plan_chunks,
    ratio,
    scan,
    store_record,
    store_statistics,
)
from src.schemas import ScanConfig, ScanKind
from src.storage import ScanStore


@pytest.fixture
def temp_dir():
    """Create temporary directory for stores."""
    temp_dir = Path(tempfile.mkdtemp())

    yield temp_dir

    # Cleanup
    shutil.rmtree(temp_dir)


def make_config(path, x_max, kinds="B,E", workers=1, resume=False, d=None, a=None, chunk_size=16):
    return ScanConfig(
        x_max=x_max,
        kinds=ScanKind.parse(kinds),
        d=d,
        a=a,
        worker_count=workers,
        output_path=path,
        resume=resume,
        chunk_size=chunk_size,
    )


def test_pi_count():
    """Test prime counts in residue classes."""
    sieve = FactorSieve(100_000)
    assert pi_count(100_000, sieve=sieve) == 9592
    assert pi_count(10, 1, 1) == 4
    # 2 lies in the class 2 mod 3
    assert pi_count(10, 3, 2) == 2
    assert pi_count(10, 3, 1) == 1
    with pytest.raises(DomainError):
        pi_count(10, 4, 2)


def test_plan_chunks_prefix_stable(monkeypatch):
    """Test that planning from a chunk boundary reproduces the remaining plan."""
    monkeypatch.setattr(Config, 'CHUNK_PIVOT_PRIME', 500)
    primes = [int(p) for p in FactorSieve(20_000).primes(3, 20_000)]
    plan = plan_chunks(primes, 64, series=True)

    assert [p for chunk in plan for p in chunk] == primes
    assert len(plan[0]) == 64
    assert len(plan[-2]) < 64

    start = sum(len(chunk) for chunk in plan[:7])
    assert plan_chunks(primes[start:], 64, series=True) == plan[7:]


def test_plan_chunks_without_series():
    """Test fixed-size chunks for order-only scans."""
    plan = plan_chunks(range(3, 1003, 2), 100, series=False)
    assert [len(chunk) for chunk in plan] == [100] * 5


def test_scan_small(temp_dir):
    """Test a complete scan and its outputs."""
    path = temp_dir / "scan.jsonl"
    summary = scan(make_config(path, 1000))

    assert summary.processed == 167
    assert summary.resumed_from == 0
    assert summary.kinds == ["B", "E", "G", "Q", "W"]

    store = ScanStore(path)
    state = store.verify()
    assert state.complete == 1000
    assert state.record_count == 167
    assert store.sorted_path.exists()
    assert store.index_path.exists()


def test_worker_count_is_invisible(temp_dir):
    """Test identical sorted exports for one and two workers."""
    one = temp_dir / "one.jsonl"
    two = temp_dir / "two.jsonl"
    scan(make_config(one, 1500))
    scan(make_config(two, 1500, workers=2))

    assert ScanStore(one).sorted_path.read_bytes() == ScanStore(two).sorted_path.read_bytes()


def test_resume_after_interruption(temp_dir):
    """Test resuming from a store cut inside a chunk."""
    fresh = temp_dir / "fresh.jsonl"
    cut = temp_dir / "cut.jsonl"
    scan(make_config(fresh, 1500))
    scan(make_config(cut, 1500))

    data = cut.read_bytes()
    cut.write_bytes(data[:len(data) * 2 // 3])
    state = ScanStore(cut).verify()
    assert state.complete is None

    summary = scan(make_config(cut, 1500, resume=True))

    assert summary.resumed_from == state.record_count
    assert summary.resumed_from + summary.processed == 238
    assert ScanStore(fresh).sorted_path.read_bytes() == ScanStore(cut).sorted_path.read_bytes()


def test_resume_extends_complete_scan(temp_dir):
    """Test growing a finished scan to a larger bound."""
    fresh = temp_dir / "fresh.jsonl"
    grown = temp_dir / "grown.jsonl"
    scan(make_config(fresh, 1500))
    scan(make_config(grown, 700))

    summary = scan(make_config(grown, 1500, resume=True))

    assert summary.resumed_from == 124
    assert ScanStore(grown).verify().complete == 1500
    assert ScanStore(fresh).sorted_path.read_bytes() == ScanStore(grown).sorted_path.read_bytes()


def test_resume_noop_when_covered(temp_dir):
    """Test that a covered bound does no work."""
    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 1000))

    summary = scan(make_config(path, 800, resume=True))

    assert summary.processed == 0
    assert summary.resumed_from == 167


def test_resume_header_mismatch(temp_dir):
    """Test resuming with different kinds."""
    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 500))

    with pytest.raises(DomainError):
        scan(make_config(path, 1000, kinds="Q", resume=True))


def test_eta_warning(temp_dir, monkeypatch, caplog):
    """Test the over-budget warning."""
    monkeypatch.setattr(Config, 'SCAN_TIME_BUDGET', 0.0)
    with caplog.at_level("WARNING"):
        scan(make_config(temp_dir / "scan.jsonl", 300))
    assert "budget" in caplog.text


def test_estimate_is_zero_without_series(temp_dir):
    """Test that order-only scans have no series cost."""
    scanner = PrimeScanner(make_config(temp_dir / "scan.jsonl", 1000, kinds="Q,W"))
    assert scanner.estimate_seconds([101, 103]) == 0.0


def test_ratio_from_store(temp_dir):
    """Test ratios read back from a store."""
    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 1000))

    row = ratio(path, 1, 1, 200, ScanKind.B)
    assert row.numerator == 8
    assert row.denominator == 46
    assert row.ratio == "0.173913"
    assert row.theoretical == "0.393469"

    row = ratio(path, 8, 1, 1000, "Q")
    assert row.numerator == 0
    assert row.theoretical == "0.000000"

    assert ratio(path, 1, 1, 1000, "W").theoretical is None


def test_ratio_keeps_residue_for_d_1(temp_dir):
    """Test that the whole set is reported with the residue as given."""
    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 300, kinds="Q"))

    row = ratio(path, 1, 1, 300, "Q")
    assert (row.d, row.a) == (1, 1)
    assert ratio(path, 8, 15, 300, "Q").a == 7


def test_ratio_after_rescan_at_same_path(temp_dir):
    """Test that a fresh scan over an old store is not answered from the old index."""
    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 1000, kinds="Q"))
    assert ratio(path, 1, 1, 1000, "Q").numerator > 0

    scan(make_config(path, 1000, kinds="G"))
    reference = temp_dir / "fresh.jsonl"
    scan(make_config(reference, 1000, kinds="G"))

    row = ratio(path, 1, 1, 1000, "G")
    assert row.numerator == ratio(reference, 1, 1, 1000, "G").numerator
    assert row.numerator > 0


def test_class_counts_add_up(temp_dir):
    """Test that counts over the classes mod d add up to the whole set."""
    sieve = FactorSieve(1000)
    for d in (3, 8, 20, 24):
        dividing = sum(1 for q in (2, 3, 5) if d % q == 0)
        total = sum(pi_count(1000, d, a, sieve) for a in range(d) if gcd(a, d) == 1)
        assert total == pi_count(1000, 1, 1, sieve) - dividing

    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 1000, kinds="B"))
    for kind in ("B", "G", "Q"):
        whole = ratio(path, 1, 1, 1000, kind).numerator
        # no odd prime divides 8
        assert sum(ratio(path, 8, a, 1000, kind).numerator for a in (1, 3, 5, 7)) == whole


def test_store_queries(temp_dir):
    """Test statistics, listings and records read through the index."""
    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 200, kinds="B"))

    stats = store_statistics(path)
    assert stats["total_records"] == 45
    assert stats["counts"]["B"] == 8
    assert stats["covered"] == 200
    assert stats["complete"]
    assert stats["residue_filter"] is None

    assert list_store_primes(path, "G", limit=4, offset=1) == [31, 37, 41, 43]
    assert store_record(path, 37).b_irregular_indices == [32]

    with pytest.raises(CoverageError):
        list_store_primes(path, "E")
    with pytest.raises(DomainError):
        list_store_primes(path, "B", limit=0)
    with pytest.raises(DomainError):
        store_record(path, 91)
    with pytest.raises(CoverageError):
        store_record(path, 211)

def test_ratio_coverage_errors(temp_dir):
    """Test the three coverage failures."""
    path = temp_dir / "scan.jsonl"
    scan(make_config(path, 500, kinds="Q", d=3, a=1))

    with pytest.raises(CoverageError) as excinfo:
        ratio(path, 3, 1, 1000, "Q")
    assert excinfo.value.covered == 500

    with pytest.raises(CoverageError):
        ratio(path, 3, 1, 400, "B")

    with pytest.raises(CoverageError):
        ratio(path, 3, 2, 400, "Q")

    assert ratio(path, 6, 1, 400, "Q").denominator == pi_count(400, 6, 1)

    with pytest.raises(CoverageError):
        ratio(temp_dir / "missing.jsonl", 1, 1, 100, "Q")


@pytest.mark.slow
def test_g_ratio_at_1e5(temp_dir):
    """Test the first row of the G-ratio table."""
    path = temp_dir / "g.jsonl"
    scan(make_config(path, 100_000, kinds="G", workers=Config.WORKERS, chunk_size=Config.CHUNK_SIZE))

    assert ratio(path, 1, 1, 100_000, "G").ratio == "0.661592"


@pytest.mark.slow
def test_be_ratios_at_1e5(temp_dir):
    """Test spot rows of the B/E residue class table."""
    path = temp_dir / "be.jsonl"
    scan(make_config(path, 100_000, kinds="B,E", workers=Config.WORKERS, chunk_size=Config.CHUNK_SIZE))

    assert ratio(path, 3, 2, 100_000, "B").ratio == "0.394424"
    assert ratio(path, 7, 4, 100_000, "B").ratio == "0.391005"
    assert ratio(path, 3, 2, 100_000, "E").ratio == "0.395672"


@pytest.mark.slow
def test_q_ratios_at_5e6(temp_dir):
    """Test every row of the Q table at its full bound."""
    path = temp_dir / "q.jsonl"
    scan(make_config(path, 5_000_000, kinds="Q", workers=Config.WORKERS, chunk_size=4096))

    expected = {
        (3, 1): ("0.449049", "0.448746"),
        (5, 2): ("0.589614", "0.590456"),
        (4, 1): ("0.374664", "0.373955"),
        (20, 9): ("0.395498", "0.393637"),
        (12, 11): ("0.898284", "0.897493"),
        (20, 19): ("0.789316", "0.787275"),
        (8, 7): ("0.747300", "0.747911"),
        (24, 13): ("0.598815", "0.598329"),
    }
    for (d, a), (experimental, theoretical) in expected.items():
        row = ratio(path, d, a, 5_000_000, "Q")
        assert (row.ratio, row.theoretical) == (experimental, theoretical), (d, a)


@pytest.mark.slow
def test_wieferich_below_1e7(temp_dir):
    """Test that 1093 and 3511 are the only Wieferich primes below 10^7."""
    path = temp_dir / "w.jsonl"
    scan(make_config(path, 10_000_000, kinds="W", workers=Config.WORKERS, chunk_size=4096))

    assert ratio(path, 1, 1, 10_000_000, "W").numerator == 2
