"""End-to-end tests for the girr command line."""

import shutil
import tempfile
from pathlib import Path

import pytest

from app import EXIT_CORRUPT, EXIT_COVERAGE, EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, main
from src.config import Config
from src.errors import InvariantError

pytestmark = pytest.mark.integration


@pytest.fixture
def temp_dir(monkeypatch):
    """Create temporary store directory."""
    temp_dir = Path(tempfile.mkdtemp())
    monkeypatch.setattr(Config, 'STORE_DIR', temp_dir)

    yield temp_dir

    # Cleanup
    shutil.rmtree(temp_dir)


def test_config(capsys):
    """Test the configuration summary."""
    assert main(["config"]) == EXIT_OK
    assert "Store directory" in capsys.readouterr().out


def test_artin(capsys):
    """Test Artin's constant to 20 digits."""
    assert main(["artin", "--digits", "20"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0.37395581361920228805"


def test_density(capsys):
    """Test the density of (3, 1)."""
    assert main(["density", "--d", "3", "--a", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "c = 3/4" in out
    assert "R = 8/5" in out
    assert "delta = 0.448746" in out
    assert "1 - delta/sqrt(e) = 0.727821" in out


def test_density_not_coprime():
    """Test gcd(a, d) != 1."""
    assert main(["density", "--d", "6", "--a", "3"]) == EXIT_USAGE


def test_usage_error():
    """Test unknown subcommands and missing arguments."""
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["ratio", "--kind", "B"]) == EXIT_USAGE


def test_irregular(capsys):
    """Test the first B-irregular primes."""
    assert main(["irregular", "--kind", "B", "--count", "3"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["37  32", "59  44", "67  58"]


def test_scan_and_ratio(temp_dir, capsys):
    """Test a scan followed by ratio queries."""
    store = temp_dir / "scan.jsonl"
    assert main(["scan", "--x-max", "1000", "--kinds", "B,E", "--threads", "1", "--out", str(store)]) == EXIT_OK
    assert "classified 167 primes" in capsys.readouterr().out

    assert main(["ratio", "--kind", "B", "--x", "200", "--store", str(store)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ratio:       0.173913" in out
    assert "theoretical: 0.393469" in out

    assert main(["ratio", "--kind", "B", "--x", "5000", "--store", str(store)]) == EXIT_COVERAGE


def test_scan_default_store(temp_dir):
    """Test that scans land in GIRR_STORE by default."""
    assert main(["scan", "--x-max", "200", "--kinds", "Q", "--threads", "1"]) == EXIT_OK
    assert (temp_dir / "scan_Q.jsonl").exists()


def test_ratio_on_corrupt_store(temp_dir):
    """Test the corruption exit code."""
    store = temp_dir / "scan.jsonl"
    assert main(["scan", "--x-max", "500", "--kinds", "Q", "--threads", "1",
                 "--chunk-size", "8", "--out", str(store)]) == EXIT_OK
    lines = store.read_text(encoding="utf-8").splitlines(keepends=True)
    lines[2] = lines[2].replace('"wieferich":false', '"wieferich":true')
    store.write_text("".join(lines), encoding="utf-8")

    assert main(["ratio", "--kind", "W", "--x", "400", "--store", str(store)]) == EXIT_CORRUPT


def test_table_with_csv(temp_dir, capsys):
    """Test the primorial table with CSV output."""
    target = temp_dir / "table1.csv"
    assert main(["table", "--which", "1", "--csv", str(target)]) == EXIT_OK

    assert "0.080954" in capsys.readouterr().out
    assert target.read_text(encoding="utf-8").splitlines()[1] == "1000,0.080954,0.989659,0.999872"


def test_precision_beyond_limit():
    """Test that an unreachable precision is a usage error."""
    assert main(["artin", "--digits", "150"]) == EXIT_USAGE


def test_scan_over_sieve_cap(temp_dir, monkeypatch):
    """Test that a scan past the sieve cap is a budget error."""
    monkeypatch.setattr(Config, 'SIEVE_MAX_LIMIT', 1000)
    assert main(["scan", "--x-max", "5000", "--kinds", "Q", "--threads", "1",
                 "--out", str(temp_dir / "scan.jsonl")]) == EXIT_COVERAGE


def test_invariant_failure(monkeypatch):
    """Test the exit code of a failed cross-check."""
    import src.density

    def broken(digits=None):
        raise InvariantError("A out of range")

    monkeypatch.setattr(src.density, 'artin_constant', broken)
    assert main(["artin", "--digits", "20"]) == EXIT_INVARIANT


def test_store_inspection(temp_dir, capsys):
    """Test statistics, listings and single records of a store."""
    store = temp_dir / "scan.jsonl"
    assert main(["scan", "--x-max", "400", "--kinds", "B", "--threads", "1", "--out", str(store)]) == EXIT_OK
    capsys.readouterr()

    assert main(["store", "--store", str(store)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "covered:  400 (complete" in out
    assert "records:  77" in out

    assert main(["store", "--store", str(store), "--list", "B", "--limit", "3"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "37 59 67"

    assert main(["store", "--store", str(store), "--prime", "157"]) == EXIT_OK
    assert '"b_irregular_indices": [\n    62,\n    110\n  ]' in capsys.readouterr().out

    assert main(["store", "--store", str(store), "--prime", "1009"]) == EXIT_COVERAGE
    assert main(["store", "--store", str(store), "--prime", "221"]) == EXIT_USAGE
    assert main(["store", "--store", str(store), "--list", "E"]) == EXIT_COVERAGE
