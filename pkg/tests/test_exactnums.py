"""Tests for exactnums module."""

import shutil
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

from src.errors import DomainError
from src.exactnums import (
    bernoulli_exact,
    dump_jsonl,
    euler_exact,
    euler_poly_at_zero,
    euler_poly_at_zero_exact,
    genocchi_exact,
    load_jsonl,
    staudt_clausen_denominator,
)
from src.schemas import SequenceKind


@pytest.fixture
def temp_dir():
    """Create temporary directory for snapshots."""
    temp_dir = Path(tempfile.mkdtemp())

    yield temp_dir

    # Cleanup
    shutil.rmtree(temp_dir)


def test_genocchi_small_values():
    """Test G_0..G_10."""
    assert genocchi_exact(10).values == (0, 1, -1, 0, 1, 0, -3, 0, 17, 0, -155)


def test_euler_small_values():
    """Test E_0..E_10."""
    assert euler_exact(10).values == (1, 0, -1, 0, 5, 0, -61, 0, 1385, 0, -50521)


def test_bernoulli_small_values():
    """Test B_0..B_12 with B_1 = -1/2."""
    values = bernoulli_exact(12).values
    assert values[0] == 1
    assert values[1] == Fraction(-1, 2)
    assert values[2] == Fraction(1, 6)
    assert values[4] == Fraction(-1, 30)
    assert values[12] == Fraction(-691, 2730)
    assert all(values[m] == 0 for m in range(3, 13, 2))


def test_bernoulli_matches_sympy():
    """Test against sympy up to 60."""
    values = bernoulli_exact(60).values
    for m in range(2, 61, 2):
        assert values[m] == Fraction(str(sympy.bernoulli(m)))


def test_euler_matches_sympy():
    """Test against sympy up to 40."""
    values = euler_exact(40).values
    for n in range(0, 41):
        assert values[n] == int(sympy.euler(n))


def test_genocchi_bernoulli_relation():
    """Test G_n = 2 (1 - 2^n) B_n."""
    genocchi = genocchi_exact(50)
    bernoulli = bernoulli_exact(50)
    for n in range(2, 51, 2):
        assert genocchi[n] == 2 * (1 - 2 ** n) * bernoulli[n]


def test_staudt_clausen_denominator():
    """Test denominators of B_2, B_12."""
    assert staudt_clausen_denominator(2) == 6
    assert staudt_clausen_denominator(12) == 2730


def test_euler_poly_at_zero():
    """Test E_n(0) = G_{n+1}/(n+1)."""
    assert euler_poly_at_zero(0) == 1
    assert euler_poly_at_zero(1) == Fraction(-1, 2)
    assert euler_poly_at_zero(3) == Fraction(1, 4)
    assert euler_poly_at_zero(2) == 0
    sequence = euler_poly_at_zero_exact(9)
    assert sequence.kind == SequenceKind.EULER_POLY_AT_ZERO
    assert sequence[5] == Fraction(-1, 2)
    assert sequence[9] == Fraction(-155, 10)


def test_negative_bound_rejected():
    """Test N < 0."""
    with pytest.raises(DomainError):
        genocchi_exact(-1)
    with pytest.raises(DomainError):
        euler_poly_at_zero(-2)


def test_jsonl_snapshot(temp_dir):
    """Test dump and load of exact snapshots."""
    path = dump_jsonl(bernoulli_exact(20), temp_dir / "bernoulli.jsonl")
    loaded = load_jsonl(path, SequenceKind.BERNOULLI)
    assert loaded.values == bernoulli_exact(20).values

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[2] == '{"index": 2, "value": "1/6"}'


def test_jsonl_snapshot_detects_gap(temp_dir):
    """Test that a missing index is rejected."""
    path = temp_dir / "broken.jsonl"
    path.write_text('{"index": 0, "value": "0"}\n{"index": 2, "value": "-1"}\n', encoding="utf-8")
    with pytest.raises(ValueError):
        load_jsonl(path, SequenceKind.GENOCCHI)
