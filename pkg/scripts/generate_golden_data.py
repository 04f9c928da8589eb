#!/usr/bin/env python3
"""Generate golden snapshots of the exact sequences and a few residue series."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.config import Config  # noqa: E402
from src.exactnums import (  # noqa: E402
    bernoulli_exact,
    dump_jsonl,
    euler_exact,
    euler_poly_at_zero_exact,
    genocchi_exact,
)
from src.modpseq import bernoulli_all_mod_p, euler_all_mod_p, genocchi_all_mod_p, write_snapshot  # noqa: E402

EXACT_BOUND = 500
SNAPSHOT_PRIMES = (37, 1093, 3511)


def main():
    """Write every snapshot under data/golden."""
    print("Generating golden data...")

    target = Config.DATA_DIR / "golden"
    target.mkdir(parents=True, exist_ok=True)

    # Exact sequences
    for name, sequence in (
        ("genocchi", genocchi_exact(EXACT_BOUND)),
        ("euler", euler_exact(EXACT_BOUND)),
        ("bernoulli", bernoulli_exact(EXACT_BOUND)),
        ("euler_poly_at_zero", euler_poly_at_zero_exact(EXACT_BOUND - 1)),
    ):
        path = dump_jsonl(sequence, target / f"{name}_{EXACT_BOUND}.jsonl")
        print(f"  {path.name}: {len(sequence)} values")

    # Residue series
    for p in SNAPSHOT_PRIMES:
        bernoulli = bernoulli_all_mod_p(p)
        for series in (bernoulli, euler_all_mod_p(p), genocchi_all_mod_p(p, bernoulli=bernoulli)):
            path = write_snapshot(series, target / f"{series.kind.value.lower()}_{p}.bin")
            print(f"  {path.name}: zeros at {series.zero_indices()}")

    print(f"\nGolden data written to {target}")


if __name__ == "__main__":
    main()
