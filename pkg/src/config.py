"""Configuration management for the G-irregular prime toolkit."""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Application configuration."""

    # Paths
    BASE_DIR = Path(__file__).parent.parent
    DATA_DIR = BASE_DIR / "data"

    # Ensure directories exist
    DATA_DIR.mkdir(exist_ok=True)

    # Scan store
    STORE_DIR: Path = Path(os.getenv("GIRR_STORE", str(DATA_DIR)))

    # Sieve memory cap (int32 table, 4 bytes per entry)
    SIEVE_MAX_LIMIT: int = int(os.getenv("GIRR_SIEVE_MAX_LIMIT", "200000000"))

    # Series kernel
    NTT_THRESHOLD: int = int(os.getenv("GIRR_NTT_THRESHOLD", "64"))

    # Work distribution
    CHUNK_SIZE: int = int(os.getenv("GIRR_CHUNK_SIZE", "256"))
    CHUNK_PIVOT_PRIME: int = int(os.getenv("GIRR_CHUNK_PIVOT_PRIME", "4096"))
    WORKERS: int = int(os.getenv("GIRR_WORKERS", str(os.cpu_count() or 1)))

    # ETA model: seconds per p*log2(p) unit of series work
    SCAN_TIME_BUDGET: float = float(os.getenv("GIRR_SCAN_TIME_BUDGET", "3600"))
    SERIES_COST: float = float(os.getenv("GIRR_SERIES_COST", "2e-7"))

    # Densities
    DIGITS: int = int(os.getenv("GIRR_DIGITS", "30"))
    EXACT_PRIME_CAP: int = int(os.getenv("GIRR_EXACT_PRIME_CAP", "2000"))
    ARTIN_CUTOFF: int = int(os.getenv("GIRR_ARTIN_CUTOFF", "100"))

    # Table reproduction bounds
    DESK_MAX_X: int = int(os.getenv("GIRR_DESK_MAX_X", "100000"))
    FULL_MAX_X: int = int(os.getenv("GIRR_FULL_MAX_X", "5000000"))

    @classmethod
    def validate(cls) -> bool:
        """Validate configuration."""
        if cls.SIEVE_MAX_LIMIT < 2 or cls.NTT_THRESHOLD < 1:
            return False
        if cls.CHUNK_SIZE < 1 or cls.WORKERS < 1:
            return False
        if not 20 <= cls.DIGITS <= 100:
            return False
        if cls.ARTIN_CUTOFF < 2:
            return False
        return cls.DESK_MAX_X <= cls.FULL_MAX_X

    @classmethod
    def get_status_message(cls) -> str:
        """Get configuration status message."""
        messages = []
        messages.append(f"Store directory: {cls.STORE_DIR}")
        messages.append(f"Sieve cap: {cls.SIEVE_MAX_LIMIT:,}")
        messages.append(f"NTT threshold: {cls.NTT_THRESHOLD}")
        messages.append(f"Chunk size: {cls.CHUNK_SIZE} (pivot p={cls.CHUNK_PIVOT_PRIME})")
        messages.append(f"Workers: {cls.WORKERS}")
        messages.append(f"Scan time budget: {cls.SCAN_TIME_BUDGET:.0f} s")
        messages.append(f"Working precision: {cls.DIGITS} digits")
        messages.append(f"Desk/full x: {cls.DESK_MAX_X:,} / {cls.FULL_MAX_X:,}")
        messages.append(f"Configuration valid: {'yes' if cls.validate() else 'NO'}")

        return "\n".join(messages)
