"""G-irregular primes toolkit - Core modules."""

__version__ = "1.0.0"
