"""Data schemas for the G-irregular prime toolkit."""

from enum import Enum
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Any, List, Optional, Tuple

import mpmath
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PrimeModulus(BaseModel):
    """An odd prime carried with the factorization of p - 1."""
    model_config = ConfigDict(frozen=True)

    p: int = Field(..., ge=3, description="Odd prime")
    p_minus_1_factorization: Tuple[Tuple[int, int], ...] = Field(
        ..., description="(prime, exponent) pairs of p - 1, primes increasing"
    )

    @field_validator('p')
    def p_is_odd(cls, v):
        if v % 2 == 0:
            raise ValueError(f"{v} is not an odd prime")
        return v

    @model_validator(mode='after')
    def factorization_multiplies_back(self):
        product = 1
        for q, e in self.p_minus_1_factorization:
            product *= q ** e
        if product != self.p - 1:
            raise ValueError(f"factorization does not multiply back to p-1={self.p - 1}")
        return self

    def __int__(self) -> int:
        return self.p


class OrderReport(BaseModel):
    """Multiplicative order of g modulo p."""
    model_config = ConfigDict(frozen=True)

    g: int = Field(..., description="Base")
    p: int = Field(..., description="Prime modulus")
    order: int = Field(..., ge=1, description="ord_p(g), a divisor of p - 1")

    @model_validator(mode='after')
    def order_divides_p_minus_1(self):
        if (self.p - 1) % self.order != 0:
            raise ValueError(f"order {self.order} does not divide p-1={self.p - 1}")
        return self


class SequenceKind(str, Enum):
    """Exact sequences available from the oracle."""
    GENOCCHI = "Genocchi"
    EULER = "Euler"
    BERNOULLI = "Bernoulli"
    EULER_POLY_AT_ZERO = "EulerPolyAtZero"


class ExactSequence(BaseModel):
    """Exact values of a sequence, indexed from 0."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: SequenceKind
    values: Tuple[Any, ...] = Field(..., description="Integers or reduced Fractions")

    @model_validator(mode='after')
    def values_have_kind_type(self):
        integral = self.kind in (SequenceKind.GENOCCHI, SequenceKind.EULER)
        for n, v in enumerate(self.values):
            if integral and not isinstance(v, int):
                raise ValueError(f"{self.kind.value} entry {n} must be an integer")
            if not integral and not isinstance(v, Fraction):
                raise ValueError(f"{self.kind.value} entry {n} must be a Fraction")
        return self

    @property
    def bound(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int):
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


class SeriesKind(str, Enum):
    """Residue arrays computed by the mod-p kernel."""
    BERNOULLI = "Bernoulli"
    EULER = "Euler"
    GENOCCHI = "Genocchi"


class ModSeries(BaseModel):
    """Residues of B_2k, E_2k or G_2k mod p; slot k holds index 2k, 0 <= 2k <= p-3."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: int = Field(..., ge=3)
    kind: SeriesKind
    residues: np.ndarray

    @model_validator(mode='after')
    def residues_in_range(self):
        expected = 0 if self.p == 3 else (self.p - 1) // 2
        if self.residues.ndim != 1 or self.residues.shape[0] != expected:
            raise ValueError(f"series for p={self.p} needs {expected} slots")
        if expected and (self.residues.min() < 0 or self.residues.max() >= self.p):
            raise ValueError("residues must lie in [0, p)")
        if expected and self.kind == SeriesKind.BERNOULLI and self.residues[0] != 1:
            raise ValueError("Bernoulli slot 0 must hold B_0 = 1")
        return self

    def __len__(self) -> int:
        return int(self.residues.shape[0])

    def at_index(self, index: int) -> int:
        """Residue at the even index 2k."""
        if index % 2 or not 0 <= index <= self.p - 3:
            raise ValueError(f"index {index} outside the even range 0..{self.p - 3}")
        return int(self.residues[index // 2])

    def zero_indices(self) -> List[int]:
        """Even indices 2 <= 2k <= p-3 whose residue vanishes."""
        slots = np.flatnonzero(self.residues[1:] == 0) + 1
        return [2 * int(k) for k in slots]


class SeriesBundle(BaseModel):
    """The residue series computed for one prime; absent kinds stay None."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: int = Field(..., ge=3)
    bernoulli: Optional[ModSeries] = None
    euler: Optional[ModSeries] = None
    genocchi: Optional[ModSeries] = None

    @model_validator(mode='after')
    def series_match_p(self):
        expected = {
            'bernoulli': SeriesKind.BERNOULLI,
            'euler': SeriesKind.EULER,
            'genocchi': SeriesKind.GENOCCHI,
        }
        for name, kind in expected.items():
            series = getattr(self, name)
            if series is None:
                continue
            if series.p != self.p:
                raise ValueError(f"{name} series is for p={series.p}, not p={self.p}")
            if series.kind != kind:
                raise ValueError(f"{name} slot holds a {series.kind.value} series")
        return self


class QClass(str, Enum):
    """Membership in Q = {p > 2 : ord_p(4) = (p-1)/2}, split by p mod 8."""
    NOT_IN_Q = "NotInQ"
    Q3 = "Q3"
    Q5 = "Q5"
    Q7 = "Q7"


class PrimeRecord(BaseModel):
    """Per-prime classification result; one JSON object per store line."""
    model_config = ConfigDict(frozen=True)

    p: int = Field(..., ge=3)
    residue_mod_8: int
    ord2: int = Field(..., ge=1)
    ord4_is_half: bool
    b_irregular_indices: Optional[List[int]] = None
    e_irregular_indices: Optional[List[int]] = None
    g_irregular: Optional[bool] = None
    wieferich: bool
    h_refined_residue: Optional[int] = None

    @field_validator('b_irregular_indices', 'e_irregular_indices')
    def indices_sorted_even(cls, v):
        if v is not None and (v != sorted(set(v)) or any(i % 2 or i < 2 for i in v)):
            raise ValueError("irregular indices must be sorted distinct even integers >= 2")
        return v

    @model_validator(mode='after')
    def classification_consistent(self):
        if self.residue_mod_8 != self.p % 8:
            raise ValueError("residue_mod_8 does not match p")
        for indices in (self.b_irregular_indices, self.e_irregular_indices):
            if indices and indices[-1] > self.p - 3:
                raise ValueError("irregular index beyond p-3")
        if self.g_irregular is not None:
            if self.b_irregular_indices is not None:
                expected = bool(self.b_irregular_indices) or not self.ord4_is_half
                if self.g_irregular != expected:
                    raise ValueError("g_irregular contradicts B-irregularity and ord_p(4)")
            if self.residue_mod_8 == 1 and not self.g_irregular:
                raise ValueError("primes p = 1 mod 8 are G-irregular")
            if self.h_refined_residue is not None:
                if (self.h_refined_residue == 0) != (self.g_irregular or self.wieferich):
                    raise ValueError("refined class number residue contradicts G-irregularity")
        if self.h_refined_residue is not None and not 0 <= self.h_refined_residue < self.p:
            raise ValueError("h_refined_residue must lie in [0, p)")
        return self

    @property
    def b_irregular(self) -> Optional[bool]:
        return None if self.b_irregular_indices is None else bool(self.b_irregular_indices)

    @property
    def e_irregular(self) -> Optional[bool]:
        return None if self.e_irregular_indices is None else bool(self.e_irregular_indices)


class FactoredModulus(BaseModel):
    """A modulus d carried with its full prime factorization."""
    model_config = ConfigDict(frozen=True)

    d: int = Field(..., ge=1)
    factors: Tuple[Tuple[int, int], ...] = Field(default=(), description="(prime, exponent), primes increasing")

    @model_validator(mode='after')
    def factors_reproduce_d(self):
        from src.modarith import product

        primes = [q for q, _ in self.factors]
        if primes != sorted(set(primes)) or any(e < 1 for _, e in self.factors):
            raise ValueError("factors must have increasing primes and positive exponents")
        if product(q ** e for q, e in self.factors) != self.d:
            raise ValueError("factors do not reproduce d")
        return self

    @property
    def primes(self) -> List[int]:
        return [q for q, _ in self.factors]

    def exponent_of(self, q: int) -> int:
        for prime, e in self.factors:
            if prime == q:
                return e
        return 0

    def __repr__(self) -> str:
        if self.d.bit_length() > 64:
            return f"FactoredModulus(<{self.d.bit_length()}-bit>, {len(self.factors)} primes)"
        return f"FactoredModulus(d={self.d}, factors={self.factors})"

    __str__ = __repr__


class DensityResult(BaseModel):
    """delta(d, a) = c(d, a) R(d, a) A with its exact rational part."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    modulus: FactoredModulus
    a: int
    c: Fraction
    R_over_A_part: Optional[Fraction] = Field(None, description="R(d, a) exactly; None at primorial scale")
    delta: mpmath.mpf
    conjectured_g_ratio: mpmath.mpf

    @field_validator('c')
    def c_in_case_table(cls, v):
        if v not in (Fraction(0), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
            raise ValueError(f"c(d, a) = {v} is not in the case table")
        return v

    @model_validator(mode='after')
    def delta_vanishes_with_c(self):
        if (self.delta == 0) != (self.c == 0):
            raise ValueError("delta must vanish exactly when c does")
        return self


class PrimorialRow(BaseModel):
    """One row of the primorial family (d_n, a_n)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=3)
    d_n: FactoredModulus
    a_n: int
    delta_4dn_1: DensityResult
    delta_8dn_an: DensityResult
    normalization: mpmath.mpf


class ScanKind(str, Enum):
    """Per-prime properties a scan can establish."""
    B = "B"
    E = "E"
    G = "G"
    Q = "Q"
    W = "W"

    @classmethod
    def parse(cls, text: str) -> List["ScanKind"]:
        """Parse a comma separated list such as 'B,E,G' or 'Q,Wieferich'."""
        kinds = []
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            if token.lower() == "wieferich":
                token = "W"
            kinds.append(cls(token.upper()))
        return kinds


class ScanConfig(BaseModel):
    """Parameters of one prime scan."""
    x_max: int = Field(..., ge=3, description="Scan bound")
    kinds: List[ScanKind] = Field(..., min_length=1)
    d: Optional[int] = Field(None, ge=1, description="Optional residue-class modulus")
    a: Optional[int] = Field(None, description="Optional residue, coprime to d")
    worker_count: int = Field(default=1, ge=1)
    output_path: Path
    resume: bool = False
    chunk_size: int = Field(default=256, ge=1)

    @model_validator(mode='after')
    def residue_filter_valid(self):
        if (self.d is None) != (self.a is None):
            raise ValueError("d and a must be given together")
        if self.d is not None:
            if gcd(self.a, self.d) != 1:
                raise ValueError(f"gcd(a, d) must be 1, got a={self.a}, d={self.d}")
            if self.d > 1:
                self.a = self.a % self.d
        return self

    def normalized_kinds(self) -> List[str]:
        """Kinds recorded in the store: Q and W always, G whenever B is present."""
        kinds = {k.value for k in self.kinds} | {"Q", "W"}
        if "B" in kinds:
            kinds.add("G")
        return sorted(kinds)


class StoreHeader(BaseModel):
    """First line of a scan store."""
    format: int = 1
    kinds: List[str]
    d: Optional[int] = None
    a: Optional[int] = None
    chunk_size: int


class ChunkMarker(BaseModel):
    """Commit marker closing one chunk of records."""
    chunk: int = Field(..., ge=0)
    first: int
    last: int
    count: int = Field(..., ge=1)
    sha256: str


class StoreState(BaseModel):
    """What a verified scan store holds."""
    header: StoreHeader
    chunks: List[ChunkMarker] = Field(default_factory=list)
    committed_bytes: int = Field(..., ge=0, description="Offset just past the last commit marker")
    end_bytes: int = Field(0, ge=0, description="Offset past the completion line, if any")
    complete: Optional[int] = Field(None, description="x_max of a finished scan")

    @property
    def record_count(self) -> int:
        return sum(chunk.count for chunk in self.chunks)

    @property
    def last_prime(self) -> Optional[int]:
        return self.chunks[-1].last if self.chunks else None

    @property
    def covered(self) -> int:
        """Every prime up to this bound has a committed record."""
        if self.complete is not None:
            return self.complete
        return self.last_prime or 2


class ScanSummary(BaseModel):
    """Outcome of one scan run."""
    output_path: Path
    x_max: int
    kinds: List[str]
    processed: int = Field(0, ge=0, description="Primes classified by this run")
    resumed_from: int = Field(0, ge=0, description="Records already committed before this run")
    chunks: int = Field(0, ge=0)
    seconds: float = 0.0


class RatioRow(BaseModel):
    """Experimental ratio of a kind inside a residue class, with its conjectured limit."""
    kind: ScanKind
    d: int = Field(..., ge=1)
    a: int
    x: int = Field(..., ge=2)
    numerator: int = Field(..., ge=0)
    denominator: int = Field(..., ge=0)
    ratio: str = Field(..., description="numerator/denominator, 6 decimals")
    theoretical: Optional[str] = Field(None, description="Conjectured limit, 6 decimals")

    @model_validator(mode='after')
    def numerator_bounded(self):
        if self.numerator > self.denominator:
            raise ValueError("numerator cannot exceed pi(x; d, a)")
        return self


class ReproducedTable(BaseModel):
    """A regenerated numerical table."""
    which: int = Field(..., ge=1, le=5)
    title: str
    headers: List[str]
    rows: List[List[str]] = Field(default_factory=list)
    footnotes: List[str] = Field(default_factory=list)


class TableExportOptions(BaseModel):
    """Options for exporting a table."""
    format: str = Field(..., pattern="^(text|csv|pdf)$")
    include_footnotes: bool = True
