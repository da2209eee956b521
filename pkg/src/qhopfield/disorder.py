"""Quenched random patterns, Hebbian couplings, and pattern-overlap matrices."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Distribution",
    "PatternMatrix",
    "CouplingMatrix",
    "sample_patterns",
    "hebbian_couplings",
    "overlap_matrix_a",
    "spectral_norm",
]

SYMMETRY_TOL = 1e-12

Sampler = Callable[[np.random.Generator, int], np.ndarray]


class Distribution(Enum):
    """How the i.i.d. pattern entries are drawn."""

    BERNOULLI_PM1 = "bernoulli_pm1"
    CUSTOM = "custom"


def _pattern_rng(seed: int, mu: int) -> np.random.Generator:
    # One PCG64 stream per pattern row, split off the master seed, so row mu
    # never depends on how many other rows exist and rows can be drawn in
    # parallel without sharing generator state.
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(mu,))))


@dataclass(frozen=True, eq=False)
class PatternMatrix:
    """p stored patterns over n sites, one pattern per row."""

    p: int
    n: int
    entries: np.ndarray
    seed: int
    distribution: Distribution = Distribution.BERNOULLI_PM1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"site count n must be >= 1, got {self.n}")
        if self.p < 0:
            raise ValueError(f"pattern count p must be >= 0, got {self.p}")
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        if entries.shape != (self.p, self.n):
            raise ValueError(f"entries must have shape ({self.p}, {self.n}), got {entries.shape}")
        if self.distribution is Distribution.BERNOULLI_PM1 and entries.size:
            if not np.all(np.abs(entries) == 1.0):
                raise ValueError("Bernoulli patterns must contain exactly +1/-1 entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def to_csv(self, path) -> None:
        """Write one pattern per row; +-1 entries are written as integers."""
        with open(path, "w", encoding="ascii", newline="") as fh:
            for row in self.entries:
                if np.all(np.abs(row) == 1.0):
                    fh.write(",".join(str(int(v)) for v in row) + "\n")
                else:
                    fh.write(",".join(repr(float(v)) for v in row) + "\n")

    def to_record(self) -> dict:
        """JSON-embeddable form, seed included."""
        return {
            "p": self.p,
            "n": self.n,
            "seed": self.seed,
            "distribution": self.distribution.value,
            "entries": [[float(v) for v in row] for row in self.entries],
        }

    @classmethod
    def from_record(cls, record: dict) -> "PatternMatrix":
        return cls(
            p=int(record["p"]),
            n=int(record["n"]),
            entries=np.asarray(record["entries"], dtype=np.float64).reshape(
                int(record["p"]), int(record["n"])
            ),
            seed=int(record["seed"]),
            distribution=Distribution(record["distribution"]),
        )


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Symmetric n x n coupling matrix J."""

    n: int
    j: np.ndarray

    def __post_init__(self) -> None:
        j = np.ascontiguousarray(self.j, dtype=np.float64)
        if j.shape != (self.n, self.n):
            raise ValueError(f"couplings must have shape ({self.n}, {self.n}), got {j.shape}")
        j.setflags(write=False)
        object.__setattr__(self, "j", j)


def sample_patterns(
    n: int,
    p: int,
    seed: int,
    distribution: Distribution = Distribution.BERNOULLI_PM1,
    sampler: Optional[Sampler] = None,
) -> PatternMatrix:
    """Draw p i.i.d. patterns of n sites each.

    Bernoulli mode draws entries uniformly from {-1, +1} using one PCG64
    stream per pattern, keyed by ``SeedSequence(seed, spawn_key=(row,))``;
    the same (seed, p, n, distribution) always reproduces the bit-identical
    matrix.  Custom mode delegates each row to ``sampler(rng, n)``.  Moment
    conditions on custom samplers (zero mean, unit variance, bounded 4+eps
    moment) are the caller's responsibility and are not validated here.
    """
    if n < 1:
        raise ValueError(f"site count n must be >= 1, got {n}")
    if p < 0:
        raise ValueError(f"pattern count p must be >= 0, got {p}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if distribution is Distribution.CUSTOM and sampler is None:
        raise ValueError("Custom distribution requires a sampler")

    rows = np.empty((p, n), dtype=np.float64)
    for mu in range(p):
        rng = _pattern_rng(seed, mu)
        if distribution is Distribution.BERNOULLI_PM1:
            rows[mu] = 2.0 * rng.integers(0, 2, size=n) - 1.0
        else:
            row = np.asarray(sampler(rng, n), dtype=np.float64)
            if row.shape != (n,):
                raise ValueError(f"sampler must return a length-{n} vector, got shape {row.shape}")
            rows[mu] = row
    return PatternMatrix(p=p, n=n, entries=rows, seed=seed, distribution=distribution)


def hebbian_couplings(xi: PatternMatrix) -> CouplingMatrix:
    """Hebbian couplings J_ik = (1/n) sum_mu xi[mu,i] xi[mu,k], diagonal included.

    The retained diagonal is exactly p/n for +-1 patterns; it adds a constant
    energy shift of -p/(2n) per site to the Hamiltonian.
    """
    gram = xi.entries.T @ xi.entries
    # Each unordered pair is taken from the upper triangle once, so the
    # result is symmetric to the last bit rather than by averaging.
    j = np.triu(gram) + np.triu(gram, 1).T
    j /= xi.n
    return CouplingMatrix(n=xi.n, j=j)


def overlap_matrix_a(xi: PatternMatrix) -> np.ndarray:
    """Pattern-overlap matrix A[mu,nu] = (1/n)(1-delta) <xi^mu, xi^nu>."""
    if xi.p < 1:
        raise ValueError("overlap matrix requires at least one pattern")
    gram = xi.entries @ xi.entries.T
    upper = np.triu(gram, 1)
    a = upper + upper.T
    a /= xi.n
    return a


def spectral_norm(m: np.ndarray) -> float:
    """Largest absolute eigenvalue of a real symmetric matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.size == 0:
        return 0.0
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise ValueError("matrix must be symmetric to 1e-12 entrywise")
    return float(np.max(np.abs(np.linalg.eigvalsh(m))))
