"""Shared oracle helpers, independent of the package's bit-twiddling paths."""

import numpy as np
import pytest

from qhopfield import Distribution, FieldMode, ModelParams, PatternMatrix, hebbian_couplings

SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def site_operator(op: np.ndarray, i: int, n: int) -> np.ndarray:
    """op acting on site i (bit i of the basis index) via explicit kron products."""
    return np.kron(np.eye(1 << (n - 1 - i)), np.kron(op, np.eye(1 << i)))


def kron_hamiltonian(j: np.ndarray, h: np.ndarray, d: float) -> np.ndarray:
    """Dense H = -1/2 sum J_ik sz_i sz_k - sum h_i sz_i - d sum sx_i, built from Paulis."""
    n = len(h)
    ham = np.zeros((1 << n, 1 << n))
    for i in range(n):
        zi = site_operator(SZ, i, n)
        for k in range(n):
            zk = site_operator(SZ, k, n)
            ham -= 0.5 * j[i, k] * (zi @ zk)
        ham -= h[i] * zi
        ham -= d * site_operator(SX, i, n)
    return ham


def pattern_matrix(entries, seed: int = 0) -> PatternMatrix:
    entries = np.asarray(entries, dtype=float)
    return PatternMatrix(
        p=entries.shape[0],
        n=entries.shape[1],
        entries=entries,
        seed=seed,
        distribution=Distribution.BERNOULLI_PM1,
    )


def random_params(rng: np.random.Generator, n: int, beta=None, d=None, p=None) -> ModelParams:
    """A random Hopfield instance with a random field mode."""
    if p is None:
        p = int(rng.integers(0, 4))
    if beta is None:
        beta = float(rng.uniform(0.2, 3.0))
    if d is None:
        d = float(rng.uniform(0.0, 1.5))
    entries = 2.0 * rng.integers(0, 2, size=(p, n)) - 1.0
    xi = pattern_matrix(entries, seed=0)
    mode = rng.integers(0, 3)
    if mode == 0 or p == 0:
        field = FieldMode.uniform(float(rng.uniform(-0.5, 0.5)))
    elif mode == 1:
        field = FieldMode.pattern_aligned(float(rng.uniform(0.0, 0.5)))
    else:
        field = FieldMode.explicit(rng.uniform(-0.5, 0.5, size=n))
    return ModelParams(
        n=n, couplings=hebbian_couplings(xi), field=field, d=d, beta=beta, patterns=xi
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240810)
