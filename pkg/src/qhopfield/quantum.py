"""Exact spectral analysis of the transverse-field Hopfield Hamiltonian.

The model on n qubits is

    H = -1/2 sum_ij J_ij sz_i sz_j - sum_i h_i sz_i - d sum_i sx_i

acting on the 2^n-dimensional real Hilbert space.  Basis convention, fixed
for reproducible state indexing: basis state k encodes spin s_i = +1 when
bit i of k is 0 and s_i = -1 when bit i is 1, with site 1 stored in the
least significant bit.  All operators are real symmetric.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import logsumexp

from .disorder import CouplingMatrix, PatternMatrix, hebbian_couplings
from .errors import NumericalError, ResourceGuardError

__all__ = [
    "FieldMode",
    "ModelParams",
    "Spectrum",
    "GibbsObservables",
    "BogolyubovBounds",
    "params_from_patterns",
    "diagonal_energies",
    "apply_hamiltonian",
    "dense_hamiltonian",
    "spectrum",
    "free_energy",
    "gibbs_observables",
    "bogolyubov_bounds",
    "curvature_duhamel",
    "slq_free_energy",
    "block_free_energy",
    "dump_spectrum_csv",
]

logger = logging.getLogger(__name__)

MATVEC_MAX_SITES = 20
DENSE_MAX_SITES = 14
BOGOLYUBOV_MAX_DIM = 2**12
DUHAMEL_MAX_DIM = 2**10
DEGENERACY_TOL = 1e-9

_HERMITICITY_TOL = 1e-12
_ENERGY_BLOCK = 1 << 14


@dataclass(frozen=True, eq=False)
class FieldMode:
    """Longitudinal field: uniform, pattern-aligned, or explicit per-site values."""

    kind: str
    h: float = 0.0
    mu: int = 1
    values: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "pattern", "explicit"):
            raise ValueError(f"unknown field mode {self.kind!r}")
        if self.kind == "explicit":
            if self.values is None:
                raise ValueError("explicit field mode requires a value vector")
            values = np.ascontiguousarray(self.values, dtype=np.float64)
            values.setflags(write=False)
            object.__setattr__(self, "values", values)

    @staticmethod
    def uniform(h: float) -> "FieldMode":
        return FieldMode(kind="uniform", h=float(h))

    @staticmethod
    def pattern_aligned(h: float, mu: int = 1) -> "FieldMode":
        """Field h_i = h * xi^mu_i; mu is 1-based and resolved against bound patterns."""
        return FieldMode(kind="pattern", h=float(h), mu=int(mu))

    @staticmethod
    def explicit(values) -> "FieldMode":
        return FieldMode(kind="explicit", values=np.asarray(values, dtype=np.float64))

    def resolve(self, n: int, patterns: Optional[PatternMatrix]) -> np.ndarray:
        """Per-site field vector h_i of length n."""
        if self.kind == "uniform":
            return np.full(n, self.h)
        if self.kind == "pattern":
            if patterns is None:
                raise ValueError("pattern-aligned field mode requires bound patterns")
            if not 1 <= self.mu <= patterns.p:
                raise ValueError(f"pattern index mu={self.mu} out of range 1..{patterns.p}")
            return self.h * patterns.entries[self.mu - 1]
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (n,):
            raise ValueError(f"explicit field must have length {n}, got shape {values.shape}")
        return values.copy()

    def to_record(self) -> dict:
        record = {"kind": self.kind, "h": self.h, "mu": self.mu}
        if self.values is not None:
            record["values"] = [float(v) for v in self.values]
        return record


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Everything needed to build one Hamiltonian instance."""

    n: int
    couplings: CouplingMatrix
    field: FieldMode
    d: float
    beta: float
    patterns: Optional[PatternMatrix] = None

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MATVEC_MAX_SITES:
            raise ResourceGuardError(f"n must lie in 1..{MATVEC_MAX_SITES}, got {self.n}")
        if self.couplings.n != self.n:
            raise ValueError(
                f"couplings are {self.couplings.n}x{self.couplings.n}, expected {self.n}x{self.n}"
            )
        if not math.isfinite(self.beta) or self.beta <= 0:
            raise ValueError(f"beta must be finite and positive, got {self.beta}")
        if not math.isfinite(self.d) or self.d < 0:
            raise ValueError(f"transverse field d must be finite and >= 0, got {self.d}")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def field_values(self) -> np.ndarray:
        return self.field.resolve(self.n, self.patterns)


def params_from_patterns(
    xi: PatternMatrix, beta: float, d: float, field: FieldMode
) -> ModelParams:
    """Hamiltonian parameters with Hebbian couplings built from the patterns."""
    return ModelParams(
        n=xi.n, couplings=hebbian_couplings(xi), field=field, d=d, beta=beta, patterns=xi
    )


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Full eigensystem (eigenvalues ascending, eigenvectors optional)."""

    dim: int
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        eigenvalues = np.ascontiguousarray(self.eigenvalues, dtype=np.float64)
        if eigenvalues.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} eigenvalues, got shape {eigenvalues.shape}")
        if eigenvalues.size > 1 and np.any(np.diff(eigenvalues) < 0):
            raise ValueError("eigenvalues must be nondecreasing")
        eigenvalues.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eigenvalues)


@dataclass(frozen=True, eq=False)
class GibbsObservables:
    """Thermal expectation values of one Hamiltonian instance."""

    free_energy_per_site: float
    overlaps: np.ndarray
    z_magnetizations: np.ndarray
    x_magnetizations: np.ndarray


class BogolyubovBounds(NamedTuple):
    lower: float
    upper: float
    delta_f: float


def _spin_block(start: int, stop: int, n: int) -> np.ndarray:
    """Spin values s_i(k) = +-1 for basis indices start..stop-1, shape (stop-start, n)."""
    k = np.arange(start, stop, dtype=np.uint32)
    bits = (k[:, None] >> np.arange(n, dtype=np.uint32)) & 1
    return 1.0 - 2.0 * bits


def diagonal_energies(params: ModelParams) -> np.ndarray:
    """Classical energies -1/2 s.J.s - h.s over all 2^n spin assignments.

    Independent of d; includes the constant self-coupling term from the
    J diagonal (-p/(2n) per site for Hebbian couplings).
    """
    n, dim = params.n, params.dim
    j = params.couplings.j
    h = params.field_values()
    out = np.empty(dim)
    for start in range(0, dim, _ENERGY_BLOCK):
        stop = min(start + _ENERGY_BLOCK, dim)
        s = _spin_block(start, stop, n)
        sj = s @ j
        out[start:stop] = -0.5 * np.einsum("bi,bi->b", sj, s) - s @ h
    return out


def _flip_site(state: np.ndarray, i: int, n: int) -> np.ndarray:
    # Exchanging amplitudes of k and k ^ (1 << i) is a reversal along the
    # middle axis of a (high bits, bit i, low bits) reshape.
    view = state.reshape(1 << (n - 1 - i), 2, 1 << i)
    return view[:, ::-1, :].reshape(state.shape)


def apply_hamiltonian(
    params: ModelParams, state: np.ndarray, diag: Optional[np.ndarray] = None
) -> np.ndarray:
    """Matrix-free H @ state in O(n 2^n) time and O(2^n) extra space.

    ``diag`` may carry a precomputed diagonal_energies(params) so repeated
    matvecs (Lanczos, power iterations) skip the O(n^2 2^n) diagonal build.
    """
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (params.dim,):
        raise ValueError(f"state must have length {params.dim}, got shape {state.shape}")
    if diag is None:
        diag = diagonal_energies(params)
    out = diag * state
    if params.d != 0.0:
        for i in range(params.n):
            out -= params.d * _flip_site(state, i, params.n)
    return out


def dense_hamiltonian(params: ModelParams) -> np.ndarray:
    """Explicit 2^n x 2^n symmetric matrix; bridge to the dense eigensolver."""
    if params.n > DENSE_MAX_SITES:
        raise ResourceGuardError(
            f"dense Hamiltonian limited to n <= {DENSE_MAX_SITES}, got n={params.n}"
        )
    dim = params.dim
    hmat = np.zeros((dim, dim))
    np.fill_diagonal(hmat, diagonal_energies(params))
    if params.d != 0.0:
        idx = np.arange(dim)
        for i in range(params.n):
            hmat[idx ^ (1 << i), idx] = -params.d
    return hmat


def spectrum(params: ModelParams, keep_vectors: bool = False) -> Spectrum:
    """Full dense eigensolve (n <= 14); eigenvalues ascending."""
    hmat = dense_hamiltonian(params)
    try:
        if keep_vectors:
            evals, evecs = np.linalg.eigh(hmat)
        else:
            evals, evecs = np.linalg.eigvalsh(hmat), None
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge for n={params.n}: {exc}") from exc
    return Spectrum(dim=params.dim, eigenvalues=evals, eigenvectors=evecs)


def free_energy(spec: Spectrum, beta: float, n: int) -> float:
    """Free energy per site, -(1/(beta n)) log sum_k exp(-beta E_k).

    The sum is anchored at the ground-state energy (log-sum-exp), so beta up
    to 1e4 stays overflow-free.
    """
    if beta <= 0 or not math.isfinite(beta):
        raise ValueError(f"beta must be finite and positive, got {beta}")
    if spec.eigenvalues.size == 0:
        raise ValueError("empty spectrum")
    return -float(logsumexp(-beta * spec.eigenvalues)) / (beta * n)


def gibbs_observables(
    params: ModelParams, spec: Spectrum, xi: Optional[PatternMatrix] = None
) -> GibbsObservables:
    """Thermal averages of the overlaps m^mu and the site magnetizations.

    Diagonal observables (sz, m^mu) are basis-weight sums over the Gibbs
    occupation of each spin configuration; sx needs one bit-flip contraction
    per site.  Overlaps are computed only when patterns are supplied.
    """
    if spec.eigenvectors is None:
        raise ValueError("gibbs_observables requires a spectrum with eigenvectors")
    if xi is not None and xi.n != params.n:
        raise ValueError(f"patterns are for n={xi.n}, model has n={params.n}")
    beta, n, dim = params.beta, params.n, params.dim
    evals, vecs = spec.eigenvalues, spec.eigenvectors

    weights = np.exp(-beta * (evals - evals[0]))
    rho = weights / weights.sum()

    basis_prob = (vecs * vecs) @ rho
    z_mag = np.zeros(n)
    overlaps = np.zeros(xi.p) if xi is not None else np.zeros(0)
    for start in range(0, dim, _ENERGY_BLOCK):
        stop = min(start + _ENERGY_BLOCK, dim)
        s = _spin_block(start, stop, n)
        chunk = basis_prob[start:stop]
        z_mag += chunk @ s
        if overlaps.size:
            overlaps += (chunk @ (s @ xi.entries.T)) / n

    scaled = vecs * rho
    x_mag = np.empty(n)
    for i in range(n):
        flipped = vecs.reshape(1 << (n - 1 - i), 2, (1 << i) * dim)[:, ::-1, :]
        x_mag[i] = np.sum(flipped.reshape(dim, dim) * scaled)

    return GibbsObservables(
        free_energy_per_site=free_energy(spec, beta, n),
        overlaps=overlaps,
        z_magnetizations=z_mag,
        x_magnetizations=x_mag,
    )


def _check_hamiltonian_pair(h0, h1, max_dim: int):
    h0 = np.asarray(h0, dtype=np.float64)
    h1 = np.asarray(h1, dtype=np.float64)
    for name, mat in (("h0", h0), ("h1", h1)):
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"{name} must be square, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.T)) > _HERMITICITY_TOL:
            raise ValueError(f"{name} must be Hermitian (real symmetric) to 1e-12")
    if h0.shape != h1.shape:
        raise ValueError(f"h0 and h1 must share a dimension, got {h0.shape} vs {h1.shape}")
    dim = h0.shape[0]
    if dim > max_dim:
        raise ResourceGuardError(f"dimension {dim} exceeds the guard {max_dim}")
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"dimension must be a power of two, got {dim}")
    return h0, h1, dim, n


def _gibbs_average(op: np.ndarray, evals: np.ndarray, vecs: np.ndarray, beta: float) -> float:
    weights = np.exp(-beta * (evals - evals[0]))
    rho = weights / weights.sum()
    diag = np.einsum("ik,ik->k", vecs, op @ vecs)
    return float(diag @ rho)


def _log_partition(evals: np.ndarray, beta: float) -> float:
    return float(logsumexp(-beta * evals))


def bogolyubov_bounds(h0, h1, beta: float) -> BogolyubovBounds:
    """Two-sided Bogolyubov bounds on the free-energy shift of H0 -> H0 + H1.

    Returns (<H1>_{H0+H1}/n, <H1>_{H0}/n, f(beta,1) - f(beta,0)) with n the
    qubit count; the guaranteed ordering lower <= delta_f <= upper is checked
    with 1e-10 slack and a violation raises NumericalError.
    """
    h0, h1, dim, n = _check_hamiltonian_pair(h0, h1, BOGOLYUBOV_MAX_DIM)
    if beta <= 0 or not math.isfinite(beta):
        raise ValueError(f"beta must be finite and positive, got {beta}")
    e0, v0 = np.linalg.eigh(h0)
    e1, v1 = np.linalg.eigh(h0 + h1)
    delta_f = (-_log_partition(e1, beta) + _log_partition(e0, beta)) / (beta * n)
    upper = _gibbs_average(h1, e0, v0, beta) / n
    lower = _gibbs_average(h1, e1, v1, beta) / n
    if lower - delta_f > 1e-10 or delta_f - upper > 1e-10:
        raise NumericalError(
            f"Bogolyubov ordering violated: lower={lower!r} delta_f={delta_f!r} upper={upper!r}"
        )
    return BogolyubovBounds(lower=lower, upper=upper, delta_f=delta_f)


def curvature_duhamel(h0, h1, beta: float, t: float = 0.0) -> float:
    """Duhamel curvature -d^2 f/dt^2 >= 0 of f(t) for H(t) = H0 + t H1.

    Evaluated in the eigenbasis of H(t) from the centered perturbation;
    eigenvalue pairs closer than 1e-9 use the degenerate limit
    beta * exp(-beta E).  The result is the curvature of the per-site free
    energy, so it matches second finite differences of f(t) directly.
    """
    h0, h1, dim, n = _check_hamiltonian_pair(h0, h1, DUHAMEL_MAX_DIM)
    if beta <= 0 or not math.isfinite(beta):
        raise ValueError(f"beta must be finite and positive, got {beta}")
    evals, vecs = np.linalg.eigh(h0 + t * h1)
    shifted = evals - evals[0]
    weights = np.exp(-beta * shifted)
    z = weights.sum()

    m = vecs.T @ h1 @ vecs
    mean = float(np.diag(m) @ weights) / z
    m = m - mean * np.eye(dim)

    de = shifted[None, :] - shifted[:, None]  # E_k - E_j (rows j, columns k)
    num = weights[:, None] - weights[None, :]
    g = np.empty_like(de)
    degenerate = np.abs(de) < DEGENERACY_TOL
    g[degenerate] = (beta * np.broadcast_to(weights[None, :], de.shape))[degenerate]
    g[~degenerate] = num[~degenerate] / de[~degenerate]

    value = float(np.sum(m * m * g) / (z * n))
    if value < -1e-12:
        raise NumericalError(f"Duhamel curvature came out negative: {value!r}")
    return value


def _lanczos(matvec, v0: np.ndarray, max_steps: int):
    """Lanczos tridiagonalization with full reorthogonalization.

    Returns (alphas, betas, steps).  Breakdown (the Krylov space became
    invariant) truncates early; the quadrature on the truncated space is
    exact, so this is reported at debug level rather than raised.
    """
    dim = v0.size
    norm0 = np.linalg.norm(v0)
    if norm0 == 0.0:
        raise NumericalError("Lanczos breakdown at step 0: zero start vector")
    basis = np.empty((max_steps, dim))
    alphas, betas = [], []
    v = v0 / norm0
    b_prev = 0.0
    scale = 1.0
    for step in range(max_steps):
        basis[step] = v
        w = matvec(v)
        a = float(v @ w)
        alphas.append(a)
        scale = max(scale, abs(a))
        w -= a * v
        if step > 0:
            w -= b_prev * basis[step - 1]
        for _ in range(2):
            active = basis[: step + 1]
            w -= active.T @ (active @ w)
        b = float(np.linalg.norm(w))
        if step == max_steps - 1:
            break
        if b <= 1e-11 * scale:
            logger.debug("Lanczos breakdown after %d of %d steps", step + 1, max_steps)
            break
        betas.append(b)
        scale = max(scale, b)
        b_prev = b
        v = w / b
    return np.array(alphas), np.array(betas), len(alphas)


def slq_free_energy(
    params: ModelParams, beta: float, probes: int = 64, krylov_steps: int = 60, seed: int = 0
) -> tuple[float, float]:
    """Stochastic Lanczos quadrature estimate of the free energy per site.

    Hutchinson trace estimation of Tr exp(-beta H) with Rademacher probes on
    the matrix-free matvec; each probe runs its own Lanczos recurrence seeded
    from ``SeedSequence(seed, spawn_key=(probe,))``, so probes are
    independent and the estimate is deterministic per seed.  ``beta`` is
    taken from the argument (params.beta is not consulted).  Returns
    (estimate, standard error of the estimate over probes); per-probe
    quadratures are combined in log space so large beta cannot overflow.
    """
    if not 1 <= params.n <= MATVEC_MAX_SITES:
        raise ResourceGuardError(f"slq_free_energy supports 1 <= n <= {MATVEC_MAX_SITES}")
    if probes < 8:
        raise ValueError(f"probes must be >= 8, got {probes}")
    if krylov_steps < 1:
        raise ValueError(f"krylov_steps must be >= 1, got {krylov_steps}")
    if beta <= 0 or not math.isfinite(beta):
        raise ValueError(f"beta must be finite and positive, got {beta}")

    n, dim = params.n, params.dim
    diag = diagonal_energies(params)
    steps_cap = min(krylov_steps, dim)

    log_quadratures = np.empty(probes)
    for idx in range(probes):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(idx,))))
        v0 = 2.0 * rng.integers(0, 2, size=dim) - 1.0
        alphas, betas, _ = _lanczos(
            lambda x: apply_hamiltonian(params, x, diag=diag), v0, steps_cap
        )
        theta, u = eigh_tridiagonal(alphas, betas)
        log_quadratures[idx] = logsumexp(-beta * theta, b=u[0, :] ** 2)

    anchor = log_quadratures.max()
    ratios = np.exp(log_quadratures - anchor)
    mean_ratio = float(ratios.mean())
    log_trace = math.log(dim) + anchor + math.log(mean_ratio)
    estimate = -log_trace / (beta * n)
    spread = float(ratios.std(ddof=1)) if probes > 1 else 0.0
    stderr = spread / (mean_ratio * math.sqrt(probes) * beta * n)
    return estimate, stderr


def _spin_multiplicity(sites: int, k: int) -> int:
    # Number of total-spin-j multiplets with 2j = sites - 2k among `sites` qubits.
    if k == 0:
        return 1
    return math.comb(sites, k) - math.comb(sites, k - 1)


def _ladder_x(dj: int) -> np.ndarray:
    # Collective X = sum_i sx_i restricted to one spin-j multiplet, 2j = dj.
    j = dj / 2.0
    ms = j - np.arange(dj)  # m = j-1 downward pair anchors
    off = np.sqrt(j * (j + 1) - ms * (ms - 1.0))
    x = np.zeros((dj + 1, dj + 1))
    idx = np.arange(dj)
    x[idx, idx + 1] = off
    x[idx + 1, idx] = off
    return x


def block_free_energy(params: ModelParams) -> float:
    """Exact free energy via collective-spin block diagonalization.

    Sites sharing the same pattern signature (and hence the same couplings
    and field value) form permutation-symmetric classes; the Hamiltonian is
    a polynomial in the collective spin operators of each class, so it splits
    into blocks of dimension prod_c (2 j_c + 1) with combinatorial
    multiplicities.  For a handful of +-1 patterns this replaces one 2^n
    eigensolve by many tiny ones while remaining exact.

    Applicable when patterns are bound, all entries are +-1, and the field is
    uniform or pattern-aligned (constant on each class).
    """
    xi = params.patterns
    if xi is None:
        raise ValueError("block_free_energy requires bound patterns")
    if xi.entries.size and not np.all(np.abs(xi.entries) == 1.0):
        raise ValueError("block_free_energy requires +-1 pattern entries")
    if params.field.kind not in ("uniform", "pattern"):
        raise ValueError("block_free_energy requires a uniform or pattern-aligned field")
    if not np.array_equal(params.couplings.j, hebbian_couplings(xi).j):
        raise ValueError("couplings do not match the bound patterns")

    n, p, beta, d = params.n, xi.p, params.beta, params.d
    signatures, counts = np.unique(xi.entries.T, axis=0, return_counts=True)
    n_classes = signatures.shape[0]
    if params.field.kind == "uniform":
        class_fields = np.full(n_classes, params.field.h)
    else:
        if not 1 <= params.field.mu <= p:
            raise ValueError(f"pattern index mu={params.field.mu} out of range 1..{p}")
        class_fields = params.field.h * signatures[:, params.field.mu - 1]

    # Per class: the doubled-spin values 2j = n_c, n_c-2, ..., with multiplicities.
    sectors = []
    for c in range(n_classes):
        sites = int(counts[c])
        sectors.append(
            [(sites - 2 * k, _spin_multiplicity(sites, k)) for k in range(sites // 2 + 1)]
        )

    energies, log_weights = [], []
    stack = [(0, [], 0.0)]
    while stack:
        c, chosen, log_mult = stack.pop()
        if c < n_classes:
            for dj, mult in sectors[c]:
                stack.append((c + 1, chosen + [dj], log_mult + math.log(mult)))
            continue

        dims = [dj + 1 for dj in chosen]
        # Z_c eigenvalues are the doubled magnetizations 2m = dj, dj-2, ..., -dj.
        zvals = [dj - 2.0 * np.arange(dj + 1) for dj in chosen]
        grids = np.meshgrid(*zvals, indexing="ij") if chosen else [np.zeros(())]
        diag = np.zeros(tuple(dims) if dims else ())
        for mu in range(p):
            m_grid = np.zeros_like(diag)
            for c_idx, grid in enumerate(grids):
                m_grid = m_grid + signatures[c_idx, mu] * grid
            diag -= m_grid * m_grid / (2.0 * n)
        for c_idx, grid in enumerate(grids):
            diag = diag - class_fields[c_idx] * grid

        block = np.diag(diag.ravel())
        if d != 0.0:
            for c_idx, dj in enumerate(chosen):
                op = np.eye(1)
                for other in range(n_classes):
                    op = np.kron(op, _ladder_x(dj) if other == c_idx else np.eye(dims[other]))
                block -= d * op
        energies.append(np.linalg.eigvalsh(block))
        log_weights.append(np.full(block.shape[0], log_mult))

    all_e = np.concatenate(energies)
    all_w = np.concatenate(log_weights)
    return -float(logsumexp(-beta * all_e + all_w)) / (beta * n)


def dump_spectrum_csv(spec: Spectrum, path) -> None:
    """Debugging dump: one (index, eigenvalue) row per line."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("index,eigenvalue\n")
        for idx, val in enumerate(spec.eigenvalues):
            fh.write(f"{idx},{float(val)!r}\n")
