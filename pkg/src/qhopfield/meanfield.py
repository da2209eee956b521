"""Curie-Weiss mean-field theory: free energy, fixed points, critical curve."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NumericalError

__all__ = [
    "Branch",
    "MeanFieldSolution",
    "CriticalPoint",
    "FixedPoint",
    "f0",
    "minimize_f0",
    "fixed_points",
    "critical_beta",
    "phase_curve",
    "asymptote_ratio",
]

GRID_STEP = 1e-3
BETA_SEARCH_CEILING = 500.0
_TIE_TOL = 1e-12
_BISECTION_STEPS = 90


class Branch(Enum):
    TRIVIAL = "trivial"
    SYMMETRY_BROKEN = "symmetry_broken"


@dataclass(frozen=True)
class MeanFieldSolution:
    m_star: float
    f0_value: float
    residual: float
    branch: Branch


@dataclass(frozen=True)
class CriticalPoint:
    d: float
    beta_c: float
    residual: float


class FixedPoint(NamedTuple):
    m: float
    stable: bool


def _log2cosh(x):
    # log(2 cosh x) = |x| + log1p(exp(-2|x|)); overflow-free for any |x|.
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax))


def f0(m, beta: float, d: float, h: float = 0.0):
    """Mean-field free energy per site at overlap m (vectorized in m)."""
    if beta <= 0 or not math.isfinite(beta):
        raise ValueError(f"beta must be finite and positive, got {beta}")
    m = np.asarray(m, dtype=np.float64)
    r = np.hypot(m + h, d)
    out = -_log2cosh(beta * r) / beta + 0.5 * m * m
    return float(out) if out.ndim == 0 else out


def _tanh_ratio(r, beta):
    # tanh(beta r)/r with the r -> 0 limit beta.
    r = np.asarray(r, dtype=np.float64)
    out = np.full_like(r, beta)
    nz = r > 0
    out[nz] = np.tanh(beta * r[nz]) / r[nz]
    return out


def _f0_prime(m, beta, d, h):
    # Zero exactly at the self-consistency equation m = (m+h) tanh(beta r)/r.
    m = np.asarray(m, dtype=np.float64)
    u = m + h
    out = m - u * _tanh_ratio(np.hypot(u, d), beta)
    return float(out) if out.ndim == 0 else out


def _f0_second(m: float, beta: float, d: float, h: float) -> float:
    u = m + h
    r = math.hypot(u, d)
    if r == 0.0:
        return 1.0 - beta
    t = math.tanh(beta * r)
    sech2 = 1.0 - t * t
    return 1.0 - (t / r + beta * u * u * sech2 / (r * r) - u * u * t / (r**3))


def _bisect_root(func, lo: float, hi: float) -> float:
    flo = func(lo)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0) == (fmid < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _stationary_points(beta: float, d: float, h: float, lo: float, hi: float) -> list[float]:
    # The grid always contains 0.0 exactly and is mirror-symmetric when the
    # domain is, so the trivial root lands on a node instead of straddling one.
    positive = np.arange(0.0, hi + 0.5 * GRID_STEP, GRID_STEP)
    grid = np.concatenate((-positive[:0:-1], positive)) if lo < 0 else positive
    deriv = _f0_prime(grid, beta, d, h)
    roots = [float(grid[i]) for i in np.flatnonzero(deriv == 0.0)]
    sign_change = np.flatnonzero(np.sign(deriv[:-1]) * np.sign(deriv[1:]) < 0)
    for i in sign_change:
        roots.append(
            _bisect_root(lambda m: _f0_prime(m, beta, d, h), float(grid[i]), float(grid[i + 1]))
        )
    deduped: list[float] = []
    for root in sorted(roots):
        if not deduped or root - deduped[-1] > 1e-9:
            deduped.append(root)
    return deduped


def minimize_f0(beta: float, d: float, h: float = 0.0) -> MeanFieldSolution:
    """Global minimizer of f0 over m in [0, 1+h].

    Coarse 1e-3 grid scan of the derivative, then bisection on each sign
    change; any stationary point of f0 satisfies m (m+h)-self-consistency, so
    the reported residual is the violation of that equation at m_star.  At an
    exact tie between the trivial and broken candidates the broken (larger m)
    branch is reported.  Negative h is handled by the caller via m -> -m.
    """
    if h < 0:
        raise ValueError(f"h must be >= 0 (use the m -> -m symmetry for h < 0), got {h}")
    candidates = _stationary_points(beta, d, h, 0.0, 1.0 + h)
    if not candidates or candidates[0] > 1e-9:
        candidates.insert(0, 0.0)

    values = [float(f0(m, beta, d, h)) for m in candidates]
    best = int(np.argmin(values))
    m_star, value = candidates[best], values[best]
    # Tie-break at coexistence: prefer the symmetry-broken candidate.
    for m_cand, v_cand in zip(candidates, values):
        if m_cand > m_star and abs(v_cand - value) <= _TIE_TOL:
            m_star, value = m_cand, v_cand
    residual = abs(_f0_prime(m_star, beta, d, h))
    branch = Branch.TRIVIAL if m_star == 0.0 else Branch.SYMMETRY_BROKEN
    return MeanFieldSolution(m_star=m_star, f0_value=value, residual=residual, branch=branch)


def fixed_points(beta: float, d: float, h: float = 0.0) -> list[FixedPoint]:
    """All self-consistent overlaps in [-(1+|h|), 1+|h|] with their stability.

    Stability is the sign of f0'' at the root.  For h = 0 the trivial root
    m = 0 is always present.
    """
    hi = 1.0 + abs(h)
    roots = _stationary_points(beta, d, h, -hi, hi)
    if h == 0.0 and not any(abs(r) <= 1e-9 for r in roots):
        roots.append(0.0)
    points = [FixedPoint(m=r, stable=_f0_second(r, beta, d, h) > 0.0) for r in sorted(roots)]
    return points


def critical_beta(d: float) -> CriticalPoint:
    """Critical inverse temperature solving d = tanh(beta d); beta_c(0) = 1.

    Bisection on [1, 500]; the ceiling covers d up to 1 - 1e-6 thanks to the
    logarithmic divergence of beta_c near d = 1.
    """
    if not 0.0 <= d < 1.0:
        raise ValueError(f"d must lie in [0, 1): the critical curve diverges at d = 1, got {d}")
    if d == 0.0:
        return CriticalPoint(d=0.0, beta_c=1.0, residual=0.0)
    lo, hi = 1.0, BETA_SEARCH_CEILING
    if math.tanh(hi * d) - d <= 0:
        raise NumericalError(f"no sign change for d={d} on [1, {BETA_SEARCH_CEILING}]")
    beta_c = _bisect_root(lambda b: math.tanh(b * d) - d, lo, hi)
    return CriticalPoint(d=d, beta_c=beta_c, residual=abs(d - math.tanh(beta_c * d)))


def phase_curve(d_grid: Sequence[float]) -> list[CriticalPoint]:
    """Pointwise critical curve over a grid of transverse fields."""
    points = []
    for idx, d in enumerate(d_grid):
        try:
            points.append(critical_beta(float(d)))
        except ValueError as exc:
            raise ValueError(f"d_grid[{idx}]: {exc}") from exc
    order = np.argsort([pt.d for pt in points])
    betas = [points[i].beta_c for i in order]
    if any(b2 < b1 for b1, b2 in zip(betas, betas[1:])):
        raise NumericalError("critical curve must be nondecreasing in d")
    return points


def asymptote_ratio(point: CriticalPoint) -> float:
    """beta_c over its d -> 1 asymptote (1/2) log 1/(1-d); NaN at d = 0."""
    if point.d <= 0.0:
        return math.nan
    return point.beta_c / (0.5 * math.log(1.0 / (1.0 - point.d)))
