"""Fractional Brownian motion covariance matrices and their quadratic forms.

For observation times 0 < t_1 < ... < t_n = T and Hurst exponent H, the
Gram matrix is

    V[k, l] = 0.5 * (t_k^{2H} + t_l^{2H} - |t_k - t_l|^{2H}),

the covariance of the fBm at the observation times.  Every estimator in
this package consumes V only through the quadratic forms u'V^{-1}u and
u'V^{-1}y (u the vector of times), which are computed from a cached
Cholesky factor by triangular solves; V is never inverted explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .errors import FactorizationError, GridError, HurstRangeError

# Conditioning guard: as H -> 1 the matrix degenerates to rank one, and as
# H -> 0 it approaches a boundary of positive definiteness.
HURST_MIN = 0.01
HURST_MAX = 0.99


@dataclass(frozen=True)
class Hurst:
    """Hurst exponent, restricted to the open interval (0, 1)."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not np.isfinite(v) or not 0.0 < v < 1.0:
            raise HurstRangeError(f"Hurst exponent must lie in (0, 1), got {self.value}")
        object.__setattr__(self, "value", v)

    def __float__(self) -> float:
        return self.value


def hurst_value(h: float | Hurst) -> float:
    """Validate and unwrap a Hurst exponent."""
    if isinstance(h, Hurst):
        return h.value
    return Hurst(h).value


@dataclass(frozen=True)
class SamplingGrid:
    """Strictly increasing observation times t_1 < ... < t_n = T.

    The process starts at t = 0 but the origin is not an observation
    point and is not stored.
    """

    times: np.ndarray
    horizon: float = field(init=False)

    def __post_init__(self):
        t = np.array(self.times, dtype=float)  # own copy: frozen below
        if t.ndim != 1 or t.size < 1:
            raise GridError("grid needs at least one observation time")
        if not np.all(np.isfinite(t)):
            raise GridError("grid times must be finite")
        if t[0] <= 0.0:
            raise GridError(f"first observation time must be positive, got {t[0]}")
        if np.any(np.diff(t) <= 0.0):
            raise GridError("observation times must be strictly increasing")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "horizon", float(t[-1]))

    @classmethod
    def uniform(cls, n: int, horizon: float) -> "SamplingGrid":
        """Grid t_j = j * horizon / n for j = 1..n."""
        if n < 1:
            raise GridError(f"need n >= 1 observations, got {n}")
        return cls(np.arange(1, n + 1) * (float(horizon) / n))

    def __len__(self) -> int:
        return self.times.size

    @property
    def is_uniform(self) -> bool:
        n = len(self)
        ref = np.arange(1, n + 1) * (self.horizon / n)
        return bool(np.max(np.abs(self.times - ref)) <= 1e-9 * self.horizon)

    def spacing(self) -> float:
        """Uniform spacing T/n; raises on non-uniform grids."""
        if not self.is_uniform:
            raise GridError("grid is not uniform")
        return self.horizon / len(self)


@dataclass(frozen=True)
class GramMatrix:
    """fBm covariance on a grid, with its lower Cholesky factor.

    Derived quantities reused throughout (the whitened time vector w =
    L^{-1}u, the quadratic form q = u'V^{-1}u = w'w and log det V) are
    computed eagerly at construction.
    """

    grid: SamplingGrid
    h: float
    V: np.ndarray
    factor: np.ndarray
    _wu: np.ndarray
    quad_uu: float
    log_det: float


def build_gram(grid: SamplingGrid, h: float | Hurst) -> GramMatrix:
    """Construct V(H) on the grid and factor it.

    Raises
    ------
    HurstRangeError
        When H falls outside [0.01, 0.99]; conditioning degrades beyond
        that range and results would be noise.
    FactorizationError
        When the matrix is numerically indefinite (near-duplicate times
        or extreme ill-conditioning).  No jitter is added: estimator
        formulas assume the exact V.
    """
    hv = hurst_value(h)
    if not HURST_MIN <= hv <= HURST_MAX:
        raise HurstRangeError(
            f"Hurst exponent {hv} outside [{HURST_MIN}, {HURST_MAX}]; "
            "the covariance matrix is too ill-conditioned there"
        )
    t = grid.times
    p = t ** (2.0 * hv)
    V = 0.5 * (p[:, None] + p[None, :] - np.abs(t[:, None] - t[None, :]) ** (2.0 * hv))
    try:
        L = cholesky(V, lower=True)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            f"covariance matrix is not positive definite (n={len(grid)}, H={hv}): {exc}"
        ) from exc
    wu = solve_triangular(L, t, lower=True)
    q = float(wu @ wu)
    log_det = float(2.0 * np.sum(np.log(np.diag(L))))
    V.flags.writeable = False
    L.flags.writeable = False
    wu.flags.writeable = False
    return GramMatrix(grid=grid, h=hv, V=V, factor=L, _wu=wu, quad_uu=q, log_det=log_det)


def quad_form_uu(g: GramMatrix) -> float:
    """u'V^{-1}(H)u for u the vector of observation times; always > 0."""
    return g.quad_uu


def quad_form_uy(g: GramMatrix, y: np.ndarray) -> float:
    """u'V^{-1}(H)y via the cached factor (one triangular solve)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (len(g.grid),):
        raise ValueError(f"y has shape {y.shape}, expected ({len(g.grid)},)")
    wy = solve_triangular(g.factor, y, lower=True)
    return float(g._wu @ wy)


def whiten_rows(g: GramMatrix, rows: np.ndarray) -> np.ndarray:
    """L^{-1} applied to each row of a (N, n) matrix, returned (N, n).

    Shared plumbing for the per-subject forms u'V^{-1}Y^i and
    Y^i'V^{-1}Y^i used by the effects estimators.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != len(g.grid):
        raise ValueError(f"rows have length {rows.shape[1]}, expected {len(g.grid)}")
    return solve_triangular(g.factor, rows.T, lower=True).T
