"""Exact simulation of normalized fractional Brownian motion.

Two samplers with identical output distribution:

* ``sample_fbm_exact`` draws the Gaussian vector with covariance V(H)
  as L z (L the Cholesky factor, z standard normal).  Works on any
  grid; O(n^3) once per grid, O(n^2) per path.
* ``sample_fbm_fast`` uses the Davies-Harte circulant embedding of the
  fractional Gaussian noise autocovariance [1, 2]: eigenvalues from one
  FFT of the embedding's first row, synthesis from another, cumulative
  sum and a T^H self-similarity rescale.  Uniform grids only;
  O(n log n) per path.

The embedding is used exactly: eigenvalues below -1e-10 times the
largest raise ``EmbeddingError`` instead of being clipped, and callers
fall back to the exact sampler.

[1] Davies, R. B. and Harte, D. S., Biometrika 74 (1987) 95-101.
[2] Dieker, A., "Simulation of fractional Brownian motion", 2004.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmbeddingError, GridError
from .gram import GramMatrix, Hurst, SamplingGrid, build_gram, hurst_value
from .rng import RngStream, as_generator

# An eigenvalue this far below zero (relative to the largest) means the
# embedding genuinely failed; anything closer is FFT roundoff.
_NEG_EIG_TOL = 1e-10


@dataclass(frozen=True)
class FbmPath:
    """One sample path; values[j] is the process at grid.times[j].

    The (deterministic) value 0 at t = 0 is not stored.
    """

    grid: SamplingGrid
    values: np.ndarray


def exact_paths(gram: GramMatrix, rng: RngStream | np.random.Generator, count: int) -> np.ndarray:
    """(count, n) matrix of independent exact fBm paths on gram's grid."""
    gen = as_generator(rng)
    z = gen.standard_normal((len(gram.grid), count))
    return (gram.factor @ z).T


def sample_fbm_exact(
    grid: SamplingGrid, h: float | Hurst, rng: RngStream | np.random.Generator
) -> FbmPath:
    """Draw one path of fBm with Hurst exponent h on an arbitrary grid."""
    gram = build_gram(grid, h)
    return FbmPath(grid=grid, values=exact_paths(gram, rng, 1)[0])


def fgn_spectrum(n: int, h: float | Hurst) -> np.ndarray:
    """Eigenvalues of the order-2n circulant embedding of the unit-spacing
    fractional Gaussian noise autocovariance.

    Raises ``EmbeddingError`` if the embedding is not nonnegative
    definite; tiny negative values from roundoff are set to zero.
    """
    hv = hurst_value(h)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    k = np.arange(n + 1, dtype=float)
    acov = 0.5 * ((k + 1) ** (2 * hv) - 2.0 * k ** (2 * hv) + np.abs(k - 1) ** (2 * hv))
    first_row = np.concatenate([acov[:n], [acov[n]], acov[1:n][::-1]])
    lam = np.fft.fft(first_row).real
    floor = -_NEG_EIG_TOL * lam.max()
    if lam.min() < floor:
        raise EmbeddingError(
            f"circulant embedding not nonnegative definite for n={n}, H={hv} "
            f"(min eigenvalue {lam.min():.3e}); use the exact sampler"
        )
    return np.clip(lam, 0.0, None)


def _fgn_draws(lam: np.ndarray, gen: np.random.Generator, count: int) -> np.ndarray:
    """(count, n) unit-spacing fGn draws from precomputed eigenvalues."""
    m = lam.size
    n = m // 2
    z = np.zeros((count, m), dtype=complex)
    z[:, 0] = np.sqrt(lam[0] / m) * gen.standard_normal(count)
    z[:, n] = np.sqrt(lam[n] / m) * gen.standard_normal(count)
    if n > 1:
        scale = np.sqrt(lam[1:n] / (2.0 * m))
        re = gen.standard_normal((count, n - 1))
        im = gen.standard_normal((count, n - 1))
        z[:, 1:n] = scale * (re + 1j * im)
        z[:, n + 1:] = np.conj(z[:, 1:n][:, ::-1])
    return np.fft.fft(z, axis=1).real[:, :n]


def fast_paths(
    n: int, horizon: float, h: float | Hurst, rng: RngStream | np.random.Generator, count: int
) -> np.ndarray:
    """(count, n) matrix of fBm paths on the uniform grid j*horizon/n."""
    hv = hurst_value(h)
    gen = as_generator(rng)
    lam = fgn_spectrum(n, hv)
    noise = _fgn_draws(lam, gen, count)
    # cumulated unit-spacing fGn is fBm on 1..n; self-similarity maps it
    # to spacing T/n
    return np.cumsum(noise, axis=1) * (float(horizon) / n) ** hv


def sample_fbm_fast(
    n: int, horizon: float, h: float | Hurst, rng: RngStream | np.random.Generator
) -> FbmPath:
    """Draw one path on the uniform grid via circulant embedding."""
    grid = SamplingGrid.uniform(n, horizon)
    return FbmPath(grid=grid, values=fast_paths(n, horizon, h, rng, 1)[0])


def paths_on_grid(
    grid: SamplingGrid,
    h: float | Hurst,
    rng: RngStream | np.random.Generator,
    count: int,
    method: str = "exact",
    gram: GramMatrix | None = None,
) -> np.ndarray:
    """(count, n) fBm paths by the requested method.

    method "exact" factors V (or reuses a prebuilt gram); "fast" needs a
    uniform grid and falls back to exact if the embedding fails.
    """
    if method == "exact":
        if gram is None:
            gram = build_gram(grid, h)
        elif gram.grid is not grid and not np.array_equal(gram.grid.times, grid.times):
            raise GridError("prebuilt GramMatrix grid does not match the requested grid")
        return exact_paths(gram, rng, count)
    if method == "fast":
        if not grid.is_uniform:
            raise GridError("fast sampler requires a uniform grid")
        try:
            return fast_paths(len(grid), grid.horizon, h, rng, count)
        except EmbeddingError:
            if gram is None:
                gram = build_gram(grid, h)
            return exact_paths(gram, rng, count)
    raise ValueError(f"unknown sampling method {method!r}")
