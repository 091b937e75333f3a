import numpy as np
import pytest
from scipy.stats import ks_2samp

from fracmix import (
    EmbeddingError,
    GridError,
    RngStream,
    SamplingGrid,
    build_gram,
    sample_fbm_exact,
    sample_fbm_fast,
)
from fracmix.fbm import exact_paths, fast_paths, fgn_spectrum, paths_on_grid


def test_rng_stream_reproducible():
    grid = SamplingGrid.uniform(16, 1.0)
    a = sample_fbm_exact(grid, 0.7, RngStream(42, 3)).values
    b = sample_fbm_exact(grid, 0.7, RngStream(42, 3)).values
    assert np.array_equal(a, b)
    c = sample_fbm_exact(grid, 0.7, RngStream(42, 4)).values
    assert not np.array_equal(a, c)
    x = sample_fbm_fast(64, 1.0, 0.3, RngStream(7)).values
    y = sample_fbm_fast(64, 1.0, 0.3, RngStream(7)).values
    assert np.array_equal(x, y)


def test_rng_stream_validation():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(0, 2**64)


def test_exact_single_point_is_standard_normal():
    grid = SamplingGrid((1.0,))
    gm = build_gram(grid, 0.85)  # t1 = 1 so variance is 1 for any H
    draws = exact_paths(gm, RngStream(0), 10_000)[:, 0]
    assert abs(draws.mean()) < 0.03
    assert draws.var() == pytest.approx(1.0, rel=0.05)


def test_exact_brownian_increments():
    n, T = 8, 2.0
    grid = SamplingGrid.uniform(n, T)
    gm = build_gram(grid, 0.5)
    paths = exact_paths(gm, RngStream(1), 10_000)
    inc = np.diff(np.concatenate([np.zeros((paths.shape[0], 1)), paths], axis=1), axis=1)
    dt = T / n
    assert np.allclose(inc.var(axis=0), dt, rtol=0.05)
    # independence: neighbouring increments uncorrelated
    corr = np.corrcoef(inc[:, :-1].T.ravel(), inc[:, 1:].T.ravel())[0, 1]
    assert abs(corr) < 0.05


def test_exact_covariance_matches_gram():
    grid = SamplingGrid.uniform(8, 1.0)
    gm = build_gram(grid, 0.85)
    paths = exact_paths(gm, RngStream(2), 20_000)
    emp = np.cov(paths.T, bias=True)
    assert np.max(np.abs(emp - gm.V) / np.abs(gm.V)) < 0.05


def test_fast_single_point():
    draws = fast_paths(1, 3.0, 0.7, RngStream(3), 20_000)[:, 0]
    assert draws.var() == pytest.approx(3.0 ** (2 * 0.7), rel=0.05)


def test_fast_brownian_increment_variance():
    n, T = 256, 1.0
    paths = fast_paths(n, T, 0.5, RngStream(4), 10_000)
    inc = np.diff(np.concatenate([np.zeros((paths.shape[0], 1)), paths], axis=1), axis=1)
    assert np.mean(inc.var(axis=0)) == pytest.approx(T / n, rel=0.03)


@pytest.mark.parametrize("h", [0.15, 0.85])
def test_fast_matches_exact_at_endpoint(h):
    # two-sample KS on the terminal marginal, 1% level
    n, T = 256, 5.0
    grid = SamplingGrid.uniform(n, T)
    gm = build_gram(grid, h)
    a = exact_paths(gm, RngStream(10, 0), 10_000)[:, -1]
    b = fast_paths(n, T, h, RngStream(10, 1), 10_000)[:, -1]
    assert ks_2samp(a, b).pvalue > 0.01


def test_self_similarity_endpoint_variance():
    h, T = 0.7, 5.0
    paths = fast_paths(128, T, h, RngStream(5), 10_000)
    assert paths[:, -1].var() == pytest.approx(T ** (2 * h), rel=0.03)


def test_stationary_increments():
    h = 0.85
    grid = SamplingGrid.uniform(16, 2.0)
    gm = build_gram(grid, h)
    paths = exact_paths(gm, RngStream(6), 20_000)
    t = grid.times
    for i, j in [(0, 3), (2, 9), (5, 15), (10, 14)]:
        emp = (paths[:, j] - paths[:, i]).var()
        assert emp == pytest.approx(abs(t[j] - t[i]) ** (2 * h), rel=0.05)


def test_spectrum_nonnegative_across_h():
    for h in np.linspace(0.05, 0.95, 10):
        lam = fgn_spectrum(256, h)
        assert lam.min() >= 0.0


def test_embedding_error_is_raised_on_negative_spectrum(monkeypatch):
    # the fGn embedding is nonnegative definite in practice, so force a
    # failure to exercise the guard and the panel-level fallback
    import fracmix.fbm as fbm_mod

    def bad_spectrum(n, h):
        raise EmbeddingError("synthetic failure")

    monkeypatch.setattr(fbm_mod, "fgn_spectrum", bad_spectrum)
    with pytest.raises(EmbeddingError):
        sample_fbm_fast(8, 1.0, 0.5, RngStream(0))
    grid = SamplingGrid.uniform(8, 1.0)
    out = paths_on_grid(grid, 0.5, RngStream(0), 3, method="fast")
    assert out.shape == (3, 8)  # fell back to the exact sampler


def test_fast_requires_uniform_grid():
    grid = SamplingGrid((1.0, 1.2, 4.0))
    with pytest.raises(GridError):
        paths_on_grid(grid, 0.5, RngStream(0), 1, method="fast")


def test_fbm_path_container():
    path = sample_fbm_fast(32, 1.0, 0.6, RngStream(9))
    assert path.values.shape == (32,)
    assert len(path.grid) == 32
