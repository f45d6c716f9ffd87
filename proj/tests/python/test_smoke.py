import math

import pytest

import levytree as lt


def test_version():
    assert lt.__version__ == "0.3.0"


def test_brownian_w_is_coth():
    for y in (0.1, 1.0, 5.0):
        assert lt.w(y, 2.0) == pytest.approx(1 / math.tanh(y), rel=1e-12)


def test_moments_at_two():
    m = lt.moments(2.0)
    assert m["mean_height"] == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    assert m["ratio"] == pytest.approx(4 / 3, rel=1e-8)


def test_coefficients():
    beta = lt.beta_coeffs(2.0, 10)
    assert beta[1:] == pytest.approx([2.0] * 10, rel=1e-10)
    g, d = lt.gammadelta_coeffs(2.0, 6)
    assert g[3] == pytest.approx(4 / 3 * 8)
    assert d[3] == pytest.approx(-16)
    assert lt.constants(2.0)["lambda_cr"] == pytest.approx(math.pi**2 / 4, rel=1e-12)


def test_tail_and_cdf_complement():
    for r in (1.2, 2.0):
        assert lt.nr_height_tail(r, 1.5) + lt.nr_height_cdf(r, 1.5) == pytest.approx(1, abs=1e-10)


def test_excursion_tent():
    H = lt.PLExcursion([0, 1, 2, 3, 4], [0, 2, 1, 2, 0])
    assert lt.total_height(H)[0] == 2
    assert lt.diameter(H)[0] == pytest.approx(2)
    assert lt.dist(H, 1, 3) == pytest.approx(2)
    assert lt.max_abs_diff(lt.reroot(lt.reroot(H, 1.5), 4 - 1.5), H) < 1e-9


def test_domain_errors_map_to_value_error():
    with pytest.raises(ValueError):
        lt.w(1.0, 2.5)
    with pytest.raises(ValueError):
        lt.sample_tree(2.0, 1, seed=1)


def test_sampler_is_reproducible():
    a = lt.sample_tree(1.5, 500, seed=7, index=3)
    assert a == lt.sample_tree(1.5, 500, seed=7, index=3)
    assert len(a) == 500 and sum(a) == 499
    h, d = lt.height_and_diameter(a)
    assert h <= d <= 2 * h


def test_small_experiment():
    r = lt.run_experiment(2.0, 200, 400, seed=5, threads=1)
    assert 1.1 < r["ratio"] < 1.6
    assert r["law"]


def test_consistency_quick():
    assert all(c["pass"] for c in lt.consistency_suite(1.5, quick=True))
