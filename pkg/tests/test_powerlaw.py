import math

import numpy as np
import pytest

from rumornet.graph import DegreeHistogram, degree_histogram, generate_ba
from rumornet.powerlaw import InsufficientDataError, fit_power_law, gamma_ensemble


def synthetic_histogram(gamma, c=1_000_000, ks=range(2, 65)):
    return DegreeHistogram(
        entries={k: int(round(c * k**-gamma)) for k in ks},
        n_nodes=sum(int(round(c * k**-gamma)) for k in ks),
    )


def closed_form_slope(xs, ys):
    # independent regression oracle: textbook formula on plain floats
    n = len(xs)
    sx = sum(xs)
    sy = sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    return (n * sxy - sx * sy) / (n * sxx - sx * sx)


@pytest.mark.parametrize("gamma", [2.0, 2.5, 3.0])
def test_synthetic_exponent_recovery(gamma):
    fit = fit_power_law(synthetic_histogram(gamma), k_min=2)
    assert abs(fit.gamma - gamma) < 0.02
    assert fit.r_squared > 0.999


def test_exactly_collinear_input():
    # f(k) = 512 k^-3 at k in {1,2,4,8}: exactly collinear in log-log
    h = DegreeHistogram(entries={1: 512, 2: 64, 4: 8, 8: 1}, n_nodes=585)
    fit = fit_power_law(h, k_min=1, min_count=1)
    expected = -closed_form_slope(
        [math.log(k) for k in (1, 2, 4, 8)],
        [math.log(c) for c in (512, 64, 8, 1)],
    )
    assert abs(fit.gamma - expected) < 1e-12
    assert abs(fit.gamma - 3.0) < 1e-9
    assert fit.gamma_stat_err < 1e-9
    assert abs(fit.r_squared - 1.0) < 1e-12


def test_collinear_with_default_count_floor():
    # the count-1 class is below the validity floor; the rest stays collinear
    h = DegreeHistogram(entries={1: 512, 2: 64, 4: 8, 8: 1}, n_nodes=585)
    fit = fit_power_law(h, k_min=1)
    assert abs(fit.gamma - 3.0) < 1e-9


def test_two_classes_is_insufficient():
    h = DegreeHistogram(entries={1: 1000, 2: 125}, n_nodes=1125)
    with pytest.raises(InsufficientDataError):
        fit_power_law(h, k_min=1)


def test_stat_err_matches_covariance_formula():
    h = synthetic_histogram(2.5)
    fit = fit_power_law(h, k_min=2)
    pts = [(k, c) for k, c in h.sorted_items() if c >= 5]
    x = np.log([k for k, _ in pts])
    y = np.log([c for _, c in pts])
    _, cov = np.polyfit(x, y, 1, cov="unscaled")
    ssr = float(np.sum((y - np.polyval(np.polyfit(x, y, 1), x)) ** 2))
    expected = math.sqrt(cov[0, 0] * ssr / (len(x) - 2))
    assert abs(fit.gamma_stat_err - expected) < 1e-9


def test_ba_tail_exponent_in_paper_range():
    g = generate_ba(10_000, 2, seed=11)
    fit = fit_power_law(degree_histogram(g), k_min=3)
    assert 2.3 <= fit.gamma <= 2.8


def test_ensemble_statistics():
    ens = gamma_ensemble(4, 2_000, 2, seed=5)
    assert ens.n_graphs == 4
    assert ens.gamma_sys_err >= 0.0
    assert ens.gamma_stat_err > 0.0
    assert 2.0 <= ens.gamma_mean <= 3.0


def test_ensemble_smaller_graphs_spread_wider():
    small = gamma_ensemble(8, 500, 2, seed=9)
    large = gamma_ensemble(8, 8_000, 2, seed=9)
    assert 2.2 <= large.gamma_mean <= 2.9
    assert small.gamma_sys_err > large.gamma_sys_err


def test_ensemble_requires_two_graphs():
    with pytest.raises(ValueError):
        gamma_ensemble(1, 100, 2, seed=0)


def test_identical_samples_have_zero_spread():
    g = generate_ba(2_000, 2, seed=4)
    fits = [fit_power_law(degree_histogram(g), k_min=3) for _ in range(2)]
    gammas = np.array([f.gamma for f in fits])
    assert gammas.std(ddof=1) == 0.0
