import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rumornet.graph import generate_ba
from rumornet.model import (
    ModelParams,
    NewsSchedule,
    UnknownDistributionError,
    distribution_to_string,
    init_population,
    normalize_distribution,
    reliability_at,
)


class TestSchedule:
    def test_higgs_values(self):
        sched = NewsSchedule(segments=((0, 0.45, 0.10), (20, 0.99, 0.10)))
        assert reliability_at(sched, 0) == (0.45, 0.10)
        assert reliability_at(sched, 19) == (0.45, 0.10)
        assert reliability_at(sched, 20) == (0.99, 0.10)
        assert reliability_at(sched, 500) == (0.99, 0.10)

    def test_hoax_values(self):
        sched = NewsSchedule(segments=((0, 0.67, 0.15), (3, 0.48, 0.60)))
        assert reliability_at(sched, 2) == (0.67, 0.15)
        assert reliability_at(sched, 3) == (0.48, 0.60)

    def test_validation(self):
        with pytest.raises(ValueError):
            NewsSchedule(segments=((1, 0.5, 0.5),))  # must start at 0
        with pytest.raises(ValueError):
            NewsSchedule(segments=((0, 0.5, 0.5), (0, 0.6, 0.5)))
        with pytest.raises(ValueError):
            NewsSchedule(segments=((0, 1.5, 0.5),))
        with pytest.raises(ValueError):
            reliability_at(NewsSchedule.constant(0.5, 0.5), -1)

    @given(st.integers(min_value=0, max_value=100))
    @settings(max_examples=50, deadline=None)
    def test_lookup_matches_naive_scan(self, t):
        sched = NewsSchedule(segments=((0, 0.1, 0.2), (5, 0.3, 0.4), (17, 0.5, 0.6)))
        last = None
        for start, r, v in sched.segments:
            if start <= t:
                last = (r, v)
        assert sched.at(t) == last

    def test_visible_bounds(self):
        sched = NewsSchedule(segments=((0, 0.9, 0.0), (5, 0.4, 0.2), (9, 0.7, 0.1)))
        assert sched.visible_r_bounds_from(0) == (0.7, 0.4)
        assert sched.visible_r_bounds_from(9) == (0.7, 0.7)
        dark = NewsSchedule.constant(0.9, 0.0)
        assert dark.visible_r_bounds_from(0) is None


class TestParams:
    def test_defaults_valid(self):
        p = ModelParams()
        assert p.influence_fraction == 0.30
        assert p.t_active == 15

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            ModelParams(influence_fraction=0.0)
        with pytest.raises(ValueError):
            ModelParams(delta_influence=1.5)
        with pytest.raises(ValueError):
            ModelParams(t_active=0)


class TestThresholds:
    def test_constant_distribution(self):
        g = generate_ba(50, 2, seed=1)
        pop = init_population(g, ("constant", 0.5), seed=3)
        assert np.all(pop.thresholds == 0.5)
        assert np.all(pop.color == 0)
        assert np.all(pop.activated_at == -1)

    def test_uniform_mean(self):
        g = generate_ba(10_000, 2, seed=1)
        pop = init_population(g, "uniform", seed=7)
        assert 0.49 <= pop.thresholds.mean() <= 0.51
        assert pop.thresholds.min() >= 0.0 and pop.thresholds.max() <= 1.0

    def test_determinism(self):
        g = generate_ba(200, 2, seed=1)
        a = init_population(g, "uniform", seed=7)
        b = init_population(g, "uniform", seed=7)
        assert np.array_equal(a.thresholds, b.thresholds)

    def test_unknown_distribution(self):
        g = generate_ba(10, 2, seed=1)
        with pytest.raises(UnknownDistributionError):
            init_population(g, "zipf", seed=0)

    def test_string_forms_roundtrip(self):
        for dist in ("uniform", "uniform:0.2:0.8", "constant:0.5"):
            norm = normalize_distribution(dist)
            assert normalize_distribution(distribution_to_string(norm)) == norm
