import numpy as np
import pytest

from reconstructability.estimation import klir_estimate_known_model, klir_estimate_searched
from reconstructability.lattice import Model
from reconstructability.maxent import reconstruct
from reconstructability.prob import hamming, random_distribution, sample_relative_frequency
from reconstructability.search import SearchSettings

from conftest import model


class TestKnownModel:
    def test_matches_reconstruct(self, table_p, loop3):
        est = klir_estimate_known_model(table_p, loop3)
        assert est.estimate.allclose(reconstruct(table_p, loop3), 0)
        assert est.model == loop3
        assert est.raw is table_p
        assert est.trace is None
        assert est.residual < 1e-10

    def test_reconstruction_beats_raw_on_average(self, scheme3):
        # small samples from an independent-ish joint
        x = model(scheme3, "v1,v2", "v3")
        rng = np.random.default_rng(7)
        raw, rec = [], []
        for _ in range(300):
            p = reconstruct(random_distribution(scheme3, rng), x)
            p_hat = sample_relative_frequency(p, 10, rng)
            raw.append(hamming(p, p_hat))
            rec.append(hamming(p, klir_estimate_known_model(p_hat, x).estimate))
        assert np.mean(rec) < np.mean(raw)


class TestSearched:
    def test_uses_chosen_model(self, table_p, scheme3):
        est = klir_estimate_searched(table_p, SearchSettings(delta=0.001))
        assert est.model == model(scheme3, "v1,v2", "v3")
        assert est.trace.chosen == est.model
        assert est.estimate.allclose(table_p, 1e-9)

    def test_large_threshold_gives_independence(self, table_p, scheme3):
        est = klir_estimate_searched(table_p, SearchSettings(delta=1.0))
        assert est.model == Model.least(scheme3)

    def test_zero_threshold_keeps_raw(self, scheme3, rng):
        p_hat = sample_relative_frequency(random_distribution(scheme3, rng), 1000, rng)
        est = klir_estimate_searched(p_hat, SearchSettings(delta=0.0))
        # generic frequencies have strictly positive cost at every step
        assert est.model == Model.greatest(scheme3)
        assert est.estimate.allclose(p_hat, 1e-12)
