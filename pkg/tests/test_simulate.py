"""Tests for seeding, the unbiased null model and the quincunx model."""

import math
from fractions import Fraction

import numpy as np
import pytest

from src.errors import ConfigError, DataError, DegenerateNullError
from src.inference.bias import bias_p_value
from src.inference.permutation import correlation_p
from src.inference.ranks import spearman_rho
from src.panel.assemble import ZERO_DIVERSITY
from src.panel.models import Dataset, Experiment
from src.simulate.quincunx import (
    QuincunxEnsembleConfig,
    QuincunxParams,
    quincunx_ensemble,
    quincunx_truth,
    sample_quincunx_panel,
)
from src.simulate.seeds import sub_seed
from src.simulate.unbiased import (
    UnbiasedSpec,
    replicate_dataset_unbiased,
    replicate_many,
    sample_unbiased_panel,
    unbiased_ensemble,
)
from src.stats.crowd import crowd_mean, diversity_decomposition, fraction_beating_crowd, summarize_dataset


class TestSubSeed:
    def test_deterministic(self):
        assert sub_seed(1, "a") == sub_seed(1, "a")

    def test_key_and_master_matter(self):
        assert sub_seed(1, "a") != sub_seed(1, "b")
        assert sub_seed(1, "a") != sub_seed(2, "a")

    def test_range(self):
        assert 0 <= sub_seed(2**64 - 1, "x") < 2**64

    def test_negative_master(self):
        with pytest.raises(ValueError):
            sub_seed(-1, "a")


class TestUnbiasedPanel:
    def test_deterministic(self):
        spec = UnbiasedSpec(truth=100.0, delta=25.0, n=30, seed=42)
        assert sample_unbiased_panel(spec) == sample_unbiased_panel(spec)

    def test_shape(self):
        exp = sample_unbiased_panel(UnbiasedSpec(truth=3.0, delta=1.0, n=12, seed=0))
        assert exp.n == 12
        assert exp.truth == 3.0

    def test_zero_delta(self):
        with pytest.raises(DegenerateNullError):
            UnbiasedSpec(truth=1.0, delta=0.0, n=10, seed=0)

    def test_single_forecaster(self):
        with pytest.raises(DataError):
            UnbiasedSpec(truth=1.0, delta=1.0, n=1, seed=0)

    @pytest.mark.slow
    def test_pooled_moments(self):
        exp = sample_unbiased_panel(UnbiasedSpec(truth=0.0, delta=1.0, n=1_000_000, seed=3))
        values = np.asarray(exp.values)
        assert abs(values.mean()) <= 4e-3
        assert values.var() == pytest.approx(1.0, rel=0.01)

    @pytest.mark.slow
    def test_crowd_mean_variance(self):
        means = [
            crowd_mean(sample_unbiased_panel(UnbiasedSpec(truth=100.0, delta=25.0, n=37, seed=k)))
            for k in range(100_000)
        ]
        assert np.var(means) == pytest.approx(25.0 / 37, rel=0.02)


class TestReplicateDataset:
    def _dataset(self) -> Dataset:
        rng = np.random.default_rng(0)
        return Dataset((
            Experiment.from_values(rng.normal(100, 2, 40).tolist(), 100.0, indicator="a"),
            Experiment.from_values([5.0, 5.0, 5.0], 4.0, indicator="b"),
            Experiment.from_values(rng.normal(10, 1, 9).tolist(), 11.0, indicator="c"),
        ))

    def test_shape_preserved(self):
        replica, drops = replicate_dataset_unbiased(self._dataset(), seed=1)
        assert [e.id for e in replica] == ["a:h0:0000Q1", "c:h0:0000Q1"]
        source = self._dataset()
        for exp in replica:
            original = source.get(exp.id)
            assert exp.n == original.n
            assert exp.truth == original.truth

    def test_zero_diversity_dropped(self):
        _, drops = replicate_dataset_unbiased(self._dataset(), seed=1)
        assert [(d.experiment_id, d.reason) for d in drops] == [("b:h0:0000Q1", ZERO_DIVERSITY)]

    def test_order_independent(self):
        ds = self._dataset()
        reversed_ds = Dataset(tuple(reversed(ds.experiments)))
        assert replicate_dataset_unbiased(ds, 5)[0] == replicate_dataset_unbiased(reversed_ds, 5)[0]

    def test_replicates_distinct(self):
        pooled, drops = replicate_many(self._dataset(), seed=1, replicates=3)
        assert len(pooled) == 6
        assert len(drops) == 1
        assert "a:h0:0000Q1@r2" in {e.id for e in pooled}

    def test_replicates_floor(self):
        with pytest.raises(ConfigError):
            replicate_many(self._dataset(), seed=1, replicates=0)

    def test_diversity_predicts_error(self):
        rng = np.random.default_rng(21)
        base = Dataset(tuple(
            Experiment.from_values(
                rng.normal(100.0, math.exp(rng.uniform(0.0, 3.4)), 30).tolist(), 100.0, indicator=f"e{k}",
            )
            for k in range(300)
        ))
        replica, _ = replicate_dataset_unbiased(base, seed=4)
        stats, _ = summarize_dataset(replica)
        result = correlation_p(
            [s.scaled_diversity for s in stats], [s.scaled_error_abs for s in stats], n_perm=2000, seed=0,
        )
        assert result.rho > 0
        assert result.p_value < 0.01

    @pytest.mark.slow
    def test_diversity_preserved_on_average(self):
        rng = np.random.default_rng(9)
        values = rng.normal(0, 1, 40)
        values = (values - values.mean()) / values.std() * 2.0 + 100.0
        base = Dataset((Experiment.from_values(values.tolist(), 100.0),))
        _, _, delta = diversity_decomposition(next(iter(base)))
        pooled, _ = replicate_many(base, seed=2, replicates=1000)
        deltas = [diversity_decomposition(e)[2] for e in pooled]
        assert np.mean(deltas) == pytest.approx(delta, rel=0.05)


class TestUnbiasedEnsemble:
    def test_sizes_in_range(self):
        ds = unbiased_ensemble(200, seed=0, n_min=9, n_max=87)
        sizes = [e.n for e in ds]
        assert min(sizes) >= 9 and max(sizes) <= 87
        assert len(set(sizes)) > 20

    def test_deterministic(self):
        assert unbiased_ensemble(20, seed=4) == unbiased_ensemble(20, seed=4)

    def test_bad_range(self):
        with pytest.raises(ConfigError):
            unbiased_ensemble(10, seed=0, n_min=20, n_max=10)

    @pytest.mark.slow
    def test_crowd_beats_majority(self):
        xis = np.array([fraction_beating_crowd(e) for e in unbiased_ensemble(10_000, seed=0)])
        assert np.mean(xis <= 0.5) >= 0.99
        assert 0.10 <= np.mean(xis == 0) <= 0.25

    def test_xi_scale_invariant(self):
        small = [fraction_beating_crowd(e) for e in unbiased_ensemble(300, seed=1, delta=1.0)]
        large = [fraction_beating_crowd(e) for e in unbiased_ensemble(300, seed=1, delta=1e4)]
        assert small == large

    @pytest.mark.slow
    def test_skew_neutral(self):
        ds = unbiased_ensemble(10_000, seed=6, n_min=40, n_max=40)
        stats, drops = summarize_dataset(ds)
        assert drops == []
        skews = [s.skew for s in stats]
        assert abs(np.mean(skews)) <= 0.02
        assert abs(spearman_rho(skews, [s.scaled_diversity for s in stats])) <= 0.05

    @pytest.mark.slow
    def test_bias_p_uniform_under_null(self):
        base = unbiased_ensemble(100, seed=8, n_min=400, n_max=400)
        pooled, _ = replicate_many(base, seed=8, replicates=100)
        ps = []
        for exp in pooled:
            _, _, delta = diversity_decomposition(exp)
            ps.append(bias_p_value(crowd_mean(exp), exp.truth, delta, exp.n).p)
        assert len(ps) == 10_000
        se = math.sqrt(0.05 * 0.95 / len(ps))
        assert abs(np.mean(np.asarray(ps) <= 0.05) - 0.05) <= 3 * se


class TestQuincunxPanel:
    def test_truth(self):
        assert quincunx_truth(QuincunxParams(100.0, (10.0, -5.0), 0.5, 0)) == 105.0

    def test_no_cues(self):
        assert quincunx_truth(QuincunxParams(100.0, (), 0.5, 0)) == 100.0

    def test_truth_rational_oracle(self):
        cues = np.random.default_rng(0).uniform(-50, 50, 25).tolist()
        params = QuincunxParams(1000.0, tuple(cues), 0.7, 0)
        exact = Fraction(1000) + sum(Fraction(c) for c in cues)
        assert quincunx_truth(params) == float(exact)

    def test_all_cues_right(self):
        exp = sample_quincunx_panel(QuincunxParams(100.0, (10.0, -5.0), 1.0, 1), 20)
        assert exp.values == [105.0] * 20
        assert exp.truth == 105.0

    def test_all_cues_wrong(self):
        exp = sample_quincunx_panel(QuincunxParams(100.0, (10.0, -5.0), 0.0, 1), 20)
        assert exp.values == [95.0] * 20
        assert exp.truth == 105.0

    def test_degenerate_panel_has_no_skew(self):
        ds = Dataset((sample_quincunx_panel(QuincunxParams(100.0, (10.0,), 1.0, 1), 5),))
        stats, _ = summarize_dataset(ds)
        assert stats[0].skew is None

    def test_bad_probability(self):
        with pytest.raises(ConfigError):
            QuincunxParams(100.0, (1.0,), 1.5, 0)

    def test_expected_mean(self):
        cues = (30.0, -20.0, 12.0)
        params = QuincunxParams(1000.0, cues, 0.7, 5)
        n = 50_000
        exp = sample_quincunx_panel(params, n)
        expected = 1000.0 + 0.4 * sum(cues)
        sd = math.sqrt(sum(4 * 0.7 * 0.3 * c * c for c in cues))
        assert abs(crowd_mean(exp) - expected) <= 4 * sd / math.sqrt(n)

    @pytest.mark.slow
    def test_unbiased_limit(self):
        params = QuincunxParams(1000.0, tuple(np.linspace(-50, 50, 10)), 0.5, 7)
        n = 1_000_000
        exp = sample_quincunx_panel(params, n)
        sd = math.sqrt(sum(c * c for c in params.cues))
        assert abs(crowd_mean(exp) - 1000.0) <= 4 * sd / math.sqrt(n)


class TestQuincunxEnsemble:
    def test_pair_reproducible_and_distinct(self):
        a = quincunx_ensemble(QuincunxEnsembleConfig(), 2, 10, seed=3)
        b = quincunx_ensemble(QuincunxEnsembleConfig(), 2, 10, seed=3)
        assert a == b
        first, second = a.experiments
        assert first.truth != second.truth

    def test_too_few_experiments(self):
        with pytest.raises(ConfigError):
            quincunx_ensemble(QuincunxEnsembleConfig(), 1, 10, seed=0)

    def test_empty_cue_range(self):
        with pytest.raises(ConfigError):
            quincunx_ensemble(QuincunxEnsembleConfig(cue_low=5.0, cue_high=-5.0), 2, 10, seed=0)

    def test_zero_sum_cues(self):
        ds = quincunx_ensemble(QuincunxEnsembleConfig(zero_sum_cues=True), 5, 10, seed=0)
        for exp in ds:
            assert exp.truth == pytest.approx(1000.0, abs=1e-9)

    @pytest.mark.slow
    def test_skew_predicts_error(self):
        ds = quincunx_ensemble(QuincunxEnsembleConfig(), 500, 40, seed=0)
        stats, _ = summarize_dataset(ds)
        stats = [s for s in stats if s.skew_defined]
        result = correlation_p(
            [s.skew for s in stats], [s.scaled_error_signed for s in stats], n_perm=10_000, seed=0,
        )
        assert result.rho < 0
        assert result.p_value < 0.01

    @pytest.mark.slow
    def test_unbiased_limit_has_no_strong_effect(self):
        # With few cues a sum of +-eta terms is platykurtic, which alone ties
        # sample skew to the sample mean; 40 cues keep that below the noise.
        config = QuincunxEnsembleConfig(n_cues=40, p_cue=0.5, zero_sum_cues=True)
        stats, _ = summarize_dataset(quincunx_ensemble(config, 500, 40, seed=0))
        stats = [s for s in stats if s.skew_defined]
        result = correlation_p(
            [s.skew for s in stats], [s.scaled_error_signed for s in stats], n_perm=10_000, seed=0,
        )
        assert result.p_value > 0.001
