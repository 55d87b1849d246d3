import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from repindex.bias import (
    BandCounts,
    BiasError,
    UndefinedRatioError,
    analyze,
    band_counts,
    inflate,
    missing_pct,
    ratios,
    skewness,
    truncated_mean,
)


def brute_force_counts(scores, m, w):
    return BandCounts(
        n_band_pos=sum(1 for x in scores if m < x <= m + w),
        n_band_neg=sum(1 for x in scores if m - w <= x < m),
        n_pos=sum(1 for x in scores if x > 0),
        n_neg=sum(1 for x in scores if x < 0),
    )


class TestTruncatedMean:
    def test_drops_one_extreme_each(self):
        assert truncated_mean([1, 2, 3, 4, 10]) == 3.0

    def test_constant_data(self):
        assert truncated_mean([0.4, 0.4, 0.4]) == pytest.approx(0.4)

    def test_ties_drop_single_instance(self):
        # one 1 and one 5 removed, mean of [1, 3, 5]
        assert truncated_mean([1, 1, 3, 5, 5]) == 3.0

    def test_too_few_scores(self):
        with pytest.raises(BiasError):
            truncated_mean([0.1, 0.2])


class TestSkewness:
    def test_symmetric_data_is_zero(self):
        assert skewness([-1, 0, 1]) == pytest.approx(0.0, abs=1e-15)

    def test_reference_value(self):
        # m2 = 2/9, m3 = 2/27 -> g1 = 1/sqrt(2)
        assert skewness([0, 0, 1]) == pytest.approx(0.707107, abs=1e-6)

    def test_odd_symmetry(self):
        data = [0.3, -0.1, 0.7, 0.2, -0.9]
        assert skewness([-x for x in data]) == pytest.approx(-skewness(data))

    def test_zero_variance_rejected(self):
        with pytest.raises(BiasError, match="zero-variance"):
            skewness([0.5, 0.5, 0.5])

    def test_matches_direct_moments_on_random_data(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x = rng.normal(0, 1, size=rng.integers(3, 200)).tolist()
            mean = math.fsum(x) / len(x)
            m2 = math.fsum((v - mean) ** 2 for v in x) / len(x)
            m3 = math.fsum((v - mean) ** 3 for v in x) / len(x)
            assert skewness(x) == pytest.approx(m3 / m2**1.5, rel=1e-9)


class TestBandCounts:
    def test_worked_example(self):
        # Stated in percent-scale units so every boundary is float-exact
        # (0.05 - 0.15 rounds above -0.1 and would drop the lower edge).
        counts = band_counts([-50, -10, 5, 10, 20, 60], m=5, w_abs=15)
        assert counts == BandCounts(n_band_pos=2, n_band_neg=1, n_pos=4, n_neg=2)

    def test_scores_at_m_fall_in_neither_band(self):
        counts = band_counts([0.3, 0.3, 0.3], m=0.3, w_abs=0.1)
        assert counts.n_band_pos == 0 and counts.n_band_neg == 0
        assert counts.n_pos == 3 and counts.n_neg == 0

    def test_wide_band_covers_everything(self):
        scores = [-0.5, -0.1, 0.05, 0.1, 0.2, 0.6]
        counts = band_counts(scores, m=0.05, w_abs=10.0)
        at_m = sum(1 for x in scores if x == 0.05)
        assert counts.n_band_pos + counts.n_band_neg == len(scores) - at_m

    def test_agrees_with_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            scores = rng.uniform(-1, 1, size=rng.integers(1, 100)).tolist()
            m = rng.uniform(-1, 1)
            w = rng.uniform(0.01, 1.5)
            assert band_counts(scores, m, w) == brute_force_counts(scores, m, w)

    @given(
        scores=st.lists(st.integers(-64, 64), min_size=1, max_size=30),
        m=st.integers(-64, 64),
        w=st.integers(1, 128),
        shift=st.integers(-32, 32),
    )
    def test_band_counts_translation_covariant(self, scores, m, w, shift):
        # Dyadic inputs keep every comparison float-exact, so only the
        # zero-referenced sign counts may move under translation.
        scores = [x / 64 for x in scores]
        m, w, shift = m / 64, w / 64, shift / 64
        base = band_counts(scores, m, w)
        moved = band_counts([x + shift for x in scores], m + shift, w)
        assert (moved.n_band_pos, moved.n_band_neg) == (
            base.n_band_pos, base.n_band_neg
        )


class TestRatios:
    def test_direct_division(self):
        alpha, beta = ratios(BandCounts(2, 1, 4, 2))
        assert (alpha, beta) == (0.5, 0.5)

    def test_balanced_case(self):
        assert ratios(BandCounts(3, 3, 5, 5)) == (1.0, 1.0)

    def test_undefined_alpha(self):
        with pytest.raises(UndefinedRatioError, match="alpha"):
            ratios(BandCounts(0, 1, 4, 2))

    def test_undefined_beta(self):
        with pytest.raises(UndefinedRatioError, match="beta"):
            ratios(BandCounts(2, 1, 0, 2))


class TestMissingPct:
    def test_equal_ratios_give_zero(self):
        assert missing_pct(0.7, 0.7) == 0.0

    def test_double_gives_hundred(self):
        assert missing_pct(1.4, 0.7) == pytest.approx(100.0)

    def test_direct_formula(self):
        assert missing_pct(1.05, 1.0) == pytest.approx(5.0)

    def test_nonpositive_beta_rejected(self):
        with pytest.raises(BiasError):
            missing_pct(1.0, 0.0)

    @given(beta=st.floats(0.01, 10), a1=st.floats(0, 10), gap=st.floats(1e-6, 10))
    def test_strictly_increasing_in_alpha(self, beta, a1, gap):
        assert missing_pct(a1, beta) < missing_pct(a1 + gap, beta)


class TestAnalyze:
    def _positive_series(self, make_series, seed=3, n=400):
        rng = np.random.default_rng(seed)
        scores = np.clip(rng.normal(0.15, 0.3, size=n), -1, 1).tolist()
        return make_series(scores)

    def test_positive_trend_report_shape(self, make_series):
        report = analyze(self._positive_series(make_series))
        assert report.trend == "positive"
        assert not report.sign_flipped
        assert report.alpha is not None and report.beta is not None
        assert report.m_statistic == pytest.approx(
            missing_pct(report.alpha, report.beta)
        )
        assert len(report.per_w) == 15

    def test_sign_flip_matches_negated_positive_branch(self, make_series):
        positive = self._positive_series(make_series)
        negated = make_series([-s for s in positive.scores()])
        flipped = analyze(negated)
        straight = analyze(positive)
        assert flipped.trend == "negative"
        assert flipped.sign_flipped
        assert flipped.alpha == straight.alpha
        assert flipped.beta == straight.beta
        assert flipped.m_statistic == straight.m_statistic
        assert flipped.skew_all == straight.skew_all
        assert flipped.skew_window == straight.skew_window

    def test_zero_trend_has_no_m(self, make_series):
        report = analyze(make_series([0.0] * 10 + [1e-12] * 2 + [-1e-12] * 2),
                         slope_epsilon=1.0)
        assert report.trend == "zero"
        assert report.m_statistic is None
        assert report.warning

    def test_scale_invariance_of_alpha(self, make_series):
        series = self._positive_series(make_series)
        scaled = make_series([0.5 * s for s in series.scores()])
        a = analyze(series)
        b = analyze(scaled)
        for band_a, band_b in zip(a.per_w, b.per_w):
            assert band_a.alpha == band_b.alpha

    def test_too_few_points(self, make_series):
        with pytest.raises(BiasError, match=">= 3"):
            analyze(make_series([0.1, 0.2]))

    def test_zero_range(self, make_series):
        with pytest.raises(BiasError, match="zero score range"):
            analyze(make_series([0.2, 0.2, 0.2, 0.2]))

    def test_headline_is_mean_of_defined_alphas(self, make_series):
        report = analyze(self._positive_series(make_series))
        defined = [b.alpha for b in report.per_w if b.alpha is not None]
        assert report.alpha == pytest.approx(sum(defined) / len(defined))


class TestInflate:
    def test_multiplicative(self, make_series):
        result = inflate(make_series([0.5]), 4.0)
        assert result.series.scores() == [pytest.approx(0.52)]
        assert result.clamped == 0

    def test_zero_is_identity(self, make_series):
        series = make_series([0.1, -0.2, 0.3])
        result = inflate(series, 0.0)
        assert result.series.scores() == series.scores()

    def test_clamping_counted(self, make_series):
        result = inflate(make_series([0.99, 0.5]), 5.0)
        assert result.series.scores()[0] == 1.0
        assert result.clamped == 1

    def test_negative_m_rejected(self, make_series):
        with pytest.raises(BiasError):
            inflate(make_series([0.1]), -1.0)
