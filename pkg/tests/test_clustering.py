import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from driftscope import clustering
from tests.conftest import toy_vocab


def reference_lowess(y, frac):
    """Independent tricube local-linear fit via np.polyfit, for cross-checking."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    r = max(int(np.ceil(frac * n)), 2)
    x = np.arange(n, dtype=float)
    out = np.empty(n)
    for i in range(n):
        dist = np.abs(x - x[i])
        idx = np.argsort(dist, kind="stable")[:r]
        h = dist[idx].max()
        if h == 0:
            out[i] = y[idx].mean()
            continue
        w = np.clip(1.0 - (dist[idx] / h) ** 3, 0.0, None) ** 3
        if (w > 0).sum() < 2:
            out[i] = y[idx].mean()
            continue
        xm = np.average(x[idx], weights=w)
        if np.average((x[idx] - xm) ** 2, weights=w) == 0:
            out[i] = np.average(y[idx], weights=w)
            continue
        b, a = np.polyfit(x[idx], y[idx], 1, w=np.sqrt(w))
        out[i] = a + b * x[i]
    return out


def _families(rng, per_family=25, length=12, noise=0.15):
    t = np.arange(length, dtype=float)
    rows, labels = [], []
    for fam, base in enumerate([t, -t, np.full(length, 0.3)]):
        for _ in range(per_family):
            rows.append(base + rng.normal(scale=noise, size=length))
            labels.append(fam)
    return np.array(rows), np.array(labels)


class TestLowess:
    def test_constant_is_fixed_point(self):
        y = np.full(10, 3.7)
        np.testing.assert_allclose(clustering.lowess_smooth(y, 0.4), y, atol=1e-12)

    def test_linear_is_reproduced_exactly(self):
        y = 2.0 * np.arange(15) - 4.0
        np.testing.assert_allclose(clustering.lowess_smooth(y, 0.3), y, atol=1e-9)

    def test_matches_reference_implementation(self, rng):
        for frac in (0.2, 0.25, 0.5, 1.0):
            y = rng.normal(size=20).cumsum()
            got = clustering.lowess_smooth(y, frac)
            want = reference_lowess(y, frac)
            np.testing.assert_allclose(got, want, atol=1e-6)

    def test_smooths_toward_signal(self, rng):
        t = np.linspace(0, 2 * np.pi, 40)
        signal = np.sin(t)
        noisy = signal + rng.normal(scale=0.3, size=40)
        smoothed = clustering.lowess_smooth(noisy, 0.3)
        assert np.mean((smoothed - signal) ** 2) < np.mean((noisy - signal) ** 2)

    def test_reduces_total_variation_of_noise(self, rng):
        def tv(a):
            return np.abs(np.diff(a)).sum()

        for _ in range(20):
            y = rng.normal(size=25)
            assert tv(clustering.lowess_smooth(y, 0.3)) <= tv(y) + 1e-9

    def test_too_short_raises(self):
        with pytest.raises(ValueError):
            clustering.lowess_smooth(np.ones(2), 0.3)

    def test_bad_frac_raises(self):
        with pytest.raises(ValueError):
            clustering.lowess_smooth(np.ones(10), 0.0)


class TestSpectral:
    def test_recovers_three_families(self, rng):
        rows, labels = _families(rng)
        assign, degenerate = clustering.spectral_cluster(
            rows, clustering.ClusterConfig(c=3, seed=1))
        assert not degenerate
        # Hungarian matching between found clusters and planted families
        conf = np.zeros((3, 3))
        for a, b in zip(assign, labels):
            conf[a, b] += 1
        r, c = linear_sum_assignment(-conf)
        assert conf[r, c].sum() / len(labels) >= 0.9

    def test_identical_rows_degenerate(self):
        rows = np.tile(np.arange(6.0), (10, 1))
        assign, degenerate = clustering.spectral_cluster(
            rows, clustering.ClusterConfig(c=3))
        assert degenerate
        assert set(assign) == {0}

    def test_single_cluster_shortcut(self, rng):
        rows = rng.normal(size=(8, 5))
        assign, degenerate = clustering.spectral_cluster(
            rows, clustering.ClusterConfig(c=1))
        assert not degenerate
        assert np.all(assign == 0)

    def test_seeded_determinism(self, rng):
        rows, _ = _families(rng)
        cfg = clustering.ClusterConfig(c=3, seed=9)
        a = clustering.spectral_cluster(rows, cfg)[0]
        b = clustering.spectral_cluster(rows, cfg)[0]
        np.testing.assert_array_equal(a, b)

    def test_scale_invariance(self, rng):
        # cosine affinity ignores positive per-row rescaling
        rows, _ = _families(rng)
        scales = rng.uniform(0.5, 4.0, size=len(rows))
        cfg = clustering.ClusterConfig(c=3, seed=2)
        a = clustering.spectral_cluster(rows, cfg)[0]
        b = clustering.spectral_cluster(rows * scales[:, None], cfg)[0]
        np.testing.assert_array_equal(a, b)

    def test_too_few_series_raises(self):
        with pytest.raises(ValueError):
            clustering.spectral_cluster(np.ones((2, 4)), clustering.ClusterConfig(c=3))


class TestTrendLabels:
    def test_thresholding(self):
        assert clustering.label_trends(np.array([1.0, 1.2]), 0.5) == "increase"
        assert clustering.label_trends(np.array([-1.0, -1.2]), 0.5) == "decrease"
        assert clustering.label_trends(np.array([0.1, -0.1]), 0.5) == "flatline"


class TestPipeline:
    def test_end_to_end_families(self, rng):
        rows, labels = _families(rng)
        words = [f"w{i:03d}" for i in range(len(rows))]
        vocab = toy_vocab(words)
        out = clustering.cluster_trajectories(
            words, rows, vocab, clustering.ClusterConfig(c=3, lowess_frac=0.4, seed=1))
        assert sorted(out.trend_labels) == ["decrease", "flatline", "increase"]
        assert abs(sum(out.member_fractions) - 1.0) < 1e-12
        # the planted increasing family lands in the cluster labelled increase
        inc_cluster = out.trend_labels.index("increase")
        inc_words = {w for w, a in out.assignments.items() if a == inc_cluster}
        planted = {words[i] for i in np.flatnonzero(labels == 0)}
        assert len(inc_words & planted) / len(planted) >= 0.9

    def test_subsampling_by_post_freq(self, rng):
        rows, _ = _families(rng, per_family=4)
        words = [f"w{i:03d}" for i in range(len(rows))]
        vocab = toy_vocab(words)
        for i, w in enumerate(words):
            vocab.post_freq[w] = 100 - i
        cfg = clustering.ClusterConfig(c=3, sample_size=9, seed=1)
        out = clustering.cluster_trajectories(words, rows, vocab, cfg)
        assert out.words == words[:9]

    def test_report_shape(self, rng):
        rows, _ = _families(rng)
        words = [f"w{i:03d}" for i in range(len(rows))]
        out = clustering.cluster_trajectories(
            words, rows, toy_vocab(words), clustering.ClusterConfig(c=3, seed=1))
        report = clustering.cluster_report(out, k=4)
        assert [r["cluster"] for r in report] == [0, 1, 2]
        assert all(len(r["sample_words"]) <= 4 for r in report)
        text = clustering.format_report(report)
        assert text.splitlines()[0].startswith("Cluster")
