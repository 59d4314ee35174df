import json
import os

import numpy as np
import pytest

from driftscope import bundle, explore


class TestPipelineArtifacts:
    def test_expected_files_written(self, tiny_bundle):
        d = tiny_bundle["dir"]
        for name in ["meta.json", "vocab.json", "usage_words.json", "clusters.json",
                     "forecasts.json", "correlations.json", "usage.csv", "dynamics.csv"]:
            assert os.path.exists(os.path.join(d, name)), name
        for name in ["freq", "tfidf", "d_f", "d_chi", "d_e", "cum"]:
            assert os.path.exists(os.path.join(d, "arrays", f"{name}.npy"))
        emb_dir = os.path.join(d, "embeddings")
        assert len([f for f in os.listdir(emb_dir) if f.endswith(".bin")]) == 6

    def test_meta_content(self, tiny_bundle):
        meta = tiny_bundle["bundle"].meta
        assert meta["n_weeks"] == 6
        assert meta["embedding_dim"] == 12
        assert sorted(meta["regions"]) == ["RU", "UA"]
        assert meta["vocab_size"] == len(tiny_bundle["bundle"].vocab)

    def test_forecast_grid_complete(self, tiny_bundle):
        keys = set(tiny_bundle["bundle"].forecasts)
        want = {f"{t}:1:{m}" for t in ("shift", "drift", "combined")
                for m in ("baseline", "adaboost", "lstm")}
        assert keys == want

    def test_cluster_reports_for_each_stat(self, tiny_bundle):
        clusters = tiny_bundle["bundle"].clusters
        assert set(clusters) == {"f", "chi", "e"}
        for rows in clusters.values():
            assert len(rows) == 3
            assert all(r["trend"] in ("increase", "decrease", "flatline") for r in rows)
            assert sum(r["percent_words"] for r in rows) == pytest.approx(100.0, abs=0.3)

    def test_correlations_present(self, tiny_bundle):
        corr = tiny_bundle["bundle"].correlations
        assert corr["cross_region"] is not None
        assert set(corr["usage_vs_shift"]) == {"RU", "UA"}
        n = len(corr["keywords"])
        assert np.array(corr["cross_region"]["values"], dtype=object).shape == (n, n)

    def test_json_artifacts_have_sorted_keys(self, tiny_bundle):
        path = os.path.join(tiny_bundle["dir"], "meta.json")
        text = open(path, encoding="utf-8").read()
        assert text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n" \
            or list(json.loads(text)) == sorted(json.loads(text))


class TestRoundTrip:
    def test_load_matches_in_memory(self, tiny_bundle):
        built = tiny_bundle["bundle"]
        loaded = bundle.load_bundle(tiny_bundle["dir"])
        assert loaded.meta == built.meta
        assert loaded.vocab.words == built.vocab.words
        np.testing.assert_allclose(loaded.shifts.d_e, built.shifts.d_e, atol=1e-12)
        np.testing.assert_allclose(loaded.usage_series.freq, built.usage_series.freq)
        assert loaded.forecasts == built.forecasts
        assert loaded.clusters == built.clusters
        # embeddings persist as float32
        np.testing.assert_allclose(
            loaded.emb.snapshots[3].w_in,
            built.emb.snapshots[3].w_in.astype(np.float32), atol=0)

    def test_missing_directory_raises(self, tmp_path):
        with pytest.raises(bundle.BundleError):
            bundle.load_bundle(str(tmp_path / "nope"))


class TestQuerySurface:
    def test_list_words_prefix_and_paging(self, tiny_bundle):
        b = tiny_bundle["bundle"]
        all_words = b.list_words(limit=10_000)
        assert all_words == b.vocab.words
        sub = b.list_words(prefix="t0", limit=3, offset=1)
        withp = [w for w in b.vocab.words if w.startswith("t0")]
        assert sub == withp[1:4]

    def test_series_payload(self, tiny_bundle):
        b = tiny_bundle["bundle"]
        w = b.usage_series.words[0]
        s = b.series(w)
        assert len(s["d_e"]) == 5 and len(s["cum"]) == 6
        assert len(s["tau_f"]) == 6 and len(s["d_chi"]) == 5
        np.testing.assert_allclose(s["d_e"], b.shifts.d_e[b.vocab.ids[w]])

    def test_series_unknown_word(self, tiny_bundle):
        with pytest.raises(explore.UnknownWordError):
            tiny_bundle["bundle"].series("no-such-word")

    def test_neighbors_and_bad_week(self, tiny_bundle):
        b = tiny_bundle["bundle"]
        w = b.vocab.words[0]
        out = b.neighbors(w, t=2, k=4)
        assert len(out["neighbors"]) == 4
        got = [n["word"] for n in out["neighbors"]]
        want = explore.nearest_neighbors(b.emb.snapshots[2], b.emb, w, 4)
        assert got == [x for x, _ in want]
        with pytest.raises(ValueError):
            b.neighbors(w, t=99, k=2)

    def test_trajectory_dict(self, tiny_bundle):
        b = tiny_bundle["bundle"]
        d = b.trajectory(b.vocab.words[1], k=2)
        assert len(d["points"]) == 6
        assert len(d["neighbors"]) == 6

    def test_forecast_lookup(self, tiny_bundle):
        b = tiny_bundle["bundle"]
        report = b.forecasts["shift:1:baseline"]
        word = next(iter(report["per_word"]))
        out = b.forecast_for(word, "shift", 1, "baseline")
        assert out["y"] == report["per_word"][word]["y"]
        assert out["pearson_r"] == report["pearson_r"]
        with pytest.raises(KeyError):
            b.forecast_for(word, "shift", 9, "baseline")
        with pytest.raises(explore.UnknownWordError):
            b.forecast_for("no-such-word", "shift", 1, "baseline")

    def test_top_keywords_excludes_stopwords(self, tiny_bundle):
        b = tiny_bundle["bundle"]
        kws = bundle.top_keywords(b.vocab, 5)
        assert len(kws) == 5
        assert all(not b.vocab.is_stopword(w) for w in kws)


class TestConfig:
    def test_load_config_from_toml(self, tmp_path):
        stop = tmp_path / "stop.txt"
        stop.write_text("the\nand\n", encoding="utf-8")
        cfg_path = tmp_path / "config.toml"
        cfg_path.write_text(
            f"""
seed = 9
min_post_freq = 2
stemmer = "suffix"
stopword_file = "{stop}"
horizons = [1, 2]
models = ["baseline", "adaboost"]

[embed]
d = 10
max_epochs = 7

[cluster]
c = 4
""",
            encoding="utf-8",
        )
        cfg = bundle.load_config(str(cfg_path))
        assert cfg.seed == 9
        assert cfg.min_post_freq == 2
        assert cfg.stopwords == frozenset({"the", "and"})
        assert cfg.embed.d == 10 and cfg.embed.max_epochs == 7
        assert cfg.cluster.c == 4
        assert cfg.horizons == (1, 2)
        assert cfg.models == ("baseline", "adaboost")
