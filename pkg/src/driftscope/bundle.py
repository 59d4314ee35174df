"""Precompute-then-serve bundle: runs the full pipeline and persists artifacts.

A bundle directory is the only hand-off between the analysis pipeline, the
CLI and the HTTP service. Every file written here is deterministic for a
fixed seed (no timestamps, sorted JSON keys, raw .npy arrays).
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import clustering, corpus, dynamics, embeddings, explore, forecast, synth, usage

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_STEMMERS = {
    "identity": corpus.identity_stemmer,
    "suffix": corpus.suffix_stemmer,
}


class BundleError(Exception):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    week_origin: int = 0
    week_len_seconds: int = synth.WEEK_SECONDS
    min_post_freq: int = 5
    stopwords: frozenset[str] = frozenset()
    stemmer: str = "identity"
    seed: int = 1
    embed: embeddings.EmbedParams = embeddings.EmbedParams()
    cluster: clustering.ClusterConfig = clustering.ClusterConfig()
    tasks: tuple[str, ...] = forecast.TASKS
    horizons: tuple[int, ...] = (1, 2, 3)
    models: tuple[str, ...] = forecast.MODELS
    lstm_epochs: int = 100
    n_keywords: int = 20
    region_analysis: bool = True


def load_config(path: str) -> PipelineConfig:
    """Read the TOML key-value config file."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    stopwords: frozenset[str] = frozenset()
    if "stopword_file" in data:
        stopwords = frozenset(corpus.load_stopwords(data["stopword_file"]))
    seed = int(data.get("seed", 1))
    emb = data.get("embed", {})
    clu = data.get("cluster", {})
    return PipelineConfig(
        week_origin=int(data.get("week_origin", 0)),
        week_len_seconds=int(data.get("week_len_seconds", synth.WEEK_SECONDS)),
        min_post_freq=int(data.get("min_post_freq", 5)),
        stopwords=stopwords,
        stemmer=data.get("stemmer", "identity"),
        seed=seed,
        embed=embeddings.EmbedParams(
            d=int(emb.get("d", 30)),
            window=int(emb.get("window", 5)),
            negatives=int(emb.get("negatives", 5)),
            initial_lr=float(emb.get("initial_lr", 0.025)),
            rho_threshold=float(emb.get("rho_threshold", 0.0001)),
            max_epochs=int(emb.get("max_epochs", 50)),
            seed=int(emb.get("seed", seed)),
        ),
        cluster=clustering.ClusterConfig(
            c=int(clu.get("c", 3)),
            lowess_frac=float(clu.get("lowess_frac", 0.25)),
            sample_size=int(clu.get("sample_size", 5000)),
            seed=int(clu.get("seed", seed)),
        ),
        tasks=tuple(data.get("tasks", forecast.TASKS)),
        horizons=tuple(int(h) for h in data.get("horizons", (1, 2, 3))),
        models=tuple(data.get("models", forecast.MODELS)),
        lstm_epochs=int(data.get("lstm_epochs", 100)),
        n_keywords=int(data.get("n_keywords", 20)),
        region_analysis=bool(data.get("region_analysis", True)),
    )


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def _read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class AnalysisBundle:
    """All precomputed artifacts for one corpus, cross-validated on load."""

    meta: dict
    vocab: corpus.Vocabulary
    usage_series: usage.UsageSeries
    shifts: dynamics.ShiftSeries
    emb: embeddings.EmbeddingSeries
    clusters: dict[str, list[dict]] = field(default_factory=dict)
    forecasts: dict[str, dict] = field(default_factory=dict)
    correlations: dict = field(default_factory=dict)

    def validate(self) -> None:
        T = self.meta["n_weeks"]
        if len(self.emb) != T:
            raise BundleError(f"embedding series has {len(self.emb)} weeks, meta says {T}")
        if self.usage_series.n_weeks != T or self.shifts.n_weeks != T:
            raise BundleError("usage/shift series week count mismatch")
        if any(s.w_in.shape[0] != len(self.vocab) for s in self.emb.snapshots):
            raise BundleError("snapshot vocabulary size mismatch")

    # --- query surface used by the HTTP service and CLI ---

    def list_words(self, prefix: str = "", limit: int = 50, offset: int = 0) -> list[str]:
        matches = [w for w in self.vocab.words if w.startswith(prefix)]
        return matches[offset: offset + limit]

    def series(self, word: str) -> dict:
        if word not in self.vocab.ids:
            raise explore.UnknownWordError(word)
        wid = self.vocab.ids[word]
        out = {
            "word": word,
            "d_e": self.shifts.d_e[wid].tolist(),
            "cum": self.shifts.cum[wid].tolist(),
            "tau_f": None,
            "tau_chi": None,
            "d_f": None,
            "d_chi": None,
        }
        uidx = self.shifts.usage_index().get(word)
        if uidx is not None:
            out["tau_f"] = self.usage_series.freq[uidx].tolist()
            out["tau_chi"] = self.usage_series.tfidf[uidx].tolist()
            out["d_f"] = self.shifts.d_f[uidx].tolist()
            out["d_chi"] = self.shifts.d_chi[uidx].tolist()
        return out

    def neighbors(self, word: str, t: int, k: int, metric: str = "cosine") -> dict:
        if not (0 <= t < len(self.emb)):
            raise ValueError(f"week {t} out of range")
        pairs = explore.nearest_neighbors(self.emb.snapshots[t], self.emb, word, k, metric)
        return {
            "word": word,
            "t": t,
            "metric": metric,
            "neighbors": [{"word": w, "distance": d} for w, d in pairs],
        }

    def trajectory(self, word: str, k: int = 2) -> dict:
        return explore.project_trajectory(self.emb, word, k).to_dict()

    def forecast_for(self, word: str, task: str, horizon: int, model: str) -> dict:
        key = f"{task}:{horizon}:{model}"
        if key not in self.forecasts:
            raise KeyError(key)
        report = self.forecasts[key]
        if word not in report["per_word"]:
            raise explore.UnknownWordError(word)
        entry = report["per_word"][word]
        return {
            "word": word,
            "task": task,
            "horizon": horizon,
            "model": model,
            "y": entry["y"],
            "y_hat": entry["y_hat"],
            "pearson_r": report["pearson_r"],
            "rmse": report["rmse"],
            "mape": report["mape"],
        }


def top_keywords(vocab: corpus.Vocabulary, n: int) -> list[str]:
    """Most frequent non-stopword words; the default correlation keyword set."""
    return [w for w in vocab.words if not vocab.is_stopword(w)][:n]


def _keyword_map(words: list[str], matrix: np.ndarray, keywords: list[str]) -> dict[str, np.ndarray]:
    idx = {w: i for i, w in enumerate(words)}
    return {kw: matrix[idx[kw]] for kw in keywords if kw in idx}


def compute_region_correlations(
    buckets: list[corpus.WeekBucket],
    vocab: corpus.Vocabulary,
    shifts: dynamics.ShiftSeries,
    config: PipelineConfig,
    regions: list[str],
    progress=None,
) -> dict:
    """Appendix-style matrices: drift across regions, drift vs shift per region.

    Region embedding series are retrained end-to-end on region-restricted
    buckets with the shared full-corpus vocabulary.
    """
    keywords = top_keywords(vocab, config.n_keywords)
    region_dchi: dict[str, dict[str, np.ndarray]] = {}
    region_de: dict[str, dict[str, np.ndarray]] = {}
    for region in regions:
        rbuckets = corpus.filter_region(buckets, region)
        if all(b.post_count == 0 for b in rbuckets):
            continue
        ruse = usage.build_usage_series(rbuckets, vocab)
        if progress:
            progress(f"training {region} embeddings")
        remb = embeddings.train_series(rbuckets, vocab, config.embed)
        rshifts = dynamics.build_shift_series(ruse, remb)
        region_dchi[region] = _keyword_map(ruse.words, rshifts.d_chi, keywords)
        region_de[region] = _keyword_map(vocab.words, rshifts.d_e, keywords)
    out: dict = {"keywords": keywords, "cross_region": None, "usage_vs_shift": {}}
    if len(region_dchi) >= 2:
        a, b = sorted(region_dchi)[:2]
        out["cross_region"] = explore.series_correlation(
            region_dchi[a], region_dchi[b], keywords, kind=f"d_chi:{a}-vs-{b}"
        ).to_dict()
    for region in region_dchi:
        out["usage_vs_shift"][region] = explore.series_correlation(
            region_dchi[region], region_de[region], keywords,
            kind=f"d_chi-vs-d_e:{region}",
        ).to_dict()
    return out


def run_pipeline(
    corpus_path: str,
    config: PipelineConfig,
    out_dir: str,
    progress=None,
) -> AnalysisBundle:
    """Ingest -> vocabulary -> usage -> embeddings -> dynamics -> clusters
    -> forecasts -> correlations, persisting every artifact under out_dir."""
    say = progress or (lambda msg: None)
    stemmer = _STEMMERS[config.stemmer]
    with open(corpus_path, encoding="utf-8") as fh:
        buckets, skipped = corpus.ingest_posts(
            fh, stemmer, config.week_origin, config.week_len_seconds
        )
    vocab = corpus.build_vocabulary(buckets, config.min_post_freq, config.stopwords)
    say(f"ingested {sum(b.post_count for b in buckets)} posts over {len(buckets)} weeks "
        f"({skipped} skipped), vocabulary {len(vocab)}")

    use = usage.build_usage_series(buckets, vocab)
    say(f"training embeddings ({embeddings.BACKEND} backend)")
    emb = embeddings.train_series(
        buckets, vocab, config.embed,
        progress=lambda s: say(
            f"  week {s.week_index}: epochs={s.epochs_run} rho={s.final_rho:.2e}"
            + (" cap-hit" if s.cap_hit else "")
        ),
    )
    shifts = dynamics.build_shift_series(use, emb)

    say("clustering trajectories")
    uwords = use.words
    clusters = {}
    for stat, (words, matrix) in {
        "f": (uwords, shifts.d_f),
        "chi": (uwords, shifts.d_chi),
        "e": (vocab.words, shifts.d_e),
    }.items():
        traj = clustering.cluster_trajectories(words, matrix, vocab, config.cluster)
        clusters[stat] = clustering.cluster_report(traj)

    say("fitting forecast models")
    keywords = top_keywords(vocab, config.n_keywords)
    forecasts = {}
    for task_name in config.tasks:
        for horizon in config.horizons:
            task = forecast.ForecastTask(source=task_name, horizon=horizon)
            try:
                dataset = forecast.build_dataset(use, shifts, task, seed=config.seed)
            except forecast.ForecastError as exc:
                say(f"  skipping {task_name} h={horizon}: {exc}")
                continue
            for model in config.models:
                kwargs = {"epochs": config.lstm_epochs} if model == "lstm" else {}
                report = forecast.cross_validate(
                    dataset, model, seed=config.seed, keywords=keywords, **kwargs
                )
                forecasts[f"{task_name}:{horizon}:{model}"] = report.to_dict()

    regions = sorted({p.region for b in buckets for p in b.posts if p.region})
    correlations: dict = {"keywords": keywords, "cross_region": None, "usage_vs_shift": {}}
    if config.region_analysis and regions:
        say(f"region analysis over {regions}")
        correlations = compute_region_correlations(
            buckets, vocab, shifts, config, regions, progress=say
        )

    meta = {
        "n_weeks": len(buckets),
        "week_origin": config.week_origin,
        "week_len_seconds": config.week_len_seconds,
        "vocab_size": len(vocab),
        "embedding_dim": config.embed.d,
        "regions": regions,
        "seed": config.seed,
        "skipped_records": skipped,
        "tasks": list(config.tasks),
        "horizons": list(config.horizons),
        "models": list(config.models),
        "keywords": keywords,
    }
    bundle = AnalysisBundle(
        meta=meta, vocab=vocab, usage_series=use, shifts=shifts, emb=emb,
        clusters=clusters, forecasts=forecasts, correlations=correlations,
    )
    save_bundle(bundle, out_dir)
    say(f"bundle written to {out_dir}")
    return bundle


def save_bundle(bundle: AnalysisBundle, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    arrays = os.path.join(out_dir, "arrays")
    os.makedirs(arrays, exist_ok=True)
    _write_json(os.path.join(out_dir, "meta.json"), bundle.meta)
    _write_json(os.path.join(out_dir, "vocab.json"), bundle.vocab.to_dict())
    _write_json(os.path.join(out_dir, "usage_words.json"), bundle.usage_series.words)
    for name, arr in {
        "freq": bundle.usage_series.freq,
        "tfidf": bundle.usage_series.tfidf,
        "d_f": bundle.shifts.d_f,
        "d_chi": bundle.shifts.d_chi,
        "d_e": bundle.shifts.d_e,
        "cum": bundle.shifts.cum,
    }.items():
        np.save(os.path.join(arrays, f"{name}.npy"), arr)
    embeddings.save_series(bundle.emb, os.path.join(out_dir, "embeddings"),
                           seed=bundle.meta.get("seed", 0))
    _write_json(os.path.join(out_dir, "clusters.json"), bundle.clusters)
    _write_json(os.path.join(out_dir, "forecasts.json"), bundle.forecasts)
    _write_json(os.path.join(out_dir, "correlations.json"), bundle.correlations)
    with open(os.path.join(out_dir, "usage.csv"), "w", encoding="utf-8") as fh:
        usage.write_usage_csv(bundle.usage_series, fh)
    with open(os.path.join(out_dir, "dynamics.csv"), "w", encoding="utf-8") as fh:
        dynamics.write_dynamics_csv(bundle.shifts, fh)


def load_bundle(path: str) -> AnalysisBundle:
    if not os.path.isdir(path):
        raise BundleError(f"bundle directory not found: {path}")
    meta = _read_json(os.path.join(path, "meta.json"))
    vocab = corpus.Vocabulary.from_dict(_read_json(os.path.join(path, "vocab.json")))
    words = _read_json(os.path.join(path, "usage_words.json"))
    arrays = os.path.join(path, "arrays")
    load = lambda name: np.load(os.path.join(arrays, f"{name}.npy"))
    use = usage.UsageSeries(
        words=words, freq=load("freq"), tfidf=load("tfidf"), empty_weeks=[]
    )
    emb = embeddings.load_series(os.path.join(path, "embeddings"), vocab)
    shifts = dynamics.ShiftSeries(
        vocab=vocab, usage_words=words,
        d_f=load("d_f"), d_chi=load("d_chi"), d_e=load("d_e"), cum=load("cum"),
    )
    bundle = AnalysisBundle(
        meta=meta, vocab=vocab, usage_series=use, shifts=shifts, emb=emb,
        clusters=_read_json(os.path.join(path, "clusters.json")),
        forecasts=_read_json(os.path.join(path, "forecasts.json")),
        correlations=_read_json(os.path.join(path, "correlations.json")),
    )
    bundle.validate()
    return bundle
