import numpy as np
import pytest

from driftscope import corpus, dynamics, embeddings, synth, usage
from tests import _acceptance_report

record_acceptance = _acceptance_report.record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_report.LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_spec():
    return synth.default_spec(
        n_topics=3, words_per_topic=30, posts_per_week=300, n_weeks=8,
        n_shift_words=6, n_freq_words=5, seed=7,
    )


@pytest.fixture(scope="session")
def small_corpus(small_spec):
    lines, truth = synth.generate_corpus(small_spec)
    buckets, _ = corpus.ingest_posts(iter(lines))
    vocab = corpus.build_vocabulary(buckets, min_post_freq=5)
    return {"lines": lines, "truth": truth, "buckets": buckets, "vocab": vocab}


@pytest.fixture(scope="session")
def small_embeddings(small_corpus):
    params = embeddings.EmbedParams(d=16, max_epochs=30, seed=11)
    return embeddings.train_series(
        small_corpus["buckets"], small_corpus["vocab"], params
    )


@pytest.fixture(scope="session")
def small_shifts(small_corpus, small_embeddings):
    use = usage.build_usage_series(small_corpus["buckets"], small_corpus["vocab"])
    return use, dynamics.build_shift_series(use, small_embeddings)


def toy_bucket(token_lists, week=0):
    posts = [
        corpus.Post(post_id=f"p{i}", timestamp=week * synth.WEEK_SECONDS + i,
                    tokens=tuple(toks))
        for i, toks in enumerate(token_lists)
    ]
    return corpus.WeekBucket(week, posts)


def toy_vocab(words, stopwords=()):
    words = list(words)
    return corpus.Vocabulary(
        words=words,
        ids={w: i for i, w in enumerate(words)},
        post_freq={w: 1 for w in words},
        stopword_flags=[w in stopwords for w in words],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def tiny_pipeline_config(lstm_epochs=15):
    from driftscope import bundle, clustering as clst, embeddings as embs
    return bundle.PipelineConfig(
        min_post_freq=3,
        embed=embs.EmbedParams(d=12, max_epochs=20, seed=5),
        cluster=clst.ClusterConfig(c=3, seed=5),
        tasks=("shift", "drift", "combined"),
        horizons=(1,),
        models=("baseline", "adaboost", "lstm"),
        lstm_epochs=lstm_epochs,
        n_keywords=8,
        seed=5,
    )


@pytest.fixture(scope="session")
def tiny_bundle(tmp_path_factory):
    """Full pipeline run on a very small synthetic corpus."""
    from driftscope import bundle
    root = tmp_path_factory.mktemp("bundle")
    spec = synth.default_spec(n_topics=2, words_per_topic=12, posts_per_week=150,
                              n_weeks=6, n_shift_words=2, n_freq_words=2, seed=3)
    lines, truth = synth.generate_corpus(spec)
    corpus_path = root / "corpus.jsonl"
    corpus_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    out_dir = root / "out"
    config = tiny_pipeline_config()
    built = bundle.run_pipeline(str(corpus_path), config, str(out_dir))
    return {
        "bundle": built,
        "dir": str(out_dir),
        "corpus": str(corpus_path),
        "config": config,
        "spec": spec,
        "truth": truth,
    }
