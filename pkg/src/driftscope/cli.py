"""driftscope command line interface."""

from __future__ import annotations

import json
import sys

import click

from . import bundle as bundle_mod
from . import clustering, corpus, dynamics, embeddings, forecast, synth, usage


@click.group()
def main():
    """Measure, cluster, forecast and explore weekly word usage and meaning change."""


def _load_config(path: str | None) -> bundle_mod.PipelineConfig:
    return bundle_mod.load_config(path) if path else bundle_mod.PipelineConfig()


def _load_spec(path: str | None) -> synth.SynthSpec:
    if not path:
        return synth.default_spec()
    from .bundle import tomllib

    with open(path, "rb") as fh:
        return synth.spec_from_toml(tomllib.load(fh))


@main.command("synth")
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None,
              help="TOML synthetic-corpus spec (defaults to the desk-scale spec).")
@click.option("--out", required=True, type=click.Path(), help="Output corpus JSONL.")
@click.option("--truth", type=click.Path(), default=None, help="Ground-truth JSON path.")
def synth_cmd(spec_path, out, truth):
    """Generate a synthetic corpus with planted shifts and trends."""
    spec = _load_spec(spec_path)
    lines, gt = synth.generate_corpus(spec)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    if truth:
        with open(truth, "w", encoding="utf-8") as fh:
            fh.write(gt.to_json() + "\n")
    click.echo(f"wrote {len(lines)} posts to {out}")


@main.command("pipeline")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--bundle", "bundle_dir", required=True, type=click.Path())
def pipeline_cmd(corpus_path, config_path, bundle_dir):
    """Run the full analysis pipeline and write a bundle directory."""
    config = _load_config(config_path)
    bundle_mod.run_pipeline(corpus_path, config, bundle_dir, progress=click.echo)


@main.command("embed")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", required=True, type=click.Path(), help="Snapshot directory.")
def embed_cmd(corpus_path, config_path, out):
    """Train the weekly embedding series only."""
    config = _load_config(config_path)
    stemmer = corpus.identity_stemmer if config.stemmer == "identity" else corpus.suffix_stemmer
    with open(corpus_path, encoding="utf-8") as fh:
        buckets, _ = corpus.ingest_posts(fh, stemmer, config.week_origin,
                                         config.week_len_seconds)
    vocab = corpus.build_vocabulary(buckets, config.min_post_freq, config.stopwords)
    click.echo(f"vocabulary {len(vocab)}, backend {embeddings.BACKEND}")
    series = embeddings.train_series(
        buckets, vocab, config.embed,
        progress=lambda s: click.echo(
            f"week {s.week_index}: epochs={s.epochs_run} rho={s.final_rho:.2e}"),
    )
    embeddings.save_series(series, out, seed=config.embed.seed)
    click.echo(f"wrote {len(series)} snapshots to {out}")


@main.command("dynamics")
@click.option("--bundle", "bundle_dir", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.File("w"), default="-",
              help="CSV output (default stdout).")
def dynamics_cmd(bundle_dir, out):
    """Export per-word difference series from a bundle as CSV."""
    b = bundle_mod.load_bundle(bundle_dir)
    dynamics.write_dynamics_csv(b.shifts, out)


@main.command("cluster")
@click.option("--bundle", "bundle_dir", required=True, type=click.Path(exists=True))
@click.option("--stat", type=click.Choice(["f", "chi", "e"]), default="chi")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of a table.")
def cluster_cmd(bundle_dir, stat, as_json):
    """Show the trajectory-cluster report for one statistic."""
    b = bundle_mod.load_bundle(bundle_dir)
    rows = b.clusters[stat]
    if as_json:
        click.echo(json.dumps(rows, sort_keys=True, ensure_ascii=False))
    else:
        click.echo(clustering.format_report(rows))


@main.command("forecast")
@click.option("--bundle", "bundle_dir", type=click.Path(exists=True), default=None,
              help="Read the precomputed report from a bundle.")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None,
              help="Recompute from a corpus instead (required for --region).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--task", type=click.Choice(list(forecast.TASKS)), default="shift")
@click.option("--horizon", type=click.IntRange(1), default=1)
@click.option("--model", type=click.Choice(list(forecast.MODELS)), default="lstm")
@click.option("--region", default=None, help="Restrict to posts with this region tag.")
@click.option("--keywords", "keyword_file", type=click.Path(exists=True), default=None,
              help="One keyword per line; adds the relative-error table.")
@click.option("--json", "as_json", is_flag=True)
def forecast_cmd(bundle_dir, corpus_path, config_path, task, horizon, model,
                 region, keyword_file, as_json):
    """Cross-validated forecast report for one task/horizon/model."""
    config = _load_config(config_path)
    keywords = None
    if keyword_file:
        with open(keyword_file, encoding="utf-8") as fh:
            keywords = [line.strip() for line in fh if line.strip()]
    if bundle_dir and not region:
        b = bundle_mod.load_bundle(bundle_dir)
        key = f"{task}:{horizon}:{model}"
        if key in b.forecasts:
            click.echo(json.dumps(b.forecasts[key], sort_keys=True))
            return
        use, shifts = b.usage_series, b.shifts
    elif corpus_path:
        stemmer = (corpus.identity_stemmer if config.stemmer == "identity"
                   else corpus.suffix_stemmer)
        with open(corpus_path, encoding="utf-8") as fh:
            buckets, _ = corpus.ingest_posts(fh, stemmer, config.week_origin,
                                             config.week_len_seconds)
        vocab = corpus.build_vocabulary(buckets, config.min_post_freq, config.stopwords)
        if region:
            buckets = corpus.filter_region(buckets, region)
        use = usage.build_usage_series(buckets, vocab)
        emb = embeddings.train_series(buckets, vocab, config.embed)
        shifts = dynamics.build_shift_series(use, emb)
    else:
        raise click.UsageError("need --bundle or --corpus")
    dataset = forecast.build_dataset(
        use, shifts, forecast.ForecastTask(task, horizon, region), seed=config.seed
    )
    kwargs = {"epochs": config.lstm_epochs} if model == "lstm" else {}
    report = forecast.cross_validate(dataset, model, seed=config.seed,
                                     keywords=keywords, **kwargs)
    if as_json:
        click.echo(json.dumps(report.to_dict(), sort_keys=True))
    else:
        click.echo(forecast.format_report(report))


@main.command("explore")
@click.argument("word")
@click.option("--bundle", "bundle_dir", required=True, type=click.Path(exists=True))
@click.option("--k", type=click.IntRange(0), default=2, help="Neighbors per week.")
def explore_cmd(word, bundle_dir, k):
    """Emit a word's 2-D trajectory with per-week neighbor labels as JSON."""
    b = bundle_mod.load_bundle(bundle_dir)
    if word not in b.vocab.ids:
        click.echo(f"unknown word: {word}", err=True)
        sys.exit(1)
    click.echo(json.dumps(b.trajectory(word, k), sort_keys=True, ensure_ascii=False))


@main.command("serve")
@click.option("--bundle", "bundle_dir", required=True, type=click.Path(exists=True))
@click.option("--bind", default="127.0.0.1:8000")
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="Directory of built UI assets.")
def serve_cmd(bundle_dir, bind, static_dir):
    """Serve the read-only JSON API (and UI if built) over HTTP."""
    from .service import serve

    try:
        b = bundle_mod.load_bundle(bundle_dir)
    except bundle_mod.BundleError as exc:
        click.echo(f"bundle error: {exc}", err=True)
        sys.exit(1)
    serve(b, bind, static_dir)


if __name__ == "__main__":
    main()
