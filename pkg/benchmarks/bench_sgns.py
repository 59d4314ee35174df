"""Throughput comparison of the compiled and pure-Python training kernels.

Generates one synthetic week, flattens it to token ids, and times a fixed
number of epochs through each backend on identical inputs.

Usage: python benchmarks/bench_sgns.py [--posts 800] [--epochs 3]
"""

import argparse
import time

import numpy as np

from driftscope import corpus, synth
from driftscope.embeddings import _sgns_py, unigram_noise_cdf, bucket_token_ids, corpus_token_counts

try:
    from driftscope.embeddings import _sgns_c
except ImportError:
    _sgns_c = None


def run(kernel, w_in, w_out, tokens, offsets, cdf, epochs):
    w_in, w_out = w_in.copy(), w_out.copy()
    start = time.perf_counter()
    loss = 0.0
    for epoch in range(epochs):
        loss = kernel.train_epoch(w_in, w_out, tokens, offsets, 5, 5, 0.025,
                                  cdf, 1234 + epoch)
    elapsed = time.perf_counter() - start
    return elapsed, loss


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--posts", type=int, default=800)
    ap.add_argument("--epochs", type=int, default=3)
    ap.add_argument("--dim", type=int, default=30)
    args = ap.parse_args()

    spec = synth.default_spec(posts_per_week=args.posts, n_weeks=1,
                              n_shift_words=0, n_freq_words=0)
    lines, _ = synth.generate_corpus(spec)
    buckets, _ = corpus.ingest_posts(iter(lines))
    vocab = corpus.build_vocabulary(buckets, min_post_freq=2)
    tokens, offsets = bucket_token_ids(buckets[0], vocab)
    cdf = unigram_noise_cdf(corpus_token_counts(buckets, vocab))

    rng = np.random.default_rng(1)
    w_in = rng.uniform(-0.5, 0.5, (len(vocab), args.dim)) / args.dim
    w_out = rng.uniform(-0.5, 0.5, (len(vocab), args.dim)) / args.dim

    n_pairs = args.epochs * len(tokens) * 2 * 5  # rough center-context pairs
    print(f"vocab={len(vocab)} tokens={len(tokens)} dim={args.dim} epochs={args.epochs}")

    t_py, loss_py = run(_sgns_py, w_in, w_out, tokens, offsets, cdf, args.epochs)
    print(f"python : {t_py:8.2f} s   {n_pairs / t_py / 1e3:8.1f} kpairs/s   loss={loss_py:.2f}")

    if _sgns_c is None:
        print("cython : not built")
        return
    t_c, loss_c = run(_sgns_c, w_in, w_out, tokens, offsets, cdf, args.epochs)
    print(f"cython : {t_c:8.2f} s   {n_pairs / t_c / 1e3:8.1f} kpairs/s   loss={loss_c:.2f}")
    print(f"speedup: {t_py / t_c:.1f}x   |loss delta| = {abs(loss_py - loss_c):.3e}")


if __name__ == "__main__":
    main()
