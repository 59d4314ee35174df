import json

import pytest

from driftscope import corpus


def _jsonl(records):
    return [json.dumps(r) for r in records]


class TestTokenize:
    def test_lowercase_and_split(self):
        assert corpus.tokenize_normalize("Hello, WORLD!") == ["hello", "world"]

    def test_url_stripped(self):
        toks = corpus.tokenize_normalize("see https://example.com/a?b=1 now")
        assert toks == ["see", "now"]

    def test_cyrillic_preserved(self):
        assert corpus.tokenize_normalize("Привет мир") == ["привет", "мир"]

    def test_empty_input(self):
        assert corpus.tokenize_normalize("") == []
        assert corpus.tokenize_normalize("   ...!!!") == []

    def test_suffix_stemmer_strips_one_suffix(self):
        # stem must keep length >= 3, only one suffix comes off
        assert corpus.suffix_stemmer("под") == "под"
        assert corpus.suffix_stemmer("games") == "gam"      # "es" comes off
        assert corpus.suffix_stemmer("walking") == "walk"
        out = corpus.tokenize_normalize("Walking games", stemmer=corpus.suffix_stemmer)
        assert out == ["walk", "gam"]

    def test_identity_stemmer_is_noop(self):
        assert corpus.identity_stemmer("чтение") == "чтение"


class TestIngest:
    def _records(self):
        week = 7 * 24 * 3600
        return [
            {"id": "a", "timestamp": 10, "text": "alpha beta"},
            {"id": "b", "timestamp": week + 5, "text": "gamma", "region": "RU"},
            {"id": "c", "timestamp": 3 * week + 1, "text": "delta delta"},
        ]

    def test_week_assignment_with_gaps(self):
        buckets, skipped = corpus.ingest_posts(iter(_jsonl(self._records())))
        assert skipped == 0
        assert [b.week_index for b in buckets] == [0, 1, 2, 3]
        assert [b.post_count for b in buckets] == [1, 1, 0, 1]

    def test_malformed_records_skipped_and_counted(self):
        lines = _jsonl(self._records())
        lines.insert(1, "{not json")
        lines.insert(3, json.dumps({"id": "x", "text": "no timestamp"}))
        buckets, skipped = corpus.ingest_posts(iter(lines))
        assert skipped == 2
        assert sum(b.post_count for b in buckets) == 3

    def test_week_origin_shifts_indexing(self):
        week = 7 * 24 * 3600
        buckets, _ = corpus.ingest_posts(
            iter(_jsonl(self._records())), week_origin=week
        )
        # the week-0 post now falls before the origin and is skipped
        assert [b.week_index for b in buckets] == [0, 1, 2]

    def test_region_preserved_and_filterable(self):
        buckets, _ = corpus.ingest_posts(iter(_jsonl(self._records())))
        ru = corpus.filter_region(buckets, "RU")
        assert [b.week_index for b in ru] == [b.week_index for b in buckets]
        assert sum(b.post_count for b in ru) == 1
        assert ru[1].posts[0].post_id == "b"

    def test_synth_corpus_counts(self, small_spec, small_corpus):
        buckets = small_corpus["buckets"]
        assert len(buckets) == small_spec.n_weeks
        for b, expected in zip(buckets, small_spec.posts_per_week):
            assert b.post_count == expected


class TestVocabulary:
    def _buckets(self):
        # "hot": 3 distinct posts; "warm": 2; "rare": 1; repeats inside one
        # post must not inflate the distinct-post frequency.
        week = 7 * 24 * 3600
        recs = [
            {"id": "p0", "timestamp": 0, "text": "hot warm rare rare"},
            {"id": "p1", "timestamp": 1, "text": "hot hot warm"},
            {"id": "p2", "timestamp": week, "text": "hot"},
        ]
        buckets, _ = corpus.ingest_posts(iter(_jsonl(recs)))
        return buckets

    def test_min_post_freq_threshold(self):
        vocab = corpus.build_vocabulary(self._buckets(), min_post_freq=2)
        assert set(vocab.words) == {"hot", "warm"}
        assert vocab.post_freq == {"hot": 3, "warm": 2}

    def test_ids_ordered_by_post_freq_then_lexicographic(self):
        vocab = corpus.build_vocabulary(self._buckets(), min_post_freq=1)
        assert vocab.words == ["hot", "warm", "rare"]
        assert [vocab.ids[w] for w in vocab.words] == [0, 1, 2]

    def test_stopwords_retained_with_flag(self):
        vocab = corpus.build_vocabulary(
            self._buckets(), min_post_freq=1, stopwords={"hot"}
        )
        assert "hot" in vocab.ids
        assert vocab.stopword_flags[vocab.ids["hot"]]
        assert "hot" not in vocab.content_words()
        assert "warm" in vocab.content_words()

    def test_round_trip_dict(self):
        vocab = corpus.build_vocabulary(self._buckets(), min_post_freq=1,
                                        stopwords={"rare"})
        clone = corpus.Vocabulary.from_dict(vocab.to_dict())
        assert clone.words == vocab.words
        assert clone.ids == vocab.ids
        assert clone.post_freq == vocab.post_freq
        assert clone.stopword_flags == vocab.stopword_flags

    def test_synth_vocab_covers_planted_words(self, small_corpus):
        vocab = small_corpus["vocab"]
        truth = small_corpus["truth"]
        for entry in truth.shift_words + truth.freq_words:
            assert entry["word"] in vocab.ids

    def test_empty_corpus_raises(self):
        with pytest.raises(corpus.CorpusError):
            corpus.build_vocabulary([], min_post_freq=1)
