"""Synthetic corpus generator with planted topic shifts and frequency trends.

Serves as the ground-truth oracle for the whole pipeline: every planted
label (shift word, frequency-trend word, stable word) is known exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

WEEK_SECONDS = 7 * 24 * 3600


class SynthError(Exception):
    pass


@dataclass(frozen=True)
class ShiftEntry:
    word: str
    source: str
    target: str
    switch_week: int
    ramp: int = 2


@dataclass(frozen=True)
class FreqEntry:
    word: str
    trend: str              # increase | decrease | flat
    rate: float = 2.0
    change_week: int | None = None   # None -> T // 2


@dataclass
class SynthSpec:
    topics: dict[str, list[str]]
    posts_per_week: list[int]
    shift_schedule: list[ShiftEntry] = field(default_factory=list)
    freq_schedule: list[FreqEntry] = field(default_factory=list)
    post_len: tuple[int, int] = (8, 14)
    regions: tuple[str, ...] = ("RU", "UA")
    seed: int = 1

    @property
    def n_weeks(self) -> int:
        return len(self.posts_per_week)

    def validate(self) -> None:
        if not self.topics or any(not inv for inv in self.topics.values()):
            raise SynthError("every topic needs a non-empty word inventory")
        T = self.n_weeks
        for e in self.shift_schedule:
            if e.word not in self.topics[e.source]:
                raise SynthError(f"shift word {e.word!r} not in source topic {e.source!r}")
            if not (0 < e.switch_week < T):
                raise SynthError(f"switch week {e.switch_week} out of (0, {T})")
        for e in self.freq_schedule:
            if e.rate <= 0:
                raise SynthError(f"rate must be positive for {e.word!r}")
            if e.trend not in ("increase", "decrease", "flat"):
                raise SynthError(f"unknown trend {e.trend!r}")


@dataclass
class GroundTruth:
    shift_words: list[dict]
    freq_words: list[dict]
    stable_words: list[str]
    topics: dict[str, list[str]]

    def to_json(self) -> str:
        return json.dumps(
            {
                "shift_words": self.shift_words,
                "freq_words": self.freq_words,
                "stable_words": self.stable_words,
                "topics": self.topics,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        d = json.loads(text)
        return cls(
            shift_words=d["shift_words"],
            freq_words=d["freq_words"],
            stable_words=d["stable_words"],
            topics=d["topics"],
        )


def ground_truth(spec: SynthSpec) -> GroundTruth:
    T = spec.n_weeks
    shift = [
        {
            "word": e.word,
            "source": e.source,
            "target": e.target,
            "switch_week": e.switch_week,
            "ramp": e.ramp,
        }
        for e in spec.shift_schedule
    ]
    freq = [
        {
            "word": e.word,
            "trend": e.trend,
            "rate": e.rate,
            "change_week": e.change_week if e.change_week is not None else T // 2,
        }
        for e in spec.freq_schedule
    ]
    planted = {e.word for e in spec.shift_schedule} | {e.word for e in spec.freq_schedule}
    stable = sorted(
        w for inv in spec.topics.values() for w in inv if w not in planted
    )
    return GroundTruth(
        shift_words=shift,
        freq_words=freq,
        stable_words=stable,
        topics={k: list(v) for k, v in spec.topics.items()},
    )


def _shift_progress(entry: ShiftEntry, week: int) -> float:
    """0 before the ramp, 1 after; linear across the ramp centered at switch_week."""
    if entry.ramp <= 0:
        return 1.0 if week >= entry.switch_week else 0.0
    start = entry.switch_week - entry.ramp / 2.0
    return float(np.clip((week - start) / entry.ramp, 0.0, 1.0))


def _week_topic_weights(spec: SynthSpec, week: int) -> dict[str, tuple[list[str], np.ndarray]]:
    """Per-topic word inventories and sampling weights for one week."""
    T = spec.n_weeks
    shift_by_word = {e.word: e for e in spec.shift_schedule}
    freq_mult = {}
    for e in spec.freq_schedule:
        change = e.change_week if e.change_week is not None else T // 2
        if e.trend == "increase":
            freq_mult[e.word] = e.rate if week >= change else 1.0
        elif e.trend == "decrease":
            freq_mult[e.word] = 1.0 / e.rate if week >= change else 1.0
        else:
            freq_mult[e.word] = 1.0

    out = {}
    for topic, inventory in spec.topics.items():
        words = list(inventory)
        weights = np.ones(len(words))
        # shift words fade out of their source topic across the ramp
        for i, w in enumerate(words):
            e = shift_by_word.get(w)
            if e is not None and e.source == topic:
                weights[i] = 1.0 - _shift_progress(e, week)
            weights[i] *= freq_mult.get(w, 1.0)
        # and fade into their target topic
        for e in spec.shift_schedule:
            if e.target == topic and e.word not in inventory:
                p = _shift_progress(e, week)
                if p > 0:
                    words.append(e.word)
                    weights = np.append(weights, p * freq_mult.get(e.word, 1.0))
        keep = weights > 0
        out[topic] = (
            [w for w, k in zip(words, keep) if k],
            weights[keep] / weights[keep].sum(),
        )
    return out


def generate_week(spec: SynthSpec, week: int) -> list[dict]:
    """All post records of one week; RNG stream derived from (seed, week)."""
    rng = np.random.default_rng([spec.seed, week])
    topic_names = sorted(spec.topics)
    weights = _week_topic_weights(spec, week)
    lo, hi = spec.post_len
    records = []
    for i in range(spec.posts_per_week[week]):
        topic = topic_names[rng.integers(len(topic_names))]
        words, probs = weights[topic]
        length = int(rng.integers(lo, hi + 1))
        tokens = rng.choice(len(words), size=length, p=probs)
        records.append({
            "id": f"w{week}p{i}",
            "timestamp": week * WEEK_SECONDS + i,
            "text": " ".join(words[t] for t in tokens),
            "region": spec.regions[int(rng.integers(len(spec.regions)))],
        })
    return records


def generate_corpus(spec: SynthSpec) -> tuple[list[str], GroundTruth]:
    """JSONL lines for the whole corpus plus the planted ground truth."""
    spec.validate()
    lines = []
    for week in range(spec.n_weeks):
        for rec in generate_week(spec, week):
            lines.append(json.dumps(rec, sort_keys=True, ensure_ascii=False))
    return lines, ground_truth(spec)


def default_spec(
    n_topics: int = 4,
    words_per_topic: int = 60,
    posts_per_week: int = 5000,
    n_weeks: int = 12,
    n_shift_words: int = 10,
    n_freq_words: int = 10,
    seed: int = 1,
) -> SynthSpec:
    """Desk-scale default: trains in minutes, big enough for AUC statistics."""
    topics = {
        f"topic{k}": [f"t{k}w{j:02d}" for j in range(words_per_topic)]
        for k in range(n_topics)
    }
    names = sorted(topics)
    shift = [
        ShiftEntry(
            word=topics[names[i % n_topics]][0 + i // n_topics],
            source=names[i % n_topics],
            target=names[(i + n_topics // 2) % n_topics],
            switch_week=n_weeks // 2,
            ramp=2,
        )
        for i in range(n_shift_words)
    ]
    used = {e.word for e in shift}
    freq = []
    trends = ["increase", "decrease", "flat"]
    # round-robin across topics so trend words don't pile into one inventory
    pool = [
        topics[names[j % n_topics]][words_per_topic // 2 + j // n_topics]
        for j in range(n_topics * (words_per_topic - words_per_topic // 2))
    ]
    for trend in trends:
        for i in range(n_freq_words):
            w = pool.pop(0)
            assert w not in used
            freq.append(FreqEntry(word=w, trend=trend, rate=2.0))
    return SynthSpec(
        topics=topics,
        posts_per_week=[posts_per_week] * n_weeks,
        shift_schedule=shift,
        freq_schedule=freq,
        seed=seed,
    )


def spec_from_toml(data: dict) -> SynthSpec:
    """Build a spec from a parsed TOML document."""
    if "topics" not in data:
        raise SynthError("spec file needs a [topics] table")
    ppw = data.get("posts_per_week")
    if isinstance(ppw, int):
        ppw = [ppw] * int(data["n_weeks"])
    shift = [
        ShiftEntry(
            word=e["word"], source=e["source"], target=e["target"],
            switch_week=int(e["switch_week"]), ramp=int(e.get("ramp", 2)),
        )
        for e in data.get("shift", [])
    ]
    freq = [
        FreqEntry(
            word=e["word"], trend=e["trend"], rate=float(e.get("rate", 2.0)),
            change_week=e.get("change_week"),
        )
        for e in data.get("freq", [])
    ]
    post_len = tuple(data.get("post_len", (8, 14)))
    return SynthSpec(
        topics={k: list(v) for k, v in data["topics"].items()},
        posts_per_week=list(ppw),
        shift_schedule=shift,
        freq_schedule=freq,
        post_len=post_len,  # type: ignore[arg-type]
        seed=int(data.get("seed", 1)),
    )
