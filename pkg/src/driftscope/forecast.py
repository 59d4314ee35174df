"""Forecasting representation shift: tasks, models, metrics, cross-validation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import AdaBoostRegressor
from sklearn.tree import DecisionTreeRegressor

from .dynamics import ShiftSeries
from .lstm import LstmRegressor
from .usage import UsageSeries

TASKS = ("shift", "drift", "combined")
MODELS = ("baseline", "adaboost", "lstm")


class ForecastError(Exception):
    pass


class MetricError(Exception):
    pass


@dataclass(frozen=True)
class ForecastTask:
    source: str = "shift"        # shift | drift | combined
    horizon: int = 1
    region: str | None = None

    def __post_init__(self):
        if self.source not in TASKS:
            raise ValueError(f"unknown task source {self.source!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass
class ForecastDataset:
    task: ForecastTask
    words: list[str]
    features: np.ndarray     # (n_words, feature_len)
    targets: np.ndarray      # (n_words,)
    folds: np.ndarray        # (n_words,) fold ids


def build_dataset(
    usage: UsageSeries,
    shifts: ShiftSeries,
    task: ForecastTask,
    k_folds: int = 4,
    seed: int = 1,
) -> ForecastDataset:
    """Assemble per-word feature vectors and the final-shift target.

    Words whose frequency is zero in more than half of the weeks are
    dropped (sparsity filter). Features are the difference series cut to
    everything strictly before the horizon window; the target is the last
    representation-shift entry. The combined task concatenates drift
    features followed by shift features.
    """
    n = task.horizon
    delta_len = shifts.d_e.shape[1]
    if delta_len < n + 2:
        raise ForecastError(f"series too short for horizon {n}")
    cut = delta_len - n
    rows, words = [], []
    # usage.words and shifts.usage_words come from the same UsageSeries
    for ui, w in enumerate(shifts.usage_words):
        if np.count_nonzero(usage.freq[ui]) * 2 < usage.n_weeks:
            continue
        wid = shifts.vocab.ids[w]
        d_e = shifts.d_e[wid, :cut]
        d_chi = shifts.d_chi[ui, :cut]
        if task.source == "shift":
            feat = d_e
        elif task.source == "drift":
            feat = d_chi
        else:
            feat = np.concatenate([d_chi, d_e])
        rows.append((feat, shifts.d_e[wid, delta_len - 1]))
        words.append(w)
    if len(words) < k_folds:
        raise ForecastError(f"only {len(words)} words retained, need >= {k_folds}")
    features = np.stack([r[0] for r in rows])
    targets = np.array([r[1] for r in rows])
    folds = assign_folds(len(words), k_folds, seed)
    return ForecastDataset(task, words, features, targets, folds)


def assign_folds(n: int, k: int, seed: int) -> np.ndarray:
    """Seeded shuffle split into k folds whose sizes differ by at most 1."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    folds = np.empty(n, dtype=int)
    for fold_id, chunk in enumerate(np.array_split(order, k)):
        folds[chunk] = fold_id
    return folds


class PersistenceModel:
    """Predicts the last entry of each feature vector; nothing to fit."""

    def fit(self, features: np.ndarray, targets: np.ndarray) -> "PersistenceModel":
        return self

    def predict(self, features: np.ndarray) -> np.ndarray:
        return np.asarray(features)[:, -1].copy()


class BoostedTreesModel:
    """AdaBoost.R2 over depth-limited regression trees."""

    def __init__(self, n_estimators: int = 50, max_depth: int = 3,
                 loss: str = "linear", seed: int = 1):
        self._model = AdaBoostRegressor(
            estimator=DecisionTreeRegressor(max_depth=max_depth, random_state=seed),
            n_estimators=n_estimators,
            loss=loss,
            random_state=seed,
        )

    def fit(self, features, targets):
        self._model.fit(features, targets)
        return self

    def predict(self, features):
        return self._model.predict(features)

    @property
    def stage_weights(self) -> np.ndarray:
        return self._model.estimator_weights_[: len(self._model.estimators_)]


class LstmModel:
    def __init__(self, hidden: int = 32, epochs: int = 100, lr: float = 1e-2,
                 batch: int = 64, seed: int = 1):
        self._model = LstmRegressor(hidden=hidden, epochs=epochs, lr=lr,
                                    batch=batch, seed=seed)

    def fit(self, features, targets):
        self._model.fit(features, targets)
        return self

    def predict(self, features):
        return self._model.predict(features)


def make_model(name: str, seed: int = 1, **kwargs):
    if name == "baseline":
        return PersistenceModel()
    if name == "adaboost":
        return BoostedTreesModel(seed=seed, **kwargs)
    if name == "lstm":
        return LstmModel(seed=seed, **kwargs)
    raise ValueError(f"unknown model {name!r}")


def pearson(y: np.ndarray, y_hat: np.ndarray) -> float:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if len(y) != len(y_hat) or len(y) < 2:
        raise MetricError("pearson needs two equal-length arrays of size >= 2")
    dy = y - y.mean()
    dh = y_hat - y_hat.mean()
    denom = np.sqrt((dy ** 2).sum()) * np.sqrt((dh ** 2).sum())
    if denom == 0:
        raise MetricError("pearson undefined for zero-variance input")
    return float((dy * dh).sum() / denom)


def rmse(y: np.ndarray, y_hat: np.ndarray) -> float:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    return float(np.sqrt(np.mean((y - y_hat) ** 2)))


def mape(y: np.ndarray, y_hat: np.ndarray) -> tuple[float, int]:
    """Maximum absolute percent error; zero targets are excluded and counted."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    ok = y != 0
    excluded = int((~ok).sum())
    if not ok.any():
        return 0.0, excluded
    return float(np.max(np.abs((y[ok] - y_hat[ok]) / y[ok])) * 100.0), excluded


def relative_error(y_i: float, y_hat_i: float) -> float:
    if y_i == 0:
        return float("inf")
    return abs((y_i - y_hat_i) / y_i)


@dataclass
class ForecastReport:
    task: ForecastTask
    model: str
    pearson_r: float
    rmse: float
    mape: float
    mape_excluded: int
    fold_pearson: list[float]
    fold_rmse: list[float]
    words: list[str]
    y: np.ndarray
    y_hat: np.ndarray
    keyword_errors: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "task": self.task.source,
            "horizon": self.task.horizon,
            "region": self.task.region,
            "model": self.model,
            "pearson_r": self.pearson_r,
            "rmse": self.rmse,
            "rmse_display": self.rmse * 100.0,
            "mape": self.mape,
            "mape_excluded": self.mape_excluded,
            "fold_pearson": self.fold_pearson,
            "fold_rmse": self.fold_rmse,
            "keyword_errors": self.keyword_errors,
            "per_word": {
                w: {"y": float(a), "y_hat": float(b)}
                for w, a, b in zip(self.words, self.y, self.y_hat)
            },
        }


def cross_validate(
    dataset: ForecastDataset,
    model_name: str,
    k: int = 4,
    seed: int = 1,
    keywords: list[str] | None = None,
    **model_kwargs,
) -> ForecastReport:
    """Fit on k-1 folds, predict the held-out fold; pool for the headline metrics."""
    if k > len(dataset.words):
        raise ForecastError("more folds than retained words")
    y_hat = np.empty_like(dataset.targets)
    fold_r, fold_g = [], []
    for fold in range(k):
        held = dataset.folds == fold
        model = make_model(model_name, seed=seed, **model_kwargs)
        try:
            model.fit(dataset.features[~held], dataset.targets[~held])
            y_hat[held] = model.predict(dataset.features[held])
        except Exception as exc:
            raise ForecastError(f"fold {fold} failed: {exc}") from exc
        try:
            fold_r.append(pearson(dataset.targets[held], y_hat[held]))
        except MetricError:
            fold_r.append(float("nan"))
        fold_g.append(rmse(dataset.targets[held], y_hat[held]))
    zeta, excluded = mape(dataset.targets, y_hat)
    keyword_errors = []
    if keywords:
        index = {w: i for i, w in enumerate(dataset.words)}
        for kw in keywords:
            if kw in index:
                i = index[kw]
                keyword_errors.append({
                    "keyword": kw,
                    "error": relative_error(dataset.targets[i], y_hat[i]),
                })
        keyword_errors.sort(key=lambda r: -r["error"])
    return ForecastReport(
        task=dataset.task,
        model=model_name,
        pearson_r=pearson(dataset.targets, y_hat),
        rmse=rmse(dataset.targets, y_hat),
        mape=zeta,
        mape_excluded=excluded,
        fold_pearson=fold_r,
        fold_rmse=fold_g,
        words=dataset.words,
        y=dataset.targets,
        y_hat=y_hat,
        keyword_errors=keyword_errors,
    )


def format_report(report: ForecastReport) -> str:
    lines = [
        f"task={report.task.source} horizon={report.task.horizon} model={report.model}"
        + (f" region={report.task.region}" if report.task.region else ""),
        f"{'r':>10} {'RMSE x1e-2':>12} {'MAPE':>10}",
        f"{report.pearson_r:>10.3f} {report.rmse * 100:>12.3f} {report.mape:>10.1f}",
    ]
    if report.keyword_errors:
        lines.append("keyword relative errors:")
        for row in report.keyword_errors:
            lines.append(f"  {row['keyword']:<20} {row['error']:.3f}")
    return "\n".join(lines)
