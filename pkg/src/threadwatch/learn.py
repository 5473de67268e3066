"""Training and evaluation: SMOTE balancing, the 75/25 split protocol,
weighted precision/recall/F1, and the F1-vs-horizon sweep.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import models
from .corpus import Corpus, build_threads
from .features import apply_minmax, dav, featurize_threads, fit_minmax


class LearnError(Exception):
    pass


@dataclass
class Dataset:
    X: np.ndarray  # (n, d)
    y: np.ndarray  # (n,) bool

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=bool)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise LearnError("X and y shapes are inconsistent")

    @property
    def dimension(self) -> int:
        return self.X.shape[1]


@dataclass
class Metrics:
    precision: float
    recall: float
    f1: float
    confusion: tuple[tuple[int, int], tuple[int, int]]  # [actual][predicted]
    per_class: dict = field(default_factory=dict)

    def row(self) -> list[float]:
        return [self.precision, self.recall, self.f1]


def smote(minority: np.ndarray, k: int = 5, amount_pct: int = 100,
          seed: int = 0) -> np.ndarray:
    """Synthetic minority samples by interpolating toward k-NN neighbors.

    amount_pct=100 emits as many synthetic points as there are minority
    points; each synthetic point is x + u*(nn - x) with u ~ Uniform(0,1).
    """
    minority = np.asarray(minority, dtype=float)
    n = len(minority)
    if k < 1:
        raise LearnError("k must be >= 1")
    if n <= k:
        raise LearnError(
            f"minority size {n} must exceed k={k}; use a smaller k")
    rng = np.random.default_rng(seed)
    total = int(round(n * amount_pct / 100.0))
    # pairwise distances once; neighbor lists exclude the point itself
    diff = minority[:, None, :] - minority[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k]
    out = np.empty((total, minority.shape[1]))
    for s in range(total):
        i = s % n
        nn = minority[neighbors[i][rng.integers(0, k)]]
        lam = rng.uniform(0.0, 1.0)
        out[s] = minority[i] + lam * (nn - minority[i])
    return out


def train(algorithm: str, data: Dataset, hyperparams: dict | None = None,
          seed: int = 0):
    """Fit one of the three classifier variants. All three are
    deterministic; seed is part of the contract for reproducibility."""
    try:
        cls = models.ALGORITHMS[algorithm]
    except KeyError:
        raise LearnError(f"unknown algorithm {algorithm!r}; "
                         f"choose from {sorted(models.ALGORITHMS)}") from None
    model = cls(**(hyperparams or {}))
    return model.fit(data.X, data.y)


def metrics_from_predictions(y_true: np.ndarray, y_pred: np.ndarray) -> Metrics:
    """Weighted-average precision/recall/F1 across the two classes.

    Undefined precision/recall (empty denominator) is taken as 0 with a
    warning, matching the single-class-test convention."""
    y_true = np.asarray(y_true, dtype=bool)
    y_pred = np.asarray(y_pred, dtype=bool)
    tp = int(np.sum(y_true & y_pred))
    fn = int(np.sum(y_true & ~y_pred))
    fp = int(np.sum(~y_true & y_pred))
    tn = int(np.sum(~y_true & ~y_pred))
    per_class = {}
    for cls, (tp_c, fp_c, fn_c) in {True: (tp, fp, fn), False: (tn, fn, fp)}.items():
        support = tp_c + fn_c
        if tp_c + fp_c == 0:
            if support:
                warnings.warn(f"precision undefined for class {cls}; using 0")
            prec = 0.0
        else:
            prec = tp_c / (tp_c + fp_c)
        rec = tp_c / support if support else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per_class[cls] = {"precision": prec, "recall": rec, "f1": f1,
                          "support": support}
    n = len(y_true)
    weighted = {m: sum(per_class[c][m] * per_class[c]["support"] / n
                       for c in (False, True))
                for m in ("precision", "recall", "f1")}
    return Metrics(precision=weighted["precision"], recall=weighted["recall"],
                   f1=weighted["f1"],
                   confusion=((tn, fp), (fn, tp)), per_class=per_class)


def _balance_with_smote(X: np.ndarray, y: np.ndarray, k: int,
                        seed: int) -> tuple[np.ndarray, np.ndarray]:
    n_pos, n_neg = int(np.sum(y)), int(np.sum(~y))
    if n_pos == n_neg or min(n_pos, n_neg) == 0:
        return X, y
    minority_is_pos = n_pos < n_neg
    minority = X[y] if minority_is_pos else X[~y]
    need = abs(n_neg - n_pos)
    k_eff = min(k, len(minority) - 1)
    if k_eff < 1:
        warnings.warn("minority class too small for SMOTE; skipping balancing")
        return X, y
    amount_pct = int(round(100.0 * need / len(minority)))
    if amount_pct == 0:
        return X, y
    synth = smote(minority, k=k_eff, amount_pct=amount_pct, seed=seed)
    X_out = np.vstack([X, synth])
    y_out = np.concatenate([y, np.full(len(synth), minority_is_pos)])
    return X_out, y_out


def evaluate_split(dataset: Dataset, train_frac: float = 0.75,
                   balance: bool = True, algorithm: str = "decision_tree",
                   seed: int = 0, smote_k: int = 5,
                   hyperparams: dict | None = None) -> Metrics:
    """Seeded shuffle-split evaluation.

    SMOTE (when enabled) and the min-max scaling statistics touch only
    the training portion; the test portion is scaled with the training
    statistics and left otherwise untouched.
    """
    n = len(dataset.y)
    if n < 8:
        raise LearnError("dataset too small to split (need >= 8 rows)")
    if not 0.0 < train_frac < 1.0:
        raise LearnError("train_frac must be in (0,1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = int(round(n * train_frac))
    train_idx, test_idx = order[:n_train], order[n_train:]

    stats = fit_minmax(dataset.X[train_idx].tolist())
    X_train = np.array(apply_minmax(dataset.X[train_idx].tolist(), stats))
    X_test = np.array(apply_minmax(dataset.X[test_idx].tolist(), stats))
    y_train, y_test = dataset.y[train_idx], dataset.y[test_idx]

    if len(np.unique(y_test)) < 2:
        warnings.warn("test portion contains a single class; "
                      "undefined precision reported as 0")
    if balance:
        X_train, y_train = _balance_with_smote(X_train, y_train, smote_k, seed)

    model = train(algorithm, Dataset(X_train, y_train), hyperparams, seed)
    y_pred = model.predict_scores(X_test) >= 0.5
    return metrics_from_predictions(y_test, y_pred)


def sweep_horizon(corpus: Corpus, is_target: dict[str, bool],
                  horizons: list[int] | None = None,
                  algorithm: str = "decision_tree", seed: int = 0,
                  window_minutes: int = 5, train_frac: float = 0.75,
                  balance: bool = True) -> list[tuple[int, Metrics]]:
    """Rebuild per-window count vectors at each horizon and evaluate.

    Each horizon uses an independently derived seed (seed + horizon) so
    results do not depend on evaluation order.
    """
    if horizons is None:
        horizons = list(range(5, 65, 5))
    threads = build_threads(corpus)
    results = []
    for horizon in horizons:
        vectors = featurize_threads(threads, is_target,
                                    window_minutes=window_minutes,
                                    t_final_minutes=horizon,
                                    with_macro=False, with_dav=True)
        data = Dataset(np.array([v.values() for v in vectors]),
                       np.array([v.label for v in vectors]))
        metrics = evaluate_split(data, train_frac=train_frac, balance=balance,
                                 algorithm=algorithm, seed=seed + horizon)
        results.append((horizon, metrics))
    return results


def write_sweep_csv(results: list[tuple[int, Metrics]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["horizon_min", "precision", "recall", "f1"])
        for horizon, m in results:
            writer.writerow([horizon, f"{m.precision:.6f}",
                             f"{m.recall:.6f}", f"{m.f1:.6f}"])
