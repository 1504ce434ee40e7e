"""Relay detectors over inter-frame durations and their confusion metrics."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .forest import RandomForest
from .model import BENIGN, RELAYED, TimingSample


def _ratio(a: int, b: int) -> float:
    return a / b if b else 0.0


@dataclass(frozen=True)
class DetectionMetrics:
    accuracy: float
    f1: float
    tpr: float
    tnr: float
    ppv: float
    npv: float
    tp: int = 0
    fn: int = 0
    tn: int = 0
    fp: int = 0

    @classmethod
    def from_confusion(cls, tp: int, fn: int, tn: int, fp: int) -> "DetectionMetrics":
        total = tp + fn + tn + fp
        if total == 0:
            raise ValueError("empty sample set")
        tpr, ppv = _ratio(tp, tp + fn), _ratio(tp, tp + fp)
        f1 = 2 * ppv * tpr / (ppv + tpr) if ppv + tpr else 0.0
        return cls(_ratio(tp + tn, total), f1, tpr, _ratio(tn, tn + fp), ppv, _ratio(tn, tn + fn),
                   tp, fn, tn, fp)

    def to_json(self) -> dict:
        return {"Accuracy": self.accuracy, "F1-score": self.f1, "TPR": self.tpr, "TNR": self.tnr,
                "PPV": self.ppv, "NPV": self.npv,
                "confusion": {"tp": self.tp, "fn": self.fn, "tn": self.tn, "fp": self.fp}}


def _labels(samples) -> np.ndarray:
    return np.array([s.label == RELAYED for s in samples], dtype=int)


class _Features:
    """Duration plus a one-hot location column per tag seen in training."""

    def __init__(self, samples):
        self.tags = sorted({s.location_tag for s in samples if s.location_tag})

    def __call__(self, samples) -> np.ndarray:
        cols = [[s.duration_ms for s in samples]]
        for tag in self.tags:
            cols.append([float(s.location_tag == tag) for s in samples])
        return np.array(cols, dtype=float).T


class ThresholdDetector:
    kind = "threshold"

    def __init__(self, cut: float):
        self.cut = cut

    def predict(self, samples) -> np.ndarray:
        return np.array([s.duration_ms > self.cut for s in samples], dtype=int)

    def describe(self) -> dict:
        return {"kind": self.kind, "cut_ms": self.cut}


class ForestDetector:
    kind = "forest"

    def __init__(self, forest: RandomForest, features: _Features):
        self.forest = forest
        self.features = features

    def predict(self, samples) -> np.ndarray:
        return self.forest.predict(self.features(samples))

    def describe(self) -> dict:
        return {"kind": self.kind, "n_trees": self.forest.n_trees, "max_depth": self.forest.max_depth,
                "location_tags": self.features.tags}


def youden_cut(durations: np.ndarray, labels: np.ndarray) -> float:
    """Cut maximising TPR - FPR for the rule ``duration > cut``."""
    order = np.argsort(durations, kind="stable")
    d, y = durations[order], labels[order]
    pos, neg = y.sum(), len(y) - y.sum()
    # predicting relayed above position i: TP = positives after i, FP = negatives after i
    tp = pos - np.cumsum(y)
    fp = neg - np.cumsum(1 - y)
    j = tp / pos - fp / neg
    distinct = np.append(d[1:] > d[:-1], True)
    j = np.where(distinct, j, -np.inf)
    i = int(np.argmax(j))
    if i == len(d) - 1:
        return float(d[-1])
    return float((d[i] + d[i + 1]) / 2)


def train_detector(samples, kind: str = "forest", rng_seed: int = 0,
                   n_trees: int = 25, max_depth: int = 6):
    samples = list(samples)
    y = _labels(samples)
    if y.min() == y.max():
        raise ValueError("training needs both benign and relayed samples")
    if kind == "threshold":
        return ThresholdDetector(youden_cut(np.array([s.duration_ms for s in samples]), y))
    if kind == "forest":
        if n_trees < 25:
            raise ValueError("forest needs at least 25 trees")
        feats = _Features(samples)
        forest = RandomForest(n_trees, max_depth, seed=rng_seed).fit(feats(samples), y)
        return ForestDetector(forest, feats)
    raise ValueError(f"unknown detector kind {kind!r}")


def confusion(predicted, actual) -> tuple[int, int, int, int]:
    predicted = np.asarray(predicted, int)
    actual = np.asarray(actual, int)
    tp = int(((predicted == 1) & (actual == 1)).sum())
    fn = int(((predicted == 0) & (actual == 1)).sum())
    tn = int(((predicted == 0) & (actual == 0)).sum())
    fp = int(((predicted == 1) & (actual == 0)).sum())
    return tp, fn, tn, fp


def evaluate_detector(detector, samples) -> DetectionMetrics:
    samples = list(samples)
    if not samples:
        raise ValueError("empty sample set")
    return DetectionMetrics.from_confusion(*confusion(detector.predict(samples), _labels(samples)))


def split(samples, test_fraction: float, rng_seed: int):
    """Shuffle and split into (train, test)."""
    samples = list(samples)
    rng = np.random.default_rng(rng_seed)
    order = rng.permutation(len(samples))
    n_test = int(round(len(samples) * test_fraction))
    test = [samples[i] for i in order[:n_test]]
    train = [samples[i] for i in order[n_test:]]
    return train, test


def metrics_json(metrics: DetectionMetrics) -> str:
    return json.dumps(metrics.to_json(), sort_keys=True)
