"""PCA over PHY SIG-field features for telling concurrent CE frames apart.

Each frame is reduced to (rate, length, duration). Features are standardized,
the sample covariance is diagonalised with cyclic Jacobi rotations and frames
are assigned to the nearest label centroid in principal-component space.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FEATURES = ("rate_mbps", "length_bytes", "duration_us")
OPTIONAL = ("ap", "frame_class")
FRAME_CLASSES = ("CE", "beacon", "ack", "other")
JACOBI_TOL = 1e-12
_MAX_SWEEPS = 100


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class SigRecord:
    rate: float
    length: float
    duration: float
    ap_label: str | None = None
    frame_class: str | None = None

    def __post_init__(self):
        for name in ("rate", "length", "duration"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")
        if self.frame_class is not None and self.frame_class not in FRAME_CLASSES:
            raise ValueError(f"unknown frame_class {self.frame_class!r}")

    @property
    def features(self) -> tuple[float, float, float]:
        return (self.rate, self.length, self.duration)

    @property
    def is_ce(self) -> bool:
        return self.frame_class == "CE"


def feature_matrix(records) -> np.ndarray:
    if isinstance(records, np.ndarray):
        x = np.asarray(records, dtype=float)
    else:
        x = np.array([r.features for r in records], dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("empty dataset")
    return x


def _scale(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if x.shape[0] < 2:
        raise ValueError("fitting needs at least 2 rows")
    mu = x.mean(axis=0)
    sd = x.std(axis=0, ddof=1)
    return mu, sd


def standardize(records, model: "PcaModel | None" = None) -> np.ndarray:
    """Z-scores with the n-1 stddev; constant columns come out as zeros."""
    x = feature_matrix(records)
    mu, sd = (model.means, model.stds) if model is not None else _scale(x)
    if x.shape[1] != mu.shape[0]:
        raise ValueError(f"expected {mu.shape[0]} features, got {x.shape[1]}")
    safe = np.where(sd > 0, sd, 1.0)
    return np.where(sd > 0, (x - mu) / safe, 0.0)


def covariance(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[0] < 2:
        raise ValueError("covariance needs n >= 2 rows")
    c = z - z.mean(axis=0)
    cov = c.T @ c / (z.shape[0] - 1)
    return (cov + cov.T) / 2


def jacobi_eigh(sym: np.ndarray, tol: float = JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi; returns (values, vectors as columns) in descending order."""
    a = np.array(sym, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.abs(a).max()))
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * scale):
        raise ValueError("matrix is not symmetric")
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(_MAX_SWEEPS):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max(initial=0.0) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < tol:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.hypot(t, 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
                v = v @ rot
    else:
        raise RuntimeError("Jacobi did not converge")
    vals = np.diag(a).copy()
    order = sorted(range(n), key=lambda i: (-vals[i], i))
    vals, v = vals[order], v[:, order]
    for j in range(n):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-15)
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
    return vals, v


@dataclass(frozen=True)
class PcaModel:
    means: np.ndarray
    stds: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    k: int

    @classmethod
    def fit(cls, records, k: int = 2) -> "PcaModel":
        x = feature_matrix(records)
        mu, sd = _scale(x)
        if not 1 <= k <= x.shape[1]:
            raise ValueError(f"k must be in 1..{x.shape[1]}")
        z = np.where(sd > 0, (x - mu) / np.where(sd > 0, sd, 1.0), 0.0)
        vals, vecs = jacobi_eigh(covariance(z))
        return cls(mu, sd, vals, vecs, k)

    @property
    def components(self) -> np.ndarray:
        return self.eigenvectors[:, : self.k]

    def transform(self, records) -> np.ndarray:
        return project(standardize(records, self), self)


def principal_components(sym: np.ndarray, k: int) -> list[tuple[float, np.ndarray]]:
    vals, vecs = jacobi_eigh(sym)
    if not 1 <= k <= len(vals):
        raise ValueError(f"k must be in 1..{len(vals)}")
    return [(float(vals[j]), vecs[:, j].copy()) for j in range(k)]


def project(z: np.ndarray, model: PcaModel) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[1] != model.eigenvectors.shape[0]:
        raise ValueError("dimension mismatch between data and model")
    return z @ model.components


def reconstruct(scores: np.ndarray, model: PcaModel) -> np.ndarray:
    return scores @ model.components.T


# -- centroid classification -------------------------------------------------

@dataclass(frozen=True)
class Centroids:
    labels: tuple[str, ...]
    points: np.ndarray

    @classmethod
    def fit(cls, scores: np.ndarray, labels) -> "Centroids":
        labels = list(labels)
        if any(lab is None for lab in labels):
            raise ValueError("centroids need a label for every row")
        if not labels:
            raise ValueError("no labelled rows")
        names = sorted(set(labels))
        arr = np.asarray(labels, dtype=object)
        pts = np.array([scores[arr == name].mean(axis=0) for name in names])
        return cls(tuple(names), pts)

    def predict(self, scores: np.ndarray) -> list[str]:
        d = ((scores[:, None, :] - self.points[None, :, :]) ** 2).sum(axis=2)
        # labels are sorted, so argmin's first-hit rule is the lexicographic tie-break
        return [self.labels[i] for i in np.argmin(d, axis=1)]


@dataclass(frozen=True)
class Confusion:
    labels: tuple[str, ...]
    matrix: np.ndarray  # rows truth, columns prediction

    @classmethod
    def build(cls, truth, pred) -> "Confusion":
        labels = tuple(sorted(set(truth) | set(pred)))
        idx = {lab: i for i, lab in enumerate(labels)}
        m = np.zeros((len(labels), len(labels)), dtype=int)
        for t, p in zip(truth, pred):
            m[idx[t], idx[p]] += 1
        return cls(labels, m)

    @property
    def accuracy(self) -> float:
        total = self.matrix.sum()
        return float(np.trace(self.matrix) / total) if total else 0.0

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "matrix": self.matrix.tolist()}


def classify(records, model: PcaModel, centroids: Centroids, truth=None):
    """Nearest-centroid labels plus a confusion matrix against ``truth``.

    Without explicit truth the records' AP labels are used.
    """
    scores = model.transform(records)
    pred = centroids.predict(scores)
    if truth is None:
        truth = [r.ap_label for r in records]
    if any(t is None for t in truth):
        raise ValueError("truth labels missing")
    return pred, Confusion.build(truth, pred)


@dataclass
class PcaReport:
    ap: Confusion
    ce: Confusion
    model: PcaModel

    def to_json(self) -> dict:
        return {
            "k": self.model.k,
            "eigenvalues": [round(float(x), 12) for x in self.model.eigenvalues],
            "ap_accuracy": self.ap.accuracy,
            "ce_accuracy": self.ce.accuracy,
            "ap_confusion": self.ap.to_json(),
            "ce_confusion": self.ce.to_json(),
        }


def _ce_tag(r: SigRecord) -> str:
    return "CE" if r.is_ce else "non-CE"


def fit_and_score(train, test, k: int = 2) -> PcaReport:
    """Fit on ``train`` and score AP identity and CE-ness on ``test``.

    One centroid per (AP, frame class) pair: a single AP's traffic spans very
    different lengths, so one centroid per AP would sit between its clusters.
    """
    model = PcaModel.fit(train, k)
    pairs = Centroids.fit(model.transform(train),
                          [f"{r.ap_label}|{r.frame_class or 'other'}" for r in train])
    pred = [lab.split("|", 1) for lab in pairs.predict(model.transform(test))]
    return PcaReport(
        Confusion.build([r.ap_label for r in test], [ap for ap, _ in pred]),
        Confusion.build([_ce_tag(r) for r in test], ["CE" if c == "CE" else "non-CE" for _, c in pred]),
        model,
    )


# -- data ----------------------------------------------------------------------

# preamble + SIG overhead, microseconds
_PHY_OVERHEAD_US = 20.0
_SYNTH_APS = {
    "ap1": 6.0,
    "ap2": 12.0,
    "ap3": 18.0,
    "ap4": 24.0,
    "ap5": 36.0,
}
_SYNTH_LENGTHS = {"CE": 131, "beacon": 270, "ack": 14, "other": 600}


def synthetic_corpus(per_class: int = 40, seed: int = 0) -> list[SigRecord]:
    """Five APs, each with its own rate and a per-AP length offset."""
    rng = np.random.default_rng(seed)
    out = []
    for a, (ap, rate) in enumerate(_SYNTH_APS.items()):
        for cls, base_len in _SYNTH_LENGTHS.items():
            lengths = base_len + 12 * a + rng.integers(-2, 3, per_class)
            for n in lengths:
                dur = _PHY_OVERHEAD_US + 8 * float(n) / rate + rng.normal(0, 0.5)
                out.append(SigRecord(rate, float(n), round(dur, 3), ap, cls))
    return out


def _num(row: dict, col: str, line: int) -> float:
    raw = (row.get(col) or "").strip()
    try:
        v = float(raw)
    except ValueError:
        raise SchemaError(f"line {line}: {col} is not numeric: {raw!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise SchemaError(f"line {line}: {col} must be positive, got {raw!r}")
    return v


def parse_csv(text: str) -> list[SigRecord]:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in FEATURES if c not in header]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")
    out = []
    for row in reader:
        line = reader.line_num
        ap = (row.get("ap") or "").strip() or None
        fc = (row.get("frame_class") or "").strip() or None
        if fc is not None and fc not in FRAME_CLASSES:
            raise SchemaError(f"line {line}: unknown frame_class {fc!r}")
        out.append(SigRecord(_num(row, "rate_mbps", line), _num(row, "length_bytes", line),
                             _num(row, "duration_us", line), ap, fc))
    return out


def ingest_csv(path) -> list[SigRecord]:
    return parse_csv(Path(path).read_text())


def to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FEATURES + OPTIONAL)
    for r in records:
        w.writerow([repr(r.rate), repr(r.length), repr(r.duration), r.ap_label or "", r.frame_class or ""])
    return buf.getvalue()


def write_csv(records, path) -> None:
    Path(path).write_text(to_csv(records))


def sample_corpus_path() -> Path:
    return Path(__file__).with_name("data") / "sig_sample.csv"


def confusion_json(conf: Confusion) -> str:
    return json.dumps(conf.to_json(), sort_keys=True)
