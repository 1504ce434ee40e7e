"""Inter-frame timing with and without a relay in the path."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import truncnorm

SPEED_OF_LIGHT = 2.998e8  # m/s
T_OTHER_MIN_MS = 0.045
T_OTHER_MAX_MS = 20.0
INTER_FRAME_MEAN_MS = 18.66

BENIGN = "benign"
RELAYED = "relayed"


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Jitter:
    """Normal truncated to ``[low, high]``; ``std == 0`` is a point mass (clipped)."""

    mean: float
    std: float
    low: float = T_OTHER_MIN_MS
    high: float = T_OTHER_MAX_MS

    def __post_init__(self):
        if self.std < 0 or not self.low < self.high or not math.isfinite(self.mean):
            raise ValueError(f"invalid jitter distribution {self}")

    def draw(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if self.std == 0:
            return np.full(count, min(max(self.mean, self.low), self.high))
        a = (self.low - self.mean) / self.std
        b = (self.high - self.mean) / self.std
        return truncnorm.rvs(a, b, loc=self.mean, scale=self.std, size=count, random_state=rng)

    def expected(self) -> float:
        if self.std == 0:
            return min(max(self.mean, self.low), self.high)
        a = (self.low - self.mean) / self.std
        b = (self.high - self.mean) / self.std
        return float(truncnorm.mean(a, b, loc=self.mean, scale=self.std))


@dataclass(frozen=True)
class TimingParams:
    """Distances in metres, times in milliseconds.

    ``t_other`` is the AP-side inter-frame time the station always sees;
    ``t_other_a`` is the relay's own processing, paid on top of it.
    """

    d: float = 30.0
    d_a1: float = 20.0
    d_a2: float = 20.0
    c: float = SPEED_OF_LIGHT
    t_other: Jitter = Jitter(INTER_FRAME_MEAN_MS, 2.0)
    t_other_a: Jitter = Jitter(3.0, 0.0)
    t_alter: float = 0.0
    t_in: float = 20.5
    inter_frame_mean: float = INTER_FRAME_MEAN_MS

    def __post_init__(self):
        if self.d < 0 or self.d_a1 < 0 or self.d_a2 < 0:
            raise GeometryError("distances must be non-negative")
        if self.d_a1 + self.d_a2 < self.d:
            raise GeometryError("relay path d_a1 + d_a2 is shorter than the direct path d")
        if self.t_alter < 0:
            raise ValueError("t_alter must be >= 0")
        if self.t_in <= 0:
            raise ValueError("t_in must be > 0")
        if self.t_other_a.expected() > self.t_other.expected():
            raise ValueError("relay processing t_other_a cannot exceed t_other on average")

    @property
    def t_prop_ms(self) -> float:
        return self.d / self.c * 1e3

    @property
    def t_a_ms(self) -> float:
        return (self.d_a1 + self.d_a2) / self.c * 1e3

    @classmethod
    def from_config(cls, cfg: dict | None) -> "TimingParams":
        cfg = dict(cfg or {})
        for name in ("t_other", "t_other_a"):
            if name in cfg and isinstance(cfg[name], dict):
                cfg[name] = Jitter(**cfg[name])
        return cls(**cfg)


@dataclass(frozen=True)
class TimingSample:
    duration_ms: float
    label: str
    location_tag: str | None = None

    def __post_init__(self):
        if not self.duration_ms > 0:
            raise ValueError("duration must be positive")
        if self.label not in (BENIGN, RELAYED):
            raise ValueError(f"unknown label {self.label!r}")


def benign_durations(params: TimingParams, count: int, rng: np.random.Generator) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be >= 1")
    return params.t_prop_ms + params.t_other.draw(count, rng)


def relayed_durations(params: TimingParams, count: int, rng: np.random.Generator) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be >= 1")
    base = params.t_other.draw(count, rng)
    relay = params.t_other_a.draw(count, rng)
    return params.t_a_ms + base + relay + params.t_alter


def sample_benign(params: TimingParams, count: int, rng_seed: int,
                  location: str | None = None) -> list[TimingSample]:
    rng = np.random.default_rng(rng_seed)
    return [TimingSample(float(x), BENIGN, location) for x in benign_durations(params, count, rng)]


def sample_relayed(params: TimingParams, count: int, rng_seed: int,
                   location: str | None = None) -> list[TimingSample]:
    rng = np.random.default_rng(rng_seed)
    return [TimingSample(float(x), RELAYED, location) for x in relayed_durations(params, count, rng)]


def check_inter_frame(gaps, t_in: float) -> list[bool]:
    """Per-gap pass flags; a gap must be strictly below ``t_in``."""
    if t_in <= 0:
        raise ValueError("t_in must be > 0")
    return [g < t_in for g in gaps]


def calibrate_t_in(samples: list[TimingSample], n_sigma: float = 4.0) -> float:
    d = np.array([s.duration_ms for s in samples if s.label == BENIGN])
    if len(d) < 2:
        raise ValueError("need at least two benign samples")
    return float(d.mean() + n_sigma * d.std(ddof=1))


def to_csv(samples: list[TimingSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["duration_ms", "label", "location"])
    for s in samples:
        w.writerow([repr(s.duration_ms), s.label, s.location_tag or ""])
    return buf.getvalue()


def from_csv(text: str) -> list[TimingSample]:
    rows = csv.DictReader(io.StringIO(text))
    missing = {"duration_ms", "label"} - set(rows.fieldnames or ())
    if missing:
        raise ValueError(f"sample CSV missing columns: {sorted(missing)}")
    out = []
    for lineno, row in enumerate(rows, start=2):
        try:
            out.append(TimingSample(float(row["duration_ms"]), row["label"], row.get("location") or None))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out
