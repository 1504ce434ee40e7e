"""Scenario configuration: JSON in, validated dataclasses out.

Validation errors name the offending field as a dotted path, e.g.
``costs.sign_ms``, and config files that cannot be read name the file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..codec import SLICE_WIDTHS, CodecSpec
from ..phych import ChannelModel
from ..protofsm import AdversaryAction
from ..timebound import GeometryError, TimingParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CostConstants:
    sign_ms: float = 0.65
    verify_ms: float = 5.63
    extract_per_slice_ms: float = 0.02
    base_ce_ms: float = 300.0


@dataclass(frozen=True)
class Adversary:
    action: AdversaryAction
    t_alter: float = 5.0
    position: int | None = None  # frame after which channel tricks happen
    d_a1: float | None = None
    d_a2: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    n_frames: int = 13
    codec: CodecSpec = field(default_factory=lambda: CodecSpec.for_frames("identity", 13))
    channel: ChannelModel | None = None  # None is a noiseless link
    timing: TimingParams = field(default_factory=TimingParams)
    adversary: Adversary | None = None
    seed: int = 0
    costs: CostConstants = field(default_factory=CostConstants)
    extra_eap_frames: bool = False
    sections: dict = field(default_factory=dict, compare=False)

    @property
    def slices(self) -> int:
        return self.n_frames + (1 if self.extra_eap_frames else 0)

    def section(self, name: str) -> dict:
        return dict(self.sections.get(name) or {})


def _num(obj: dict, key: str, path: str, default: float, minimum: float | None = 0.0) -> float:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or math.isnan(v):
        raise ConfigError(f"{path}: expected a number, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {v}")
    return float(v)


def _obj(raw, path: str) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected an object")
    return raw


def parse_config(raw: dict, seed: int | None = None) -> ScenarioConfig:
    raw = _obj(raw, "<root>")
    n = raw.get("n_frames", 13)
    if n not in SLICE_WIDTHS or isinstance(n, bool):
        raise ConfigError(f"n_frames: must be one of 13, 14, 15, got {n!r}")
    extra = raw.get("extra_eap_frames", False)
    if not isinstance(extra, bool):
        raise ConfigError("extra_eap_frames: expected true or false")
    if extra and n + 1 not in SLICE_WIDTHS:
        raise ConfigError("extra_eap_frames: n_frames + 1 must stay within 13..15")
    slices = n + (1 if extra else 0)

    codec_raw = _obj(raw.get("codec"), "codec")
    try:
        codec = CodecSpec.from_config(codec_raw, slices)
    except ValueError as exc:
        raise ConfigError(f"codec.kind: {exc}") from None

    channel = None
    ch_raw = raw.get("channel")
    if ch_raw is not None:
        ch_raw = _obj(ch_raw, "channel")
        kind = ch_raw.get("kind", "awgn")
        if kind not in ("none", "awgn", "rayleigh"):
            raise ConfigError(f"channel.kind: unknown channel {kind!r}")
        if kind != "none":
            channel = ChannelModel(kind, _num(ch_raw, "snr_db", "channel.snr_db", 10.0, None))

    try:
        timing = TimingParams.from_config(_obj(raw.get("timing"), "timing"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"timing: {exc}") from None

    adversary = None
    adv_raw = raw.get("adversary")
    if adv_raw is not None:
        adv_raw = _obj(adv_raw, "adversary")
        try:
            action = AdversaryAction(adv_raw.get("action"))
        except ValueError:
            raise ConfigError(f"adversary.action: unknown action {adv_raw.get('action')!r}") from None
        pos = adv_raw.get("position")
        if pos is not None and (not isinstance(pos, int) or not 1 <= pos < slices):
            raise ConfigError(f"adversary.position: must be an integer in 1..{slices - 1}")
        geo = _obj(adv_raw.get("geometry"), "adversary.geometry")
        adversary = Adversary(action, _num(adv_raw, "t_alter", "adversary.t_alter", 5.0), pos,
                              geo.get("d_a1"), geo.get("d_a2"))

    costs_raw = _obj(raw.get("costs"), "costs")
    unknown = set(costs_raw) - {f.name for f in fields(CostConstants)}
    if unknown:
        raise ConfigError(f"costs.{sorted(unknown)[0]}: unknown cost constant")
    costs = CostConstants(**{f.name: _num(costs_raw, f.name, f"costs.{f.name}", f.default)
                             for f in fields(CostConstants)})

    s = raw.get("seed", 0) if seed is None else seed
    if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < 2**64:
        raise ConfigError(f"seed: expected an unsigned 64-bit integer, got {s!r}")

    sections = {k: _obj(raw.get(k), k) for k in ("sweep", "relay", "detect", "fsm", "pca") if k in raw}
    return ScenarioConfig(n, codec, channel, timing, adversary, s, costs, extra, sections)


def load_config(path, seed: int | None = None) -> ScenarioConfig:
    if path is None:
        return parse_config({}, seed)
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"{p}: config file not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{p}: cannot read config ({exc})") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    try:
        return parse_config(raw, seed)
    except ConfigError as exc:
        raise ConfigError(f"{p}: {exc}") from None


__all__ = ["Adversary", "ConfigError", "CostConstants", "GeometryError", "ScenarioConfig",
           "load_config", "parse_config"]
