"""End-to-end CE simulation with the connection-time accounting."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..bits import from_array, to_array
from ..phych import flip_bits, flip_probability
from ..protofsm import AdversaryAction as Act
from ..protofsm import enforce_limit
from ..sigchain import (
    ApIdentity,
    ChainContext,
    KeyMaterial,
    apply_channel_switch,
    build_message,
    generate_signature,
    reassemble_and_verify,
    slice_and_embed,
    verify_sig,
)
from ..timebound import TimingParams, benign_durations, check_inter_frame, relayed_durations
from .config import ScenarioConfig

AP_MAC = "02:00:5E:10:00:01"
EPOCH = 1_700_000_000
HOME_CHANNEL = 6
STA_FAKE_CHANNEL = 11
AP_FORCED_CHANNEL = 1
FIRST_SEQ = 100
_DIGITS = 9


@dataclass(frozen=True)
class FrameLog:
    index: int
    attempt: int
    channel: int
    gap_ms: float
    status: str


@dataclass
class CeReport:
    outcome: str
    reason: str | None
    n_frames: int
    slices: int
    t_extract_ms: float
    t_ce_ms: float
    overhead_percent: float
    frames: list[FrameLog] = field(default_factory=list)
    adversary: str | None = None
    adversary_succeeded: bool = False
    codec_statuses: list[str] = field(default_factory=list)
    benchmark: dict | None = None

    @property
    def connected(self) -> bool:
        return self.outcome == "connected"

    def to_json(self) -> dict:
        out = asdict(self)
        if self.benchmark is None:
            out.pop("benchmark")
        return out

    summary_header = ("outcome", "reason", "n_frames", "slices", "t_extract_ms", "t_ce_ms", "overhead_percent")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.summary_header)
        w.writerow([self.outcome, self.reason or "", self.n_frames, self.slices,
                    repr(self.t_extract_ms), repr(self.t_ce_ms), repr(self.overhead_percent)])
        return buf.getvalue()


def connection_time(cfg: ScenarioConfig) -> tuple[float, float, float]:
    """(t_extract, t_ce, overhead %) from the cost constants alone."""
    c = cfg.costs
    t_extract = round(c.extract_per_slice_ms * cfg.slices, _DIGITS)
    t_ce = round(math.fsum([c.base_ce_ms, c.sign_ms, c.verify_ms, t_extract]), _DIGITS)
    overhead = round((t_ce - c.base_ce_ms) / c.base_ce_ms * 100, _DIGITS) if c.base_ce_ms else 0.0
    return t_extract, t_ce, overhead


def _relay_params(cfg: ScenarioConfig, t_alter: float) -> TimingParams:
    adv = cfg.adversary
    geo = {}
    if adv.d_a1 is not None:
        geo["d_a1"] = float(adv.d_a1)
    if adv.d_a2 is not None:
        geo["d_a2"] = float(adv.d_a2)
    return replace(cfg.timing, t_alter=t_alter, **geo)


def _altered_frame(cfg: ScenarioConfig, pos: int) -> int | None:
    act = cfg.adversary.action if cfg.adversary else None
    if act is Act.SpoofElementKeepPreamble:
        return cfg.slices  # the EAPOL3 element is rewritten, preamble carried over
    if act is Act.SpoofPreambleBits:
        return pos
    return None


def ce_run(cfg: ScenarioConfig, benchmark: bool = False) -> CeReport:
    rng = np.random.default_rng([cfg.seed, 0xCE])
    n = cfg.slices
    adv = cfg.adversary
    act = adv.action if adv else None
    pos = (adv.position or n // 2) if adv else 0

    key = KeyMaterial.generate(f"ap-{cfg.seed}".encode())
    ap = ApIdentity.from_str(AP_MAC)
    m = build_message(ap, EPOCH + cfg.seed)
    codec = cfg.codec if cfg.codec.kind != "identity" else None

    ap_channel = AP_FORCED_CHANNEL if act in (Act.JamAndForceApSwitch, Act.DualChannelCsaMitm) else HOME_CHANNEL
    last_seq = FIRST_SEQ + n - 1
    signed = m if act is not Act.ReplaySliceChain else build_message(ap, EPOCH + cfg.seed - 3600)
    chain = slice_and_embed(generate_signature(signed, key), n, ChainContext(ap_channel, last_seq), key, codec)
    if ap_channel != HOME_CHANNEL:
        chain = apply_channel_switch(chain, pos, key)

    sta_ctx = ChainContext(HOME_CHANNEL, last_seq)
    if act in (Act.FakeCsaToSta, Act.DualChannelCsaMitm):
        sta_ctx = sta_ctx.with_switch(pos, STA_FAKE_CHANNEL)

    t_extract, t_ce, overhead = connection_time(cfg)
    report = CeReport("connected", None, cfg.n_frames, n, t_extract, t_ce, overhead,
                      adversary=act.value if act else None)
    altered = _altered_frame(cfg, pos)
    p = flip_probability(cfg.channel) if cfg.channel is not None else 0.0
    budget = ChainContext(HOME_CHANNEL, FIRST_SEQ)

    received = []
    for s in sorted(chain.slices, key=lambda s: s.index):
        channel = sta_ctx.channel if sta_ctx.switch_log and s.index > pos else HOME_CHANNEL
        attempt = 0
        while True:
            attempt += 1
            if adv is None:
                gap = float(benign_durations(cfg.timing, 1, rng)[0])
            else:
                t_alter = adv.t_alter if s.index == altered else 0.0
                gap = float(relayed_durations(_relay_params(cfg, t_alter), 1, rng)[0])
            timely = check_inter_frame([gap], cfg.timing.t_in)[0]
            report.frames.append(FrameLog(s.index, attempt, channel, round(gap, _DIGITS),
                                          "accepted" if timely else "late"))
            if timely:
                break
            budget, ok = enforce_limit(budget)
            if not ok:
                report.outcome, report.reason = "rejected", "time_bound_violation"
                return _finish(report, key, m, benchmark)
        budget = ChainContext(HOME_CHANNEL, FIRST_SEQ)  # the retry limit is per frame
        bits = s.bits
        if s.index == altered and act is Act.SpoofPreambleBits:
            bits = ("1" if bits[0] == "0" else "0") + bits[1:]
        if p > 0:
            bits = from_array(flip_bits(to_array(bits), p, rng))
        received.append(replace(s, bits=bits))

    verdict = reassemble_and_verify(replace(chain, slices=tuple(received)), key.public_key, sta_ctx, key, m, codec)
    report.codec_statuses = list(verdict.statuses)
    if not verdict:
        report.outcome, report.reason = "rejected", f"{verdict.reason}_failure"
    elif act is not None:
        # verification passed although the adversary touched the exchange
        report.adversary_succeeded = True
    return _finish(report, key, m, benchmark)


def _finish(report: CeReport, key: KeyMaterial, m: str, benchmark: bool) -> CeReport:
    if benchmark:
        report.benchmark = measure_crypto(key, m)
    return report


def measure_crypto(key: KeyMaterial, m: str, reps: int = 20) -> dict:
    """Wall-clock sign/verify cost of this implementation, for information only."""
    t0 = time.perf_counter()
    for _ in range(reps):
        sig = generate_signature(m, key)
    t1 = time.perf_counter()
    for _ in range(reps):
        verify_sig(m, sig, key.public_key)
    t2 = time.perf_counter()
    return {"sign_ms": (t1 - t0) / reps * 1e3, "verify_ms": (t2 - t1) / reps * 1e3, "reps": reps}


__all__ = ["CeReport", "FrameLog", "ce_run", "connection_time", "measure_crypto"]
