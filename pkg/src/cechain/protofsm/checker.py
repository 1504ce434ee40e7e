"""Bounded explicit-state model checking of CE under an active adversary.

The world composes the station FSM, the AP FSM and an environment that
delivers the AP's N frames, either directly or through the adversary. Every
frame the station accepts carries provenance flags, so the safety property
"the station only ever connects to the legitimate AP over an authentic,
unmodified chain" can be checked on each reached state.

Abstractions worth knowing:

* A disabled defense makes its observation atom constantly true.
* Relaying without modification is assumed fast enough to stay within
  ``t_in`` (the worst case for the symbolic model; statistical relay detection
  lives in :mod:`cechain.timebound`). Any frame whose content the adversary
  alters pays ``t_alter > 0`` and misses ``t_in``.
* The EAPOL3 mask binds the AP's operating channel; the chain of slices,
  including the XOR channel-switch tracking, is checked by the signature.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field, replace
from itertools import combinations

from .fsm import Observation, StaState, ap_step, sta_step

DEFAULT_DEPTH = 40
DEFAULT_LIMIT = 3
CHANNEL_HOME, CHANNEL_STA_FAKE, CHANNEL_AP_FORCED, CHANNEL_VALID = "x", "y", "z", "w"


class AdversaryAction(str, enum.Enum):
    FakeCsaToSta = "FakeCsaToSta"
    JamAndForceApSwitch = "JamAndForceApSwitch"
    DualChannelCsaMitm = "DualChannelCsaMitm"
    SpoofElementKeepPreamble = "SpoofElementKeepPreamble"
    SpoofPreambleBits = "SpoofPreambleBits"
    ReplaySliceChain = "ReplaySliceChain"


class Defense(str, enum.Enum):
    signature = "signature"
    time_bound = "time_bound"
    seq_check = "seq_check"
    channel_check = "channel_check"


ALL_ACTIONS = frozenset(AdversaryAction)
ALL_DEFENSES = frozenset(Defense)


@dataclass(frozen=True)
class Frame:
    """What the station receives at position k, with ground-truth provenance."""

    genuine_slice: bool = True
    tainted: bool = False
    timely: bool = True
    seq_good: bool = True


HONEST = Frame()


@dataclass(frozen=True)
class World:
    sta: StaState = StaState.DISCONNECTED
    ap: StaState = StaState.DISCONNECTED
    k: int = 1  # next AP frame; > n_frames once EAPOL3 is accepted
    attempts: int = DEFAULT_LIMIT
    sta_ch: str = CHANNEL_HOME
    ap_ch: str = CHANNEL_HOME
    sta_switch: int | None = None  # position after which the station believes a switch happened
    ap_switch: int | None = None
    genuine: bool = True
    tainted: bool = False
    ended: bool = False

    @property
    def compromised(self) -> bool:
        return (self.tainted or not self.genuine or self.sta_ch != self.ap_ch
                or self.sta_switch != self.ap_switch)

    @property
    def violation(self) -> bool:
        return self.sta is StaState.CONNECTED and self.compromised

    def summary(self) -> dict:
        return {"sta": self.sta.value, "ap": self.ap.value, "k": self.k, "attempts": self.attempts,
                "sta_ch": self.sta_ch, "ap_ch": self.ap_ch, "sta_switch": self.sta_switch,
                "ap_switch": self.ap_switch, "genuine": self.genuine, "tainted": self.tainted}


@dataclass(frozen=True)
class ModelConfig:
    n_frames: int = 13
    defenses: frozenset = ALL_DEFENSES
    actions: frozenset = frozenset()
    limit: int = DEFAULT_LIMIT
    allow_valid_switch: bool = True

    def on(self, d: Defense) -> bool:
        return d in self.defenses


@dataclass(frozen=True)
class Step:
    state: dict
    actor: str
    action: str
    obs: dict | None

    def to_json(self) -> dict:
        return {"state": self.state, "actor": self.actor, "action": self.action, "obs": self.obs}


@dataclass
class Verdict:
    safe: bool
    counterexample: list[Step] | None = None
    states_explored: int = 0
    connected_reachable: bool = False
    config: ModelConfig | None = field(default=None, repr=False)

    def trace_json(self) -> str:
        return json.dumps([s.to_json() for s in self.counterexample or []], indent=2)

    @property
    def action_names(self) -> list[str]:
        return [s.action for s in self.counterexample or []]


# -- transition relation -----------------------------------------------------

def _receive(w: World, frame: Frame, cfg: ModelConfig) -> tuple[Observation, World]:
    timely = frame.timely or not cfg.on(Defense.time_bound)
    seq_ok = frame.seq_good or not cfg.on(Defense.seq_check)
    obs = Observation(
        c_asN=w.k == cfg.n_frames,
        c_as1=w.k == 1,
        within_t_in=timely,
        limit_ok=w.attempts > 0,
        seq_ok=seq_ok,
        # a slice arriving outside t_in is never appended to the chain
        slice_ok=timely,
    )
    sta = sta_step(w.sta, obs)
    ap = ap_step(w.ap, "send_first") if w.k == 1 else w.ap
    if sta is StaState.DISCONNECTED and w.sta is not StaState.DISCONNECTED:
        return obs, replace(w, sta=sta, ap=ap_step(ap, "limit_exhausted"), ended=True)
    if sta is StaState.CE and timely and seq_ok:
        return obs, replace(w, sta=sta, ap=ap, k=w.k + 1, attempts=cfg.limit,
                            genuine=w.genuine and frame.genuine_slice,
                            tainted=w.tainted or frame.tainted)
    return obs, replace(w, sta=sta, ap=ap, attempts=max(0, w.attempts - 1))


def _finalise(w: World, cfg: ModelConfig) -> tuple[Observation, World]:
    chain_ok = w.genuine and w.sta_switch == w.ap_switch
    obs = Observation(
        c_saN=True,
        limit_ok=w.attempts > 0,
        ch_ok=w.sta_ch == w.ap_ch or not cfg.on(Defense.channel_check),
        slice_ok=chain_ok or not cfg.on(Defense.signature),
    )
    sta = sta_step(w.sta, obs)
    if sta is StaState.CONNECTED:
        return obs, replace(w, sta=sta, ap=ap_step(w.ap, "recv_final_ok"))
    if sta is StaState.DISCONNECTED:
        return obs, replace(w, sta=sta, ap=ap_step(w.ap, "limit_exhausted"), ended=True)
    return obs, replace(w, attempts=max(0, w.attempts - 1))


def successors(w: World, cfg: ModelConfig):
    """Yield ``(actor, action, obs, next_world)`` for every enabled move."""
    if w.ended or w.sta is StaState.CONNECTED:
        return
    n = cfg.n_frames
    if w.k > n:
        obs, nxt = _finalise(w, cfg)
        yield "sta", "send_final", obs, nxt
        return

    obs, nxt = _receive(w, HONEST, cfg)
    yield "ap", f"frame_{w.k}", obs, nxt

    between = w.sta is StaState.CE and 2 <= w.k <= n
    if cfg.allow_valid_switch and between and w.sta_switch is None and w.ap_switch is None:
        yield "env", "valid_switch", None, replace(
            w, sta_ch=CHANNEL_VALID, ap_ch=CHANNEL_VALID, sta_switch=w.k - 1, ap_switch=w.k - 1)

    acts = cfg.actions
    if between and AdversaryAction.FakeCsaToSta in acts and w.sta_switch is None:
        yield "adversary", AdversaryAction.FakeCsaToSta.value, None, replace(
            w, sta_ch=CHANNEL_STA_FAKE, sta_switch=w.k - 1)
    if between and AdversaryAction.JamAndForceApSwitch in acts and w.ap_switch is None:
        yield "adversary", AdversaryAction.JamAndForceApSwitch.value, None, replace(
            w, ap_ch=CHANNEL_AP_FORCED, ap_switch=w.k - 1)
    if (between and AdversaryAction.DualChannelCsaMitm in acts
            and w.sta_switch is None and w.ap_switch is None):
        yield "adversary", AdversaryAction.DualChannelCsaMitm.value, None, replace(
            w, sta_ch=CHANNEL_STA_FAKE, ap_ch=CHANNEL_AP_FORCED, sta_switch=w.k - 1, ap_switch=w.k - 1)

    if AdversaryAction.SpoofElementKeepPreamble in acts:
        # block the frame and race the retransmission: content altered, so late
        obs, nxt = _receive(w, Frame(tainted=True, timely=False), cfg)
        yield "adversary", "SpoofElementKeepPreamble/race", obs, nxt
        # or insert its own copy under a fresh sequence number: on time, wrong seq
        obs, nxt = _receive(w, Frame(tainted=True, seq_good=False), cfg)
        yield "adversary", "SpoofElementKeepPreamble/new_seq", obs, nxt
    if AdversaryAction.SpoofPreambleBits in acts:
        obs, nxt = _receive(w, Frame(genuine_slice=False, tainted=True), cfg)
        yield "adversary", AdversaryAction.SpoofPreambleBits.value, obs, nxt
    if AdversaryAction.ReplaySliceChain in acts:
        # an old session's slice; headers rewritten to look current
        obs, nxt = _receive(w, Frame(genuine_slice=False), cfg)
        yield "adversary", AdversaryAction.ReplaySliceChain.value, obs, nxt


# -- search ----------------------------------------------------------------------

def model_check(max_depth: int = DEFAULT_DEPTH, defenses=ALL_DEFENSES, actions=ALL_ACTIONS,
                n_frames: int = 13, allow_valid_switch: bool = True) -> Verdict:
    """Breadth-first search for a shortest trace that violates safety."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    cfg = ModelConfig(n_frames, frozenset(Defense(d) for d in defenses),
                      frozenset(AdversaryAction(a) for a in actions),
                      allow_valid_switch=allow_valid_switch)
    start = World(attempts=cfg.limit)
    parent: dict[World, tuple[World, str, str, Observation | None] | None] = {start: None}
    frontier = deque([(start, 0)])
    connected = False
    while frontier:
        w, depth = frontier.popleft()
        if depth >= max_depth:
            continue
        for actor, action, obs, nxt in successors(w, cfg):
            if nxt in parent:
                continue
            parent[nxt] = (w, actor, action, obs)
            if nxt.sta is StaState.CONNECTED:
                connected = True
            if nxt.violation:
                return Verdict(False, _trace(parent, nxt), len(parent), connected, cfg)
            frontier.append((nxt, depth + 1))
    return Verdict(True, None, len(parent), connected, cfg)


def _trace(parent, end: World) -> list[Step]:
    steps = []
    w = end
    while parent[w] is not None:
        prev, actor, action, obs = parent[w]
        steps.append(Step(w.summary(), actor, action, obs.to_json() if obs else None))
        w = prev
    return steps[::-1]


def replay(action_names: list[str], defenses=ALL_DEFENSES, actions=ALL_ACTIONS,
           n_frames: int = 13) -> World:
    """Re-run a trace by move names; raises if a move is not enabled."""
    cfg = ModelConfig(n_frames, frozenset(Defense(d) for d in defenses),
                      frozenset(AdversaryAction(a) for a in actions))
    w = World(attempts=cfg.limit)
    for name in action_names:
        moves = {action: nxt for _, action, _, nxt in successors(w, cfg)}
        if name not in moves:
            raise ValueError(f"move {name!r} not enabled in {w.summary()}")
        w = moves[name]
    return w


def check_action_sets(max_depth: int = DEFAULT_DEPTH, defenses=ALL_DEFENSES,
                      n_frames: int = 13) -> dict[tuple[str, ...], Verdict]:
    """Every single adversary action and every pair of them."""
    out = {}
    names = sorted(a.value for a in AdversaryAction)
    for size in (1, 2):
        for combo in combinations(names, size):
            out[combo] = model_check(max_depth, defenses, combo, n_frames)
    return out
