"""Station and AP state machines for connection establishment.

Station transitions (alpha1 disconnected, alpha2 CE, alpha3 connected)::

    tau1  a1 -> a2   C_as1
    tau2  a2 -> a2   (~C_asN & L & bad) | (~C_saN & t_in & L & bad)
    tau3  a2 -> a1   (~C_saN & ~t_in & ~L & bad) | (~C_asN & ~L & bad)
    tau4  a2 -> a3   C_saN & L & ch & seq & slice

with ``bad = ~ch | ~seq | ~slice``. Anything else leaves the state alone and
alpha3 has no outgoing transition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields, replace

from ..sigchain import ChainContext


class StaState(str, enum.Enum):
    DISCONNECTED = "alpha1"
    CE = "alpha2"
    CONNECTED = "alpha3"


@dataclass(frozen=True)
class Observation:
    c_asN: bool = False
    c_as1: bool = False
    c_saN: bool = False
    within_t_in: bool = True
    limit_ok: bool = True
    ch_ok: bool = True
    seq_ok: bool = True
    slice_ok: bool = True

    @property
    def bad(self) -> bool:
        return not (self.ch_ok and self.seq_ok and self.slice_ok)

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_bits(cls, value: int) -> "Observation":
        names = [f.name for f in fields(cls)]
        return cls(**{n: bool(value >> i & 1) for i, n in enumerate(names)})


def tau1(o: Observation) -> bool:
    return o.c_as1


def tau2(o: Observation) -> bool:
    return (not o.c_asN and o.limit_ok and o.bad) or (not o.c_saN and o.within_t_in and o.limit_ok and o.bad)


def tau3(o: Observation) -> bool:
    return ((not o.c_saN and not o.within_t_in and not o.limit_ok and o.bad)
            or (not o.c_asN and not o.limit_ok and o.bad))


def tau4(o: Observation) -> bool:
    return o.c_saN and o.limit_ok and o.ch_ok and o.seq_ok and o.slice_ok


STA_TRANSITIONS = {
    StaState.DISCONNECTED: ((tau1, StaState.CE),),
    StaState.CE: ((tau2, StaState.CE), (tau3, StaState.DISCONNECTED), (tau4, StaState.CONNECTED)),
    StaState.CONNECTED: (),
}


def enabled(state: StaState, obs: Observation) -> list[StaState]:
    return [target for cond, target in STA_TRANSITIONS[state] if cond(obs)]


def sta_step(state: StaState, obs: Observation) -> StaState:
    targets = enabled(state, obs)
    return targets[0] if targets else state


# The AP machine mirrors the station: it enters CE when it sends the first CE
# frame, connects on a verified final frame from the station, and drops the
# attempt when its own retry limit runs out.
AP_EVENTS = ("send_first", "recv_final_ok", "limit_exhausted")


def ap_step(state: StaState, event: str) -> StaState:
    if state is StaState.DISCONNECTED and event == "send_first":
        return StaState.CE
    if state is StaState.CE and event == "recv_final_ok":
        return StaState.CONNECTED
    if state is StaState.CE and event == "limit_exhausted":
        return StaState.DISCONNECTED
    return state


def enforce_limit(ctx: ChainContext) -> tuple[ChainContext, bool]:
    """Spend one retransmission; returns ``(ctx, False)`` once the budget is gone."""
    if ctx.attempts_left <= 0:
        return ctx, False
    return replace(ctx, attempts_left=ctx.attempts_left - 1), True
