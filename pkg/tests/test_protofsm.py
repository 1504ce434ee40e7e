import json

import pytest
from hypothesis import given, strategies as st

from cechain.protofsm import (
    ALL_ACTIONS,
    ALL_DEFENSES,
    AdversaryAction,
    Defense,
    Observation,
    StaState,
    ap_step,
    check_action_sets,
    enabled,
    enforce_limit,
    model_check,
    replay,
    sta_step,
)
from cechain.sigchain import ChainContext

A1, A2, A3 = StaState.DISCONNECTED, StaState.CE, StaState.CONNECTED


def test_tau1_starts_ce():
    assert sta_step(A1, Observation(c_as1=True)) is A2


def test_tau4_connects():
    obs = Observation(c_saN=True, limit_ok=True, ch_ok=True, seq_ok=True, slice_ok=True)
    assert sta_step(A2, obs) is A3


def test_bad_frame_with_budget_stays_in_ce():
    assert sta_step(A2, Observation(seq_ok=False)) is A2


def test_bad_frame_without_budget_disconnects():
    assert sta_step(A2, Observation(seq_ok=False, limit_ok=False)) is A1


def test_good_intermediate_frame_is_a_no_op():
    assert sta_step(A2, Observation()) is A2


@pytest.mark.parametrize("state", list(StaState))
def test_transitions_are_deterministic_for_every_observation(state):
    for v in range(256):
        assert len(enabled(state, Observation.from_bits(v))) <= 1


@given(st.integers(0, 255))
def test_connected_is_absorbing(v):
    assert sta_step(A3, Observation.from_bits(v)) is A3


def test_ap_mirrors_station():
    assert ap_step(A1, "send_first") is A2
    assert ap_step(A2, "recv_final_ok") is A3
    assert ap_step(A2, "limit_exhausted") is A1
    for event in ("send_first", "recv_final_ok", "limit_exhausted"):
        assert ap_step(A3, event) is A3


def test_enforce_limit_counts_down_then_refuses():
    ctx = ChainContext(6, 1)
    seen = []
    for _ in range(4):
        ctx, ok = enforce_limit(ctx)
        seen.append((ctx.attempts_left, ok))
    assert seen == [(2, True), (1, True), (0, True), (0, False)]
    assert ChainContext(6, 1).limit_ok


def test_benign_run_connects_within_n_plus_4_steps():
    for n in (13, 14, 15):
        v = model_check(max_depth=n + 4, actions=(), n_frames=n)
        assert v.safe and v.connected_reachable
    assert not model_check(max_depth=13, actions=(), n_frames=13).connected_reachable


def test_full_defenses_safe_against_all_actions():
    v = model_check(max_depth=40)
    assert v.safe and v.counterexample is None
    assert v.connected_reachable


def test_full_defenses_safe_for_singles_and_pairs():
    results = check_action_sets(max_depth=40)
    assert len(results) == 6 + 15
    assert all(v.safe for v in results.values())


def _violates_under(moves, defenses):
    # a rejected frame can make later moves of the trace unavailable
    try:
        return replay(moves, defenses=defenses).violation
    except ValueError:
        return False


@pytest.mark.parametrize("defense,expected", [
    (Defense.signature, {"SpoofPreambleBits", "ReplaySliceChain"}),
    (Defense.time_bound, {"SpoofElementKeepPreamble/race"}),
    (Defense.seq_check, {"SpoofElementKeepPreamble/new_seq"}),
    (Defense.channel_check, {"DualChannelCsaMitm"}),
])
def test_each_defense_is_necessary(defense, expected):
    defenses = ALL_DEFENSES - {defense}
    v = model_check(defenses=defenses)
    assert not v.safe
    assert expected & set(v.action_names)
    final = replay(v.action_names, defenses=defenses)
    assert final.violation
    assert not _violates_under(v.action_names, ALL_DEFENSES)


def test_time_bound_off_spoof_element_counterexample():
    v = model_check(defenses=ALL_DEFENSES - {Defense.time_bound},
                    actions=[AdversaryAction.SpoofElementKeepPreamble])
    assert not v.safe
    assert v.action_names[-2:] == ["SpoofElementKeepPreamble/race", "send_final"]
    last = v.counterexample[-1]
    assert last.state["sta"] == "alpha3" and last.state["tainted"]


def test_counterexample_is_minimal():
    v = model_check(defenses=ALL_DEFENSES - {Defense.signature},
                    actions=[AdversaryAction.SpoofPreambleBits])
    # N frames plus the final frame is the shortest way to connect at all
    assert len(v.counterexample) == 14


def test_trace_json_shape():
    v = model_check(defenses=ALL_DEFENSES - {Defense.channel_check},
                    actions=[AdversaryAction.DualChannelCsaMitm])
    steps = json.loads(v.trace_json())
    assert all(set(s) == {"state", "actor", "action", "obs"} for s in steps)
    assert any(s["actor"] == "adversary" for s in steps)
    assert steps[-1]["obs"]["c_saN"] is True


def test_safe_iff_no_counterexample():
    for d in list(Defense):
        v = model_check(defenses=ALL_DEFENSES - {d}, actions=ALL_ACTIONS)
        assert v.safe == (v.counterexample is None)


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        model_check(max_depth=0)


def test_replay_rejects_disabled_move():
    with pytest.raises(ValueError):
        replay(["frame_2"])
