"""CE state machines and a bounded model checker."""

from .checker import (
    ALL_ACTIONS,
    ALL_DEFENSES,
    AdversaryAction,
    Defense,
    ModelConfig,
    Step,
    Verdict,
    World,
    check_action_sets,
    model_check,
    replay,
    successors,
)
from .fsm import (
    AP_EVENTS,
    Observation,
    StaState,
    ap_step,
    enabled,
    enforce_limit,
    sta_step,
    tau1,
    tau2,
    tau3,
    tau4,
)
