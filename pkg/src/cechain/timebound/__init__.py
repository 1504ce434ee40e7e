"""Time-bound relay detection."""

from .detect import (
    DetectionMetrics,
    ForestDetector,
    ThresholdDetector,
    confusion,
    evaluate_detector,
    split,
    train_detector,
    youden_cut,
)
from .forest import DecisionTree, RandomForest
from .model import (
    BENIGN,
    RELAYED,
    SPEED_OF_LIGHT,
    GeometryError,
    Jitter,
    TimingParams,
    TimingSample,
    benign_durations,
    calibrate_t_in,
    check_inter_frame,
    from_csv,
    relayed_durations,
    sample_benign,
    sample_relayed,
    to_csv,
)
