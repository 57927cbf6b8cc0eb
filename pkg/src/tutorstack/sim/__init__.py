from tutorstack.sim.metrics import UndefinedMetricError, accuracy, auc, log_loss
from tutorstack.sim.simulate import (
    ParamRanges,
    SimConfig,
    SimResult,
    load_ground_truth,
    simulate,
    write_simulation,
)

__all__ = [
    "ParamRanges",
    "SimConfig",
    "SimResult",
    "UndefinedMetricError",
    "accuracy",
    "auc",
    "load_ground_truth",
    "log_loss",
    "simulate",
    "write_simulation",
]
