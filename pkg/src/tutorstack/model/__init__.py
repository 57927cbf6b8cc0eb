from tutorstack.model.checkpoint import (
    LatentTables,
    LoadedCheckpoint,
    load_checkpoint,
    save_checkpoint,
)
from tutorstack.model.config import ModelConfig, tiny_config
from tutorstack.model.encoding import (
    EncodedSequence,
    LatentAnnotator,
    StepFeatures,
    Vocab,
    encode_history,
    encode_steps,
    mastery_bucket,
)
from tutorstack.model.estimator import MlfbkKnowledgeTracer
from tutorstack.model.gradcheck import grad_check
from tutorstack.model.network import MlfbkNet, NumericsError
from tutorstack.model.predict import KnowledgeTracer, PredictNext, predict_next
from tutorstack.model.train import TrainHyper, TrainReport, TrainResult, train_model

__all__ = [
    "EncodedSequence",
    "KnowledgeTracer",
    "LatentAnnotator",
    "LatentTables",
    "LoadedCheckpoint",
    "MlfbkKnowledgeTracer",
    "MlfbkNet",
    "ModelConfig",
    "NumericsError",
    "PredictNext",
    "StepFeatures",
    "TrainHyper",
    "TrainReport",
    "TrainResult",
    "Vocab",
    "encode_history",
    "encode_steps",
    "grad_check",
    "load_checkpoint",
    "mastery_bucket",
    "predict_next",
    "save_checkpoint",
    "tiny_config",
    "train_model",
]
