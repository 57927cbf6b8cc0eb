from tutorstack.features.ability import (
    AbilityProfiler,
    ability_features,
    assign_cluster,
    kmeans_fit,
)
from tutorstack.features.bkt import (
    DEFAULT_BKT_PARAMS,
    BktParams,
    bkt_update,
    correctness_sequences,
    fit_bkt_params,
    mastery_sequence,
    predict_correct,
)
from tutorstack.features.difficulty import DifficultyTracker, difficulty_level
from tutorstack.features.store import FeatureStore, OutOfOrderError, SkillMastery

__all__ = [
    "AbilityProfiler",
    "BktParams",
    "DEFAULT_BKT_PARAMS",
    "DifficultyTracker",
    "FeatureStore",
    "OutOfOrderError",
    "SkillMastery",
    "ability_features",
    "assign_cluster",
    "bkt_update",
    "correctness_sequences",
    "difficulty_level",
    "fit_bkt_params",
    "kmeans_fit",
    "mastery_sequence",
    "predict_correct",
]
