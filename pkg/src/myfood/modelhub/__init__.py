"""Model configurations, the predictor interface, and the reference model."""

from .configs import (CANONICAL_ORDER, ModelConfig, canonical_configs, load_config,
                      reference_config)
from .predictors import (Instance, PredictionOutput, PredictorError, PredictorHandle,
                         constant_predictor, oracle_predictor, predict,
                         register_backend, registered_backends, resolve_predictor)
from .reference import (SmallSegNet, TrainingError, load_reference, save_reference,
                        train_reference, weights_digest)

__all__ = [
    "CANONICAL_ORDER", "ModelConfig", "canonical_configs", "load_config",
    "reference_config", "Instance", "PredictionOutput", "PredictorError",
    "PredictorHandle", "constant_predictor", "oracle_predictor", "predict",
    "register_backend", "registered_backends", "resolve_predictor", "SmallSegNet",
    "TrainingError", "load_reference", "save_reference", "train_reference",
    "weights_digest",
]
