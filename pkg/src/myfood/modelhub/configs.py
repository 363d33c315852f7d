from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ValidationError

OPTIMIZERS = ("sgd-momentum", "adam")

# Fixed presentation order for the shipped configs.
CANONICAL_ORDER = ("FCN", "SegNet", "ENet", "DeepLabV3+", "MaskRCNN")


@dataclass(frozen=True)
class ModelConfig:
    name: str
    optimizer: str
    learning_rate: float
    decay: float | None
    batch_size: int
    backbone: str | None
    momentum: float = 0.9
    input_side: int = 224
    epochs: int = 100

    def __post_init__(self):
        if not self.name:
            raise ValidationError("config name must be non-empty")
        if self.optimizer not in OPTIMIZERS:
            raise ValidationError(
                f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.decay is not None and self.decay < 0:
            raise ValidationError(f"decay must be non-negative, got {self.decay}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if not (0.0 <= self.momentum < 1.0):
            raise ValidationError(f"momentum must be in [0,1), got {self.momentum}")
        if self.input_side <= 0:
            raise ValidationError(f"input_side must be positive, got {self.input_side}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")


_TOML_KEYS = frozenset({"name", "optimizer", "learning_rate", "decay",
                        "batch_size", "backbone", "momentum", "input_side",
                        "epochs"})


def _config_from_toml(data: dict) -> ModelConfig:
    unknown = sorted(set(data) - _TOML_KEYS)
    if unknown:
        raise ValidationError(f"unknown model config keys: {unknown}")
    missing = sorted({"name", "optimizer", "learning_rate", "batch_size"} - set(data))
    if missing:
        raise ValidationError(f"model config is missing required keys: {missing}")
    return ModelConfig(
        name=data["name"],
        optimizer=data["optimizer"],
        learning_rate=float(data["learning_rate"]),
        decay=float(data["decay"]) if "decay" in data else None,
        batch_size=int(data["batch_size"]),
        backbone=data.get("backbone"),
        momentum=float(data.get("momentum", 0.9)),
        input_side=int(data.get("input_side", 224)),
        epochs=int(data.get("epochs", 100)),
    )


def load_config(path: str | Path) -> ModelConfig:
    with open(path, "rb") as fh:
        return _config_from_toml(tomllib.load(fh))


def canonical_configs() -> list[ModelConfig]:
    """The five shipped full-scale training configurations, in fixed order."""
    root = resources.files("myfood").joinpath("data/model_configs")
    configs: dict[str, ModelConfig] = {}
    for entry in root.iterdir():
        if entry.name.endswith(".toml"):
            cfg = _config_from_toml(tomllib.loads(entry.read_text()))
            configs[cfg.name] = cfg
    missing = [n for n in CANONICAL_ORDER if n not in configs]
    if missing:
        raise ValidationError(f"canonical config files missing for: {missing}")
    return [configs[n] for n in CANONICAL_ORDER]


def reference_config(*, input_side: int = 64, epochs: int = 10,
                     name: str = "reference") -> ModelConfig:
    """Desk-scale settings for the shipped encoder-decoder model."""
    return ModelConfig(name=name, optimizer="adam", learning_rate=5e-3,
                       decay=None, batch_size=1, backbone=None, momentum=0.9,
                       input_side=input_side, epochs=epochs)
