from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..dataset import (ClassTaxonomy, DatasetIndex, LabelMask, TaxonomyError,
                       load_image, load_mask)
from ..errors import MyfoodError, ValidationError
from .configs import ModelConfig

KINDS = ("plugin", "reference", "oracle", "constant")


class PredictorError(MyfoodError):
    """A predictor could not be loaded or could not serve a request."""


@dataclass(frozen=True)
class Instance:
    class_id: int
    mask: np.ndarray  # boolean (H, W)
    score: float

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise ValidationError(f"instance score {self.score} outside [0,1]")
        if self.class_id < 0:
            raise ValidationError(f"instance class id {self.class_id} is negative")


@dataclass(frozen=True)
class PredictionOutput:
    label_mask: LabelMask
    class_scores: np.ndarray | None = None  # (C, H, W) in [0,1]
    instances: tuple[Instance, ...] | None = None

    def __post_init__(self):
        if self.class_scores is not None:
            scores = self.class_scores
            if scores.shape[1:] != (self.label_mask.height, self.label_mask.width):
                raise ValidationError(
                    f"class_scores {scores.shape} do not cover the "
                    f"{self.label_mask.height}x{self.label_mask.width} mask")
            if scores.min() < 0.0 or scores.max() > 1.0:
                raise ValidationError("class scores must lie in [0,1]")
            # np.argmax picks the first maximum, i.e. the lowest class id on ties.
            if not np.array_equal(scores.argmax(axis=0).astype(np.uint8),
                                  self.label_mask.values):
                raise ValidationError("label_mask is not the argmax of class_scores")


@dataclass(frozen=True)
class PredictorHandle:
    name: str
    kind: str
    config: ModelConfig | None = None
    _fn: Callable[[np.ndarray], PredictionOutput] = field(repr=False, default=None)
    # Backend-specific facts (weights digest, per-epoch losses, ...).
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self._fn is None:
            raise ValidationError("handle must carry a predict function")

    @property
    def digest(self) -> str:
        return self.details.get("digest", self.name)


def _check_image(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3 or image.size == 0:
        raise ValidationError(f"expected a non-empty (H, W, 3) image, got {image.shape}")
    return image


def predict(handle: PredictorHandle, image: np.ndarray) -> PredictionOutput:
    """Run a predictor; output mask dimensions always equal the input's."""
    image = _check_image(image)
    output = handle._fn(image)
    if (output.label_mask.height, output.label_mask.width) != image.shape[:2]:
        raise PredictorError(
            f"{handle.name}: output {output.label_mask.values.shape} does not "
            f"match input {image.shape[:2]}")
    return output


def _image_digest(image: np.ndarray) -> str:
    arr = np.ascontiguousarray(image, dtype=np.uint8)
    h = hashlib.sha256()
    h.update(f"{arr.shape[0]}x{arr.shape[1]}".encode())
    h.update(arr.tobytes())
    return h.hexdigest()


def oracle_predictor(index: DatasetIndex, root: str | None = None) -> PredictorHandle:
    """A predictor that answers with the stored ground-truth mask.

    Images are recognized by a digest of their decoded pixels, so the same
    lookup works whether the caller passes an array loaded locally or one
    decoded from an upload. Querying pixels that match no indexed image is a
    lookup error.
    """
    root = root or index.root
    if root is None:
        raise ValidationError("oracle predictor needs the dataset root for masks")
    lookup: dict[str, LabelMask] = {}
    for record in index.records:
        img = load_image(root, record)
        lookup[_image_digest(img)] = load_mask(root, record.image_id)

    def run(image: np.ndarray) -> PredictionOutput:
        digest = _image_digest(image)
        if digest not in lookup:
            raise PredictorError("oracle: image does not match any indexed image")
        return PredictionOutput(label_mask=lookup[digest])

    table_digest = hashlib.sha256("".join(sorted(lookup)).encode()).hexdigest()
    return PredictorHandle(name="oracle", kind="oracle", _fn=run,
                           details={"digest": table_digest})


def constant_predictor(class_id: int, name: str | None = None) -> PredictorHandle:
    """A predictor that labels every pixel with one fixed class."""

    def run(image: np.ndarray) -> PredictionOutput:
        mask = np.full(image.shape[:2], class_id, dtype=np.uint8)
        return PredictionOutput(label_mask=LabelMask(mask))

    return PredictorHandle(name=name or f"constant:{class_id}", kind="constant", _fn=run)


_BACKENDS: dict[str, Callable[[], PredictorHandle]] = {}


def register_backend(name: str, loader: Callable[[], PredictorHandle]) -> None:
    if name in _BACKENDS:
        raise ValidationError(f"backend {name!r} is already registered")
    _BACKENDS[name] = loader


def registered_backends() -> list[str]:
    return sorted(_BACKENDS)


def resolve_predictor(spec: str, *, dataset: DatasetIndex | None = None,
                      taxonomy: ClassTaxonomy | None = None) -> PredictorHandle:
    """Turn a predictor name into a handle.

    Accepted forms: ``oracle``, ``constant:<class name or id>``,
    ``reference:<weights path>``, or a registered plugin backend name.
    """
    if spec == "oracle":
        if dataset is None:
            raise PredictorError("oracle predictor requires a dataset")
        return oracle_predictor(dataset)
    if spec.startswith("constant:"):
        label = spec.split(":", 1)[1]
        tax = taxonomy or (dataset.taxonomy if dataset else None)
        if label.isdigit():
            class_id = int(label)
        elif tax is not None:
            try:
                class_id = tax.id_of(label)
            except TaxonomyError:
                raise PredictorError(f"unknown class name {label!r}") from None
        else:
            raise PredictorError("constant predictor by name requires a taxonomy")
        return constant_predictor(class_id, name=spec)
    if spec.startswith("reference:"):
        from .reference import load_reference
        return load_reference(spec.split(":", 1)[1])
    if spec in _BACKENDS:
        try:
            return _BACKENDS[spec]()
        except Exception as exc:
            raise PredictorError(f"backend {spec!r} failed to load: {exc}") from exc
    raise PredictorError(
        f"unknown predictor {spec!r}; expected oracle, constant:<class>, "
        f"reference:<path>, or one of {registered_backends() or ['<none registered>']}")
