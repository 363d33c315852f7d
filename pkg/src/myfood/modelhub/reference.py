from __future__ import annotations

import hashlib
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
from PIL import Image

from ..dataset import DatasetIndex, LabelMask, load_image, load_mask, resize_pair
from ..errors import MyfoodError, ValidationError
from .configs import ModelConfig
from .predictors import PredictionOutput, PredictorHandle

DEFAULT_WIDTH = 16


class TrainingError(MyfoodError):
    """Training failed (e.g. diverged to a non-finite loss)."""


class SmallSegNet(nn.Module):
    """Encoder-decoder segmentation net small enough to train on CPU in seconds.

    Two 2x downsampling stages, a middle block, two upsampling stages, and a
    full-resolution skip concatenation feeding the classifier head.
    """

    def __init__(self, n_classes: int, width: int = DEFAULT_WIDTH):
        super().__init__()
        w = width
        self.enc1 = nn.Sequential(nn.Conv2d(3, w, 3, padding=1), nn.GroupNorm(4, w), nn.ReLU())
        self.enc2 = nn.Sequential(nn.Conv2d(w, 2 * w, 3, padding=1), nn.GroupNorm(4, 2 * w), nn.ReLU())
        self.mid = nn.Sequential(nn.Conv2d(2 * w, 2 * w, 3, padding=1), nn.GroupNorm(4, 2 * w), nn.ReLU())
        self.dec1 = nn.Sequential(nn.Conv2d(2 * w, w, 3, padding=1), nn.GroupNorm(4, w), nn.ReLU())
        self.head = nn.Conv2d(2 * w, n_classes, 3, padding=1)
        self.pool = nn.MaxPool2d(2)
        self.up = nn.Upsample(scale_factor=2, mode="nearest")
        self.n_classes = n_classes
        self.width = width

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        e1 = self.enc1(x)
        e2 = self.enc2(self.pool(e1))
        m = self.mid(self.pool(e2))
        d1 = self.dec1(self.up(m))
        return self.head(torch.cat([self.up(d1), e1], 1))


def weights_digest(model: nn.Module) -> str:
    """Content hash of the model weights, stable across processes."""
    h = hashlib.sha256()
    state = model.state_dict()
    for key in sorted(state):
        tensor = state[key].detach().cpu().contiguous()
        h.update(key.encode())
        h.update(str(tensor.dtype).encode())
        h.update(str(tuple(tensor.shape)).encode())
        h.update(tensor.numpy().tobytes())
    return h.hexdigest()


def _make_optimizer(config: ModelConfig, model: nn.Module) -> torch.optim.Optimizer:
    decay = config.decay or 0.0
    if config.optimizer == "adam":
        return torch.optim.Adam(model.parameters(), lr=config.learning_rate,
                                weight_decay=decay)
    return torch.optim.SGD(model.parameters(), lr=config.learning_rate,
                           momentum=config.momentum, weight_decay=decay)


def _load_training_tensors(index: DatasetIndex, records, side: int):
    images, masks = [], []
    for record in records:
        img = load_image(index.root, record)
        mask = load_mask(index.root, record.image_id)
        img, mask = resize_pair(img, mask, side)
        images.append(img)
        masks.append(mask.values)
    x = torch.tensor(np.stack(images), dtype=torch.float32).permute(0, 3, 1, 2) / 255.0
    y = torch.tensor(np.stack(masks), dtype=torch.long)
    return x, y


def train_reference(config: ModelConfig, index: DatasetIndex, seed: int, *,
                    split: str = "train", width: int = DEFAULT_WIDTH) -> PredictorHandle:
    """Train the reference net on one split; deterministic for a fixed seed.

    Single-threaded CPU training with a seed-derived shuffle per epoch, so
    two runs with identical inputs produce bit-identical weights.
    """
    records = index.split_records(split) if split else list(index.records)
    if not records:
        raise ValidationError(f"split {split!r} has no records to train on")
    if index.root is None:
        raise ValidationError("dataset index has no root directory for image files")

    torch.manual_seed(seed)
    torch.set_num_threads(1)
    n_classes = len(index.taxonomy)
    model = SmallSegNet(n_classes=n_classes, width=width)
    optimizer = _make_optimizer(config, model)
    loss_fn = nn.CrossEntropyLoss()

    x, y = _load_training_tensors(index, records, config.input_side)
    n = x.shape[0]
    loss_history: list[float] = []
    for epoch in range(config.epochs):
        perm = torch.randperm(n, generator=torch.Generator().manual_seed(seed + epoch))
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(x[idx]), y[idx])
            loss.backward()
            optimizer.step()
            total += loss.item() * len(idx)
        epoch_loss = total / n
        if not math.isfinite(epoch_loss):
            raise TrainingError(f"non-finite training loss at epoch {epoch}")
        loss_history.append(epoch_loss)

    model.eval()
    return _handle_for(model, config, extra={"loss_history": loss_history,
                                             "seed": seed, "split": split})


def _nearest_indices(out_size: int, in_size: int) -> np.ndarray:
    centers = (np.arange(out_size) + 0.5) * (in_size / out_size)
    return np.minimum(centers.astype(np.int64), in_size - 1)


def _reference_predict(model: SmallSegNet, config: ModelConfig,
                       image: np.ndarray) -> PredictionOutput:
    height, width = image.shape[:2]
    side = config.input_side
    if (height, width) != (side, side):
        resized = np.asarray(Image.fromarray(image).resize((side, side), Image.BILINEAR))
    else:
        resized = image

    with torch.no_grad():
        x = torch.tensor(resized, dtype=torch.float32).permute(2, 0, 1).unsqueeze(0) / 255.0
        logits = model(x)[0]
        scores = torch.softmax(logits, dim=0).numpy()
    labels = scores.argmax(axis=0).astype(np.uint8)

    if (height, width) != (side, side):
        # One shared nearest-neighbor index map keeps labels the argmax of
        # the upsampled scores at every native pixel.
        rows = _nearest_indices(height, side)
        cols = _nearest_indices(width, side)
        labels = labels[rows][:, cols]
        scores = scores[:, rows][:, :, cols]
    return PredictionOutput(label_mask=LabelMask(labels),
                            class_scores=np.clip(scores, 0.0, 1.0))


def _handle_for(model: SmallSegNet, config: ModelConfig,
                extra: dict | None = None) -> PredictorHandle:
    details = {"digest": weights_digest(model), "model": model,
               "width": model.width, "n_classes": model.n_classes}
    details.update(extra or {})

    def run(image: np.ndarray) -> PredictionOutput:
        return _reference_predict(model, config, image)

    return PredictorHandle(name=config.name, kind="reference", config=config,
                           _fn=run, details=details)


def save_reference(handle: PredictorHandle, path: str | Path) -> None:
    model = handle.details.get("model")
    if model is None or handle.kind != "reference":
        raise ValidationError("only reference-model handles can be saved")
    torch.save({
        "state_dict": model.state_dict(),
        "config": asdict(handle.config),
        "n_classes": model.n_classes,
        "width": model.width,
        "digest": handle.digest,
    }, path)


def load_reference(path: str | Path) -> PredictorHandle:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"reference weights not found: {path}")
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = ModelConfig(**payload["config"])
    model = SmallSegNet(n_classes=payload["n_classes"], width=payload["width"])
    model.load_state_dict(payload["state_dict"])
    model.eval()
    handle = _handle_for(model, config)
    if payload.get("digest") and handle.digest != payload["digest"]:
        raise ValidationError(f"weights digest mismatch loading {path}")
    return handle
