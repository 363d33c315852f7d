from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ValidationError

ENV_PREFIX = "MYFOOD_"

_INT_FIELDS = {"port", "max_upload_bytes", "max_inflight"}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    model: str = "oracle"
    dataset_path: str | None = None
    nutrition_table: str | None = None  # None -> packaged default table
    calibration: str | None = None     # None -> packaged default factors
    diary_path: str = "diary.jsonl"
    max_upload_bytes: int = 8 * 1024 * 1024
    max_inflight: int = 2

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def validate_paths(self) -> None:
        """Fail fast at startup when a referenced file cannot exist."""
        for name in ("dataset_path", "nutrition_table", "calibration"):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ValidationError(f"{name}: {value} does not exist")
        parent = Path(self.diary_path).resolve().parent
        if not parent.is_dir():
            raise ValidationError(f"diary_path: directory {parent} does not exist")
        if self.max_upload_bytes <= 0:
            raise ValidationError("max_upload_bytes must be positive")
        if self.max_inflight < 1:
            raise ValidationError("max_inflight must be >= 1")


def load_service_config(path: str | Path | None = None, *,
                        env: Mapping[str, str] | None = None) -> ServiceConfig:
    """Build the config from an optional TOML file plus MYFOOD_* overrides.

    Precedence: defaults < file < environment. Unknown file keys and unknown
    MYFOOD_ variables are errors, not silent typo sinks.
    """
    known = {f.name for f in fields(ServiceConfig)}
    values: dict = {}

    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"config file not found: {path}")
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)

    if env is None:
        import os
        env = os.environ
    for key, raw in env.items():
        if not key.startswith(ENV_PREFIX):
            continue
        name = key[len(ENV_PREFIX):].lower()
        if name not in known:
            raise ValidationError(f"unknown environment override: {key}")
        values[name] = int(raw) if name in _INT_FIELDS else raw

    return ServiceConfig(**values)
