"""HTTP API, meal diary, mask wire codec, and service configuration."""

from .api import create_app, run_server
from .config import ENV_PREFIX, ServiceConfig, load_service_config
from .diary import (DiaryEntry, DiaryStore, EditError, apply_edits, daily_totals,
                    entry_from_json, entry_to_json, meal_from_json, meal_to_json,
                    utc_now_iso)
from .rle import decode_mask, encode_mask

__all__ = [
    "create_app", "run_server", "ENV_PREFIX", "ServiceConfig", "load_service_config",
    "DiaryEntry", "DiaryStore", "EditError", "apply_edits", "daily_totals",
    "entry_from_json", "entry_to_json", "meal_from_json", "meal_to_json",
    "utc_now_iso", "decode_mask", "encode_mask",
]
