from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from fractions import Fraction
from pathlib import Path

from ..errors import MyfoodError, ValidationError
from ..nutrition import (NUTRIENT_FIELDS, MealEstimate, MealItem, NutrientProfile,
                         Nutrients)

EDITABLE_FIELDS = ("grams", "class_id")


class EditError(MyfoodError):
    """A diary edit references a missing item or an uneditable field."""


@dataclass(frozen=True)
class DiaryEntry:
    entry_id: str
    timestamp: str  # UTC ISO-8601
    image_ref: str
    meal: MealEstimate
    user_edits: tuple[tuple[int, str, str, str], ...] = ()


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def _nutrients_to_json(n: Nutrients) -> dict[str, str]:
    return {name: str(getattr(n, name)) for name in NUTRIENT_FIELDS}


def _nutrients_from_json(doc: dict) -> Nutrients:
    return Nutrients(**{name: Fraction(doc[name]) for name in NUTRIENT_FIELDS})


def meal_to_json(meal: MealEstimate) -> dict:
    return {
        "items": [
            {"class_id": it.class_id, "pixel_area": it.pixel_area,
             "grams": str(it.grams), "nutrients": _nutrients_to_json(it.nutrients)}
            for it in meal.items
        ],
        "totals": _nutrients_to_json(meal.totals),
    }


def meal_from_json(doc: dict) -> MealEstimate:
    items = tuple(
        MealItem(class_id=int(it["class_id"]), pixel_area=int(it["pixel_area"]),
                 grams=Fraction(it["grams"]),
                 nutrients=_nutrients_from_json(it["nutrients"]))
        for it in doc["items"])
    return MealEstimate(items=items, totals=_nutrients_from_json(doc["totals"]))


def entry_to_json(entry: DiaryEntry) -> dict:
    return {
        "entry_id": entry.entry_id,
        "timestamp": entry.timestamp,
        "image_ref": entry.image_ref,
        "meal": meal_to_json(entry.meal),
        "user_edits": [list(e) for e in entry.user_edits],
    }


def entry_from_json(doc: dict) -> DiaryEntry:
    return DiaryEntry(
        entry_id=doc["entry_id"], timestamp=doc["timestamp"],
        image_ref=doc.get("image_ref", ""),
        meal=meal_from_json(doc["meal"]),
        user_edits=tuple((int(i), str(f), str(o), str(n))
                         for i, f, o, n in doc.get("user_edits", [])))


def apply_edits(entry: DiaryEntry, edits: list[dict],
                table: dict[int, NutrientProfile]) -> DiaryEntry:
    """Apply user edits to a copy of the entry, recomputing item nutrients
    from the per-100g table and the meal totals from the items. The input
    entry is untouched, so a failed edit leaves the store state unchanged."""
    items = list(entry.meal.items)
    history = list(entry.user_edits)
    for edit in edits:
        try:
            index = int(edit["item"])
            fname = str(edit["field"])
            value = edit["value"]
        except (KeyError, TypeError, ValueError) as exc:
            raise EditError(f"malformed edit {edit!r}: {exc}") from None
        if not (0 <= index < len(items)):
            raise EditError(f"edit references missing item {index}")
        if fname not in EDITABLE_FIELDS:
            raise EditError(f"field {fname!r} is not editable (use {EDITABLE_FIELDS})")
        item = items[index]
        if fname == "grams":
            try:
                grams = Fraction(str(value))
            except (ValueError, ZeroDivisionError):
                raise EditError(f"bad grams value {value!r}") from None
            if grams < 0:
                raise EditError("grams must be >= 0")
            old = str(item.grams)
            new_item = MealItem(class_id=item.class_id, pixel_area=item.pixel_area,
                                grams=grams,
                                nutrients=table[item.class_id].per_100g.scaled(grams / 100))
            history.append((index, "grams", old, str(grams)))
        else:
            try:
                class_id = int(value)
            except (TypeError, ValueError):
                raise EditError(f"bad class id {value!r}") from None
            if class_id not in table:
                raise EditError(f"unknown class id {class_id}")
            old = str(item.class_id)
            new_item = MealItem(class_id=class_id, pixel_area=item.pixel_area,
                                grams=item.grams,
                                nutrients=table[class_id].per_100g.scaled(item.grams / 100))
            history.append((index, "class_id", old, str(class_id)))
        items[index] = new_item

    totals = Nutrients.zero()
    for item in items:
        totals = totals + item.nutrients
    meal = MealEstimate(items=tuple(items), totals=totals)
    return replace(entry, meal=meal, user_edits=tuple(history))


def _parse_instant(value: str, *, end: bool = False) -> datetime:
    if len(value) == 10:  # bare date
        day = datetime.fromisoformat(value).replace(tzinfo=timezone.utc)
        return day + timedelta(days=1) if end else day
    dt = datetime.fromisoformat(value)
    return dt if dt.tzinfo else dt.replace(tzinfo=timezone.utc)


class DiaryStore:
    """Append-only JSONL journal of diary entries.

    Every mutation is validated, serialized, and fsynced to the journal
    before the in-memory view changes, so a restart replays to exactly the
    state the last successful call left behind.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, DiaryEntry] = {}
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        with open(self.path) as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    entry = entry_from_json(record["entry"])
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise ValidationError(
                        f"{self.path}:{line_no}: corrupt journal record: {exc}") from None
                if record.get("op") == "patch" and entry.entry_id not in self._entries:
                    raise ValidationError(
                        f"{self.path}:{line_no}: patch for unknown entry "
                        f"{entry.entry_id!r}")
                self._entries[entry.entry_id] = entry

    def _journal(self, op: str, entry: DiaryEntry) -> None:
        line = json.dumps({"op": op, "entry": entry_to_json(entry)},
                          sort_keys=True) + "\n"
        with open(self.path, "a") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def add(self, entry: DiaryEntry) -> None:
        if entry.entry_id in self._entries:
            raise ValidationError(f"duplicate entry id {entry.entry_id!r}")
        self._journal("add", entry)
        self._entries[entry.entry_id] = entry

    def get(self, entry_id: str) -> DiaryEntry:
        return self._entries[entry_id]

    def put_patched(self, entry: DiaryEntry) -> None:
        if entry.entry_id not in self._entries:
            raise KeyError(entry.entry_id)
        self._journal("patch", entry)
        self._entries[entry.entry_id] = entry

    def entries(self, from_ts: str | None = None,
                to_ts: str | None = None) -> list[DiaryEntry]:
        """Entries in timestamp order; bare dates bound whole UTC days."""
        out = sorted(self._entries.values(), key=lambda e: (e.timestamp, e.entry_id))
        if from_ts:
            lo = _parse_instant(from_ts)
            out = [e for e in out if datetime.fromisoformat(e.timestamp) >= lo]
        if to_ts:
            hi = _parse_instant(to_ts, end=True)
            out = [e for e in out if datetime.fromisoformat(e.timestamp) < hi]
        return out

    def __len__(self) -> int:
        return len(self._entries)

    def compact(self) -> None:
        """Rewrite the journal as one add per live entry."""
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w") as fh:
            for entry in sorted(self._entries.values(), key=lambda e: e.timestamp):
                fh.write(json.dumps({"op": "add", "entry": entry_to_json(entry)},
                                    sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        tmp.replace(self.path)


def daily_totals(entries: list[DiaryEntry]) -> dict[str, Nutrients]:
    """Nutrient totals per UTC calendar day."""
    out: dict[str, Nutrients] = {}
    for entry in entries:
        day = entry.timestamp[:10]
        out[day] = out.get(day, Nutrients.zero()) + entry.meal.totals
    return out
