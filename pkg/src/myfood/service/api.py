from __future__ import annotations

import io
import time
import uuid
from contextlib import asynccontextmanager

import anyio
import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from PIL import Image, UnidentifiedImageError

from ..dataset import default_taxonomy, load_dataset
from ..errors import MyfoodError
from ..modelhub import PredictionOutput, PredictorError, predict, resolve_predictor
from ..nutrition import (default_calibration, default_nutrition_table, estimate_meal,
                         load_calibration, load_nutrition_table)
from .config import ServiceConfig
from .diary import (DiaryEntry, DiaryStore, EditError, apply_edits, daily_totals,
                    utc_now_iso)
from .rle import decode_mask, encode_mask


def _meal_wire(meal) -> dict:
    """Meal with floats at the JSON boundary (internally exact)."""
    return {
        "items": [
            {"class_id": it.class_id, "pixel_area": it.pixel_area,
             "grams": float(it.grams), "nutrients": it.nutrients.as_floats()}
            for it in meal.items
        ],
        "totals": meal.totals.as_floats(),
    }


def _entry_wire(entry: DiaryEntry) -> dict:
    return {
        "entry_id": entry.entry_id,
        "timestamp": entry.timestamp,
        "image_ref": entry.image_ref,
        "meal": _meal_wire(entry.meal),
        "user_edits": [list(e) for e in entry.user_edits],
    }


def create_app(config: ServiceConfig) -> FastAPI:
    """Assemble the HTTP service around one predictor and one diary store."""
    config.validate_paths()

    def _initialize(state) -> None:
        if config.dataset_path:
            state.dataset = load_dataset(config.dataset_path)
            state.taxonomy = state.dataset.taxonomy
        else:
            state.dataset = None
            state.taxonomy = default_taxonomy()
        state.table = (load_nutrition_table(config.nutrition_table, state.taxonomy)
                       if config.nutrition_table
                       else default_nutrition_table(state.taxonomy))
        state.calibration = (load_calibration(config.calibration, state.taxonomy)
                             if config.calibration
                             else default_calibration(state.taxonomy))
        state.predictor = resolve_predictor(config.model, dataset=state.dataset,
                                            taxonomy=state.taxonomy)
        state.diary = DiaryStore(config.diary_path)
        state.inflight = anyio.Semaphore(config.max_inflight)
        state.ready = True

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        _initialize(app.state)
        yield
        app.state.ready = False

    app = FastAPI(title="food segmentation service", lifespan=lifespan)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    state = app.state
    state.config = config
    state.started = time.monotonic()
    state.ready = False

    def _require_ready() -> None:
        if not state.ready:
            raise HTTPException(status_code=503, detail="service not initialized")

    @app.get("/health")
    def health() -> dict:
        _require_ready()
        return {"status": "ok", "model": state.predictor.name,
                "model_digest": state.predictor.digest,
                "uptime_s": round(time.monotonic() - state.started, 3)}

    @app.get("/foods")
    def foods() -> dict:
        _require_ready()
        tax = state.taxonomy
        return {"classes": [
            {"id": cid, "name": tax.name_of(cid),
             "per_100g": state.table[cid].per_100g.as_floats()}
            for cid in tax.food_ids
        ]}

    @app.post("/predict")
    async def predict_image(request: Request) -> dict:
        _require_ready()
        body = await request.body()
        if len(body) > config.max_upload_bytes:
            raise HTTPException(status_code=413,
                                detail=f"payload exceeds {config.max_upload_bytes} bytes")
        try:
            with Image.open(io.BytesIO(body)) as img:
                image = np.asarray(img.convert("RGB"))
        except (UnidentifiedImageError, OSError, ValueError):
            raise HTTPException(status_code=400, detail="payload is not a decodable image")

        async with state.inflight:
            try:
                output = await anyio.to_thread.run_sync(predict, state.predictor, image)
            except PredictorError as exc:
                raise HTTPException(status_code=422, detail=f"PredictorError: {exc}")

        meal = estimate_meal(output, state.table, state.calibration,
                             taxonomy=state.taxonomy)
        doc = encode_mask(output.label_mask)
        confidence = None
        if output.class_scores is not None:
            confidence = {}
            for key in doc["classes"]:
                cid = int(key)
                sel = output.label_mask.values == cid
                confidence[key] = float(output.class_scores[cid][sel].mean())
        return {
            "model": state.predictor.name,
            "width": doc["width"],
            "height": doc["height"],
            "classes": doc["classes"],
            "class_names": {str(cid): state.taxonomy.name_of(cid)
                            for cid in map(int, doc["classes"])},
            "confidence": confidence,
            "meal": _meal_wire(meal),
        }

    @app.post("/diary", status_code=201)
    async def diary_add(request: Request) -> dict:
        _require_ready()
        body = await request.json()
        try:
            mask = decode_mask(body)
        except MyfoodError as exc:
            raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}")
        meal = estimate_meal(PredictionOutput(label_mask=mask), state.table,
                             state.calibration, taxonomy=state.taxonomy)
        entry = DiaryEntry(entry_id=f"e-{uuid.uuid4().hex[:12]}",
                           timestamp=utc_now_iso(),
                           image_ref=str(body.get("image_ref", "")),
                           meal=meal)
        edits = body.get("edits") or []
        if edits:
            try:
                entry = apply_edits(entry, edits, state.table)
            except EditError as exc:
                raise HTTPException(status_code=422, detail=f"EditError: {exc}")
        state.diary.add(entry)
        return {"entry_id": entry.entry_id, "entry": _entry_wire(entry)}

    @app.get("/diary")
    def diary_list(request: Request) -> dict:
        _require_ready()
        from_ts = request.query_params.get("from")
        to_ts = request.query_params.get("to")
        try:
            entries = state.diary.entries(from_ts, to_ts)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=f"bad time bound: {exc}")
        return {
            "entries": [_entry_wire(e) for e in entries],
            "daily_totals": {day: totals.as_floats()
                             for day, totals in sorted(daily_totals(entries).items())},
        }

    @app.patch("/diary/{entry_id}")
    async def diary_patch(entry_id: str, request: Request) -> dict:
        _require_ready()
        body = await request.json()
        try:
            entry = state.diary.get(entry_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no diary entry {entry_id!r}")
        edits = body.get("edits")
        if not isinstance(edits, list) or not edits:
            raise HTTPException(status_code=422, detail="body must carry a non-empty 'edits' list")
        try:
            updated = apply_edits(entry, edits, state.table)
        except EditError as exc:
            raise HTTPException(status_code=422, detail=f"EditError: {exc}")
        state.diary.put_patched(updated)
        return {"entry": _entry_wire(updated)}

    return app


def run_server(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port,
                log_level="info")


__all__ = ["create_app", "run_server"]
