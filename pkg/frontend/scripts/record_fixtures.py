#!/usr/bin/env python3
"""Record live backend exchanges into fixtures/ for the stub and the tests.

Needs the backend package installed (dev-time only): builds a small two-image
dataset, starts `myfood serve` with the oracle model and a fresh diary, walks
the same request sequence the tests replay, and stores every exchange.

Usage: python3 scripts/record_fixtures.py [--port 8630]
"""

from __future__ import annotations

import argparse
import base64
import hashlib
import json
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import requests
from PIL import Image

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


# ---------------------------------------------------------------------------
# canonical JSON — must mirror the stub's canonicalJson() byte for byte
# ---------------------------------------------------------------------------

def js_num(x: float) -> str:
    """Render a float the way JavaScript's String(Number) does."""
    if isinstance(x, float) and x.is_integer() and abs(x) < 1e21:
        return str(int(x))
    return repr(x)


def canonical(value) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return js_num(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = [f"{json.dumps(str(k))}:{canonical(v)}"
                 for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))]
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"cannot canonicalize {type(value)}")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# staging: a two-image dataset with known classes
# ---------------------------------------------------------------------------

def gradient_photo(side: int, seed: int) -> np.ndarray:
    ramp = np.linspace(30, 220, side)
    r = np.tile(ramp, (side, 1))
    g = r.T
    b = np.full((side, side), 40.0 + 20 * seed)
    return np.stack([r, g, b], axis=-1).astype(np.uint8)


def rect_region(x0: int, y0: int, x1: int, y1: int, name: str) -> dict:
    return {
        "shape_attributes": {
            "name": "polygon",
            "all_points_x": [x0, x1, x1, x0],
            "all_points_y": [y0, y0, y1, y1],
        },
        "region_attributes": {"food": name},
    }


def build_dataset(workdir: Path) -> Path:
    photos = workdir / "photos"
    photos.mkdir()
    Image.fromarray(gradient_photo(64, 1)).save(photos / "rice.png")
    Image.fromarray(gradient_photo(96, 2)).save(photos / "multi.png")
    annotations = {
        "rice.png1": {
            "filename": "rice.png",
            "regions": [rect_region(8, 8, 40, 40, "rice")],
        },
        "multi.png2": {
            "filename": "multi.png",
            "regions": [
                rect_region(4, 4, 28, 28, "rice"),
                rect_region(36, 8, 60, 32, "pasta"),
                rect_region(12, 48, 44, 80, "salad"),
            ],
        },
    }
    via = workdir / "annotations.json"
    via.write_text(json.dumps(annotations))
    dataset = workdir / "ds"
    subprocess.run(
        ["myfood", "dataset", "build", "--annotations", str(via),
         "--images", str(photos), "--out", str(dataset)],
        check=True, capture_output=True)
    return dataset


# ---------------------------------------------------------------------------
# recording
# ---------------------------------------------------------------------------

class Recorder:
    def __init__(self, base_url: str):
        self.base_url = base_url
        self.exchanges: list[dict] = []

    def record(self, method: str, path: str, *, raw: bytes | None = None,
               body: dict | None = None, expect: int) -> dict:
        headers = {}
        data = None
        digest = None
        if raw is not None:
            data = raw
            headers["content-type"] = "application/octet-stream"
            digest = sha256_hex(raw)
        elif body is not None:
            data = canonical(body).encode("utf-8")
            headers["content-type"] = "application/json"
            digest = sha256_hex(data)
        response = requests.request(method, self.base_url + path,
                                    data=data, headers=headers, timeout=30)
        if response.status_code != expect:
            raise RuntimeError(
                f"{method} {path}: expected {expect}, got "
                f"{response.status_code}: {response.text[:200]}")
        payload = response.json()
        self.exchanges.append({
            "method": method,
            "path": path,
            "body_sha256": digest,
            "status": response.status_code,
            "response": payload,
        })
        return payload


def mask_to_gt(mask_path: Path) -> dict:
    labels = np.asarray(Image.open(mask_path))
    return {
        "width": int(labels.shape[1]),
        "height": int(labels.shape[0]),
        "labels": labels.ravel().astype(int).tolist(),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=8630)
    args = parser.parse_args()

    FIXTURES.mkdir(exist_ok=True)
    base_url = f"http://127.0.0.1:{args.port}"

    with tempfile.TemporaryDirectory() as tmp:
        workdir = Path(tmp)
        dataset = build_dataset(workdir)

        config = workdir / "service.toml"
        config.write_text(
            f'model = "oracle"\ndataset_path = "{dataset}"\n'
            f'diary_path = "{workdir / "diary.jsonl"}"\n')
        server = subprocess.Popen(
            ["myfood", "serve", "--config", str(config), "--port", str(args.port)],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        try:
            for _ in range(50):
                try:
                    requests.get(base_url + "/health", timeout=1)
                    break
                except requests.ConnectionError:
                    time.sleep(0.2)
            else:
                raise RuntimeError("server never came up")

            rec = Recorder(base_url)
            health = rec.record("GET", "/health", expect=200)
            foods = rec.record("GET", "/foods", expect=200)

            rice_bytes = (dataset / "images" / "rice.png").read_bytes()
            multi_bytes = (dataset / "images" / "multi.png").read_bytes()
            predict_rice = rec.record("POST", "/predict", raw=rice_bytes, expect=200)
            predict_multi = rec.record("POST", "/predict", raw=multi_bytes, expect=200)

            assert sorted(predict_rice["classes"]) == ["1"], predict_rice["classes"].keys()
            assert sorted(predict_multi["classes"]) == ["1", "5", "6"], \
                predict_multi["classes"].keys()

            def mask_of(prediction: dict) -> dict:
                return {"width": prediction["width"], "height": prediction["height"],
                        "classes": prediction["classes"]}

            # The diary scene the tests replay: a plain rice entry, a multi
            # entry that then gets patched, and a rice entry logged with its
            # grams doubled inline — all on the same (today's) date.
            add_rice = rec.record("POST", "/diary",
                                  body={**mask_of(predict_rice), "image_ref": "rice.png"},
                                  expect=201)
            add_multi = rec.record("POST", "/diary",
                                   body={**mask_of(predict_multi), "image_ref": "multi.png"},
                                   expect=201)

            # Mirrors the correction-view flow: the slider is touched at the
            # original grams, then dragged to double — two journaled edits.
            grams0 = predict_rice["meal"]["items"][0]["grams"]
            add_doubled = rec.record(
                "POST", "/diary",
                body={**mask_of(predict_rice), "image_ref": "rice.png",
                      "edits": [
                          {"field": "grams", "item": 0, "value": js_num(grams0)},
                          {"field": "grams", "item": 0, "value": js_num(2 * grams0)},
                      ]},
                expect=201)

            patch_multi = rec.record(
                "PATCH", f"/diary/{add_multi['entry_id']}",
                body={"edits": [{"field": "grams", "item": 0, "value": "50"}]},
                expect=200)

            diary_list = rec.record("GET", "/diary", expect=200)
            diary_empty = rec.record("GET", "/diary?from=2027-01-01", expect=200)

            assert len(diary_list["entries"]) == 3
            assert diary_empty["entries"] == []

            # Exactness note for the tests: does each served daily total
            # equal the float sum of its entries' totals?
            exact = True
            for day, totals in diary_list["daily_totals"].items():
                for key in ("kcal", "protein", "carb", "fat"):
                    sum_of = sum(e["meal"]["totals"][key]
                                 for e in diary_list["entries"]
                                 if e["timestamp"][:10] == day)
                    if sum_of != totals[key]:
                        exact = False
                        print(f"note: {day} {key}: served {totals[key]!r} "
                              f"vs float sum {sum_of!r}")
            print(f"daily totals exactly equal float entry sums: {exact}")

            named = {
                "health.json": health,
                "foods.json": foods,
                "predict_rice.json": predict_rice,
                "predict_multi.json": predict_multi,
                "diary_add_rice.json": add_rice,
                "diary_add_multi.json": add_multi,
                "diary_add_doubled.json": add_doubled,
                "diary_patch_multi.json": patch_multi,
                "diary_list.json": diary_list,
                "diary_empty.json": diary_empty,
                "gt_rice.json": mask_to_gt(dataset / "masks" / "rice.png"),
                "gt_multi.json": mask_to_gt(dataset / "masks" / "multi.png"),
                "uploads.json": {
                    "rice": {"name": "rice.png", "sha256": sha256_hex(rice_bytes),
                             "base64": base64.b64encode(rice_bytes).decode()},
                    "multi": {"name": "multi.png", "sha256": sha256_hex(multi_bytes),
                              "base64": base64.b64encode(multi_bytes).decode()},
                },
            }
            for name, payload in named.items():
                (FIXTURES / name).write_text(json.dumps(payload, indent=1) + "\n")
            (FIXTURES / "recorded.json").write_text(
                json.dumps(rec.exchanges, indent=1) + "\n")
            print(f"wrote {len(named) + 1} fixture files to {FIXTURES}")
        finally:
            server.terminate()
            server.wait(timeout=10)
    return 0


if __name__ == "__main__":
    sys.exit(main())
