import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { CorrectionView } from "../src/correct.js";
import { DiaryView } from "../src/diaryview.js";
import { formatAmount } from "../src/nutrients.js";
import { decodeMask, encodeMask } from "../src/rle.js";
import { SessionState } from "../src/session.js";
import { UploadView } from "../src/upload.js";
import type { StubBackend } from "../src/testing/stub.js";
import {
  gtMulti,
  gtRice,
  predictMulti,
  predictRice,
  startStub,
  uploadBytes,
  uploads,
} from "./helpers.js";

// The three checks the webapp must pass, run the way the browser runs:
// over HTTP against a stub backend that replays recorded live responses.

let stub: StubBackend;
let baseUrl: string;

beforeAll(async () => {
  ({ stub, url: baseUrl } = await startStub());
});

afterAll(async () => {
  await stub.close();
});

describe("mask decoding round-trips recorded /predict responses", () => {
  for (const [name, prediction, truth] of [
    ["rice", predictRice(), gtRice()],
    ["multi", predictMulti(), gtMulti()],
  ] as const) {
    it(`${name}: decoded labels equal ground truth pixel for pixel`, () => {
      const flat = decodeMask(prediction);
      expect(flat.length).toBe(truth.width * truth.height);
      expect(Array.from(flat)).toEqual(truth.labels);
    });

    it(`${name}: re-encoding reproduces the wire document exactly`, () => {
      const flat = decodeMask(prediction);
      const doc = encodeMask(flat, prediction.width, prediction.height);
      expect(doc).toEqual({
        width: prediction.width,
        height: prediction.height,
        classes: prediction.classes,
      });
    });
  }
});

describe("doubling grams in the correction view doubles displayed kcal", () => {
  it("halving-then-doubling and direct doubling agree with 2x the display", async () => {
    const api = new ApiClient(baseUrl);
    const session = new SessionState();
    const upload = new UploadView(api, session);
    const status = await upload.submit(uploads().rice.name, uploadBytes("rice"));
    expect(status.kind).toBe("ready");

    const view = new CorrectionView(api, session, await api.foods());
    view.load();
    const [{ item: loaded }] = view.visibleItems();
    const baseGrams = loaded!.grams;
    const serverKcal = loaded!.nutrients.kcal;

    // Touch the slider at the original grams: from here on every figure is
    // recomputed client-side from /foods, exactly as the user sees it move.
    view.setGrams(0, baseGrams);
    const [{ item: before }] = view.visibleItems();
    view.setGrams(0, baseGrams * 2);
    const [{ item: after }] = view.visibleItems();

    expect(after!.grams).toBe(baseGrams * 2);
    // Exact at double precision: scaling grams by 2 scales every figure by 2.
    expect(after!.nutrients.kcal).toBe(2 * before!.nutrients.kcal);
    expect(after!.nutrients.protein).toBe(2 * before!.nutrients.protein);
    expect(after!.nutrients.carb).toBe(2 * before!.nutrients.carb);
    expect(after!.nutrients.fat).toBe(2 * before!.nutrients.fat);
    expect(view.totals().kcal).toBe(2 * before!.nutrients.kcal);
    // And what the user reads doubles against the served figure too.
    expect(formatAmount(after!.nutrients.kcal)).toBe(formatAmount(2 * serverKcal));
    expect(Math.abs(after!.nutrients.kcal - 2 * serverKcal))
      .toBeLessThanOrEqual(1e-9 * Math.max(1, 2 * serverKcal));

    // Logging the doubled entry hits the stub's recorded 201 exchange.
    const logged = await view.log(uploads().rice.name);
    expect(logged.entry_id).toMatch(/^e-/);
    expect(logged.entry.user_edits.length).toBe(2);
  });
});

describe("diary daily totals equal the sum of the displayed entries", () => {
  it("every day's served total matches the entry sum at display precision", async () => {
    const api = new ApiClient(baseUrl);
    const session = new SessionState();
    const diary = new DiaryView(api, session);
    await diary.refresh();

    expect(diary.isEmpty()).toBe(false);
    const days = diary.days();
    expect(days.length).toBeGreaterThan(0);
    for (const group of days) {
      const sum = diary.entrySum(group.day);
      for (const key of ["kcal", "protein", "carb", "fat"] as const) {
        // Equal as displayed, and within one part in 10^12 numerically
        // (the server rounds once after exact summation; the client adds
        // already-rounded floats).
        expect(formatAmount(sum[key])).toBe(formatAmount(group.totals[key]));
        const scale = Math.max(1, Math.abs(group.totals[key]));
        expect(Math.abs(sum[key] - group.totals[key])).toBeLessThanOrEqual(1e-12 * scale);
      }
    }
    expect(diary.totalsConsistent()).toBe(true);
  });
});
