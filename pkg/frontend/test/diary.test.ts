import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { DiaryView } from "../src/diaryview.js";
import { nutrientsFor } from "../src/nutrients.js";
import { SessionState } from "../src/session.js";
import type { StubBackend } from "../src/testing/stub.js";
import {
  diaryListFixture,
  diaryPatchMulti,
  foodsFixture,
  startStub,
} from "./helpers.js";

let stub: StubBackend;
let baseUrl: string;

beforeAll(async () => {
  ({ stub, url: baseUrl } = await startStub());
});

afterAll(async () => {
  await stub.close();
});

function freshView() {
  const session = new SessionState();
  return { view: new DiaryView(new ApiClient(baseUrl), session), session };
}

describe("diary view", () => {
  it("groups the recorded entries under one day with the served totals", async () => {
    const { view } = freshView();
    await view.refresh();
    const days = view.days();
    expect(days.length).toBe(1);
    expect(days[0]!.entries.length).toBe(3);
    expect(days[0]!.totals).toEqual(
      diaryListFixture().daily_totals[days[0]!.day],
    );
  });

  it("shows the zero-state for an empty range", async () => {
    const { view } = freshView();
    view.setRange("2027-01-01");
    await view.refresh();
    expect(view.isEmpty()).toBe(true);
    expect(view.emptyMessage()).toContain("range");
    expect(view.days()).toEqual([]);
  });

  it("shows the first-run zero-state message without a range", () => {
    const { view } = freshView();
    expect(view.isEmpty()).toBe(true);
    expect(view.emptyMessage()).toContain("first");
  });

  it("keeps the selected range on the session", () => {
    const { view, session } = freshView();
    view.setRange("2026-08-01", "2026-08-31");
    expect(session.diaryRange).toEqual({ from: "2026-08-01", to: "2026-08-31" });
  });

  it("surfaces the journaled edits of a patched entry", async () => {
    const { view } = freshView();
    await view.refresh();
    const patched = view.days()[0]!.entries.find((e) => e.user_edits.length > 0
      && e.image_ref === "multi.png")!;
    expect(patched.user_edits[0]![1]).toBe("grams");
    expect(patched.user_edits[0]![3]).toBe("50");
  });

  it("patched entry totals match a client-side recomputation from /foods", async () => {
    const foods = foodsFixture();
    const entry = diaryPatchMulti().entry;
    const recomputed = entry.meal.items.map(
      (it) => nutrientsFor(foods, it.class_id, it.grams));
    for (const [i, item] of entry.meal.items.entries()) {
      expect(recomputed[i]!.kcal).toBeCloseTo(item.nutrients.kcal, 9);
      expect(recomputed[i]!.protein).toBeCloseTo(item.nutrients.protein, 9);
      expect(recomputed[i]!.carb).toBeCloseTo(item.nutrients.carb, 9);
      expect(recomputed[i]!.fat).toBeCloseTo(item.nutrients.fat, 9);
    }
    const kcalSum = recomputed.reduce((acc, n) => acc + n.kcal, 0);
    expect(kcalSum).toBeCloseTo(entry.meal.totals.kcal, 9);
  });

  it("replays the recorded patch over HTTP", async () => {
    const api = new ApiClient(baseUrl);
    const fixtureEntry = diaryPatchMulti().entry;
    const { entry } = await api.diaryPatch(fixtureEntry.entry_id, [
      { item: 0, field: "grams", value: "50" },
    ]);
    expect(entry).toEqual(fixtureEntry);
  });
});
