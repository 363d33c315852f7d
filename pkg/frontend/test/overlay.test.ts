import { describe, expect, it } from "vitest";
import { classColor, cssColor, OverlayModel } from "../src/overlay.js";
import { decodeMask } from "../src/rle.js";
import { predictMulti } from "./helpers.js";

describe("classColor", () => {
  it("pins the palette the backend paints its overlays with", () => {
    const expected: Record<number, [number, number, number]> = {
      1: [53, 108, 242],
      2: [163, 242, 53],
      3: [242, 53, 218],
      4: [53, 242, 210],
      5: [242, 155, 53],
      6: [100, 53, 242],
      7: [61, 242, 53],
      8: [242, 53, 116],
      9: [53, 171, 242],
    };
    for (const [id, rgb] of Object.entries(expected)) {
      expect(classColor(Number(id))).toEqual(rgb);
    }
    expect(cssColor(1)).toBe("rgb(53, 108, 242)");
  });
});

describe("OverlayModel", () => {
  const prediction = predictMulti();
  const flat = decodeMask(prediction);

  it("lists classes ascending with names and areas", () => {
    const overlay = new OverlayModel(prediction, flat);
    const legend = overlay.legend();
    expect(legend.map((e) => e.classId)).toEqual([1, 5, 6]);
    expect(legend.map((e) => e.name)).toEqual(["rice", "pasta", "salad"]);
    const totalArea = legend.reduce((acc, e) => acc + e.pixelArea, 0);
    expect(totalArea).toBe(flat.filter((v) => v !== 0).length);
  });

  it("paints only visible classes, transparent elsewhere", () => {
    const overlay = new OverlayModel(prediction, flat);
    const rgba = overlay.rgba(0.5);
    expect(rgba.length).toBe(prediction.width * prediction.height * 4);
    const background = flat.findIndex((v) => v === 0);
    const rice = flat.findIndex((v) => v === 1);
    expect(rgba[4 * background + 3]).toBe(0);
    expect(rgba[4 * rice + 3]).toBe(Math.round(0.5 * 255));
    expect([rgba[4 * rice], rgba[4 * rice + 1], rgba[4 * rice + 2]])
      .toEqual(classColor(1));
  });

  it("toggling hides and restores a class", () => {
    const overlay = new OverlayModel(prediction, flat);
    const rice = flat.findIndex((v) => v === 1);
    overlay.toggle(1);
    expect(overlay.rgba()[4 * rice + 3]).toBe(0);
    expect(overlay.legend().find((e) => e.classId === 1)!.visible).toBe(false);
    overlay.toggle(1);
    expect(overlay.rgba()[4 * rice + 3]).toBeGreaterThan(0);
  });
});
