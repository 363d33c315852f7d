import type { PredictResponse } from "./wire.js";
import { classAreas } from "./rle.js";

/**
 * Overlay model: which classes are present, what color each one gets, and
 * the RGBA pixels to composite on a canvas above the photo. Colors are the
 * same deterministic per-id palette the backend uses for its overlay
 * renderings, so saved reports and the app agree visually.
 */

const GOLDEN = 0.6180339887498949;
const SATURATION = 0.78;
const VALUE = 0.95;

function hsvToRgb(h: number, s: number, v: number): [number, number, number] {
  if (s === 0) return [v, v, v];
  const i = Math.floor(h * 6);
  const f = h * 6 - i;
  const p = v * (1 - s);
  const q = v * (1 - s * f);
  const t = v * (1 - s * (1 - f));
  switch (i % 6) {
    case 0: return [v, t, p];
    case 1: return [q, v, p];
    case 2: return [p, v, t];
    case 3: return [p, q, v];
    case 4: return [t, p, v];
    default: return [v, p, q];
  }
}

export function classColor(classId: number): [number, number, number] {
  const hue = (classId * GOLDEN) % 1;
  const [r, g, b] = hsvToRgb(hue, SATURATION, VALUE);
  return [Math.floor(r * 255), Math.floor(g * 255), Math.floor(b * 255)];
}

export function cssColor(classId: number): string {
  const [r, g, b] = classColor(classId);
  return `rgb(${r}, ${g}, ${b})`;
}

export interface LegendEntry {
  classId: number;
  name: string;
  color: [number, number, number];
  pixelArea: number;
  /** Mean prediction score for the class, when the model reports one. */
  confidence: number | null;
  visible: boolean;
}

export class OverlayModel {
  readonly width: number;
  readonly height: number;
  private readonly flat: Uint8Array;
  private readonly entries: LegendEntry[];

  constructor(prediction: PredictResponse, flat: Uint8Array) {
    this.width = prediction.width;
    this.height = prediction.height;
    this.flat = flat;
    const areas = classAreas(flat);
    this.entries = [...areas.keys()].sort((a, b) => a - b).map((classId) => ({
      classId,
      name: prediction.class_names[String(classId)] ?? `class ${classId}`,
      color: classColor(classId),
      pixelArea: areas.get(classId)!,
      confidence: prediction.confidence?.[String(classId)] ?? null,
      visible: true,
    }));
  }

  legend(): readonly LegendEntry[] {
    return this.entries;
  }

  toggle(classId: number): void {
    const entry = this.entries.find((e) => e.classId === classId);
    if (entry) entry.visible = !entry.visible;
  }

  /**
   * RGBA pixel buffer for the overlay layer: visible classes tinted at the
   * given opacity, everything else fully transparent. Sized for ImageData.
   */
  rgba(alpha = 0.45): Uint8ClampedArray<ArrayBuffer> {
    const out = new Uint8ClampedArray(this.width * this.height * 4);
    const a = Math.round(alpha * 255);
    const visible = new Map<number, [number, number, number]>();
    for (const e of this.entries) {
      if (e.visible) visible.set(e.classId, e.color);
    }
    for (let i = 0; i < this.flat.length; i++) {
      const color = visible.get(this.flat[i]!);
      if (!color) continue;
      out[4 * i] = color[0];
      out[4 * i + 1] = color[1];
      out[4 * i + 2] = color[2];
      out[4 * i + 3] = a;
    }
    return out;
  }
}
