import type { MaskDoc } from "./wire.js";

/** Raised when a mask document cannot be decoded. */
export class MaskFormatError extends Error {}

/**
 * Decode a run-length mask document into a row-major label raster.
 *
 * Inverse of the service's encoder: every run [start, length] paints
 * `length` pixels of the class id starting at flat index `start`; anything
 * not covered by a run stays background (0). Rejects the same malformed
 * inputs the server rejects so client and server never disagree silently.
 */
export function decodeMask(doc: MaskDoc): Uint8Array {
  const width = doc.width | 0;
  const height = doc.height | 0;
  if (!Number.isFinite(doc.width) || !Number.isFinite(doc.height) || width <= 0 || height <= 0) {
    throw new MaskFormatError(`bad mask dimensions ${doc.width}x${doc.height}`);
  }
  if (typeof doc.classes !== "object" || doc.classes === null) {
    throw new MaskFormatError("mask document has no classes map");
  }
  const flat = new Uint8Array(width * height);
  for (const [key, runs] of Object.entries(doc.classes)) {
    const classId = Number(key);
    if (!Number.isInteger(classId) || classId <= 0 || classId >= 256) {
      throw new MaskFormatError(`class id ${key} out of range`);
    }
    if (!Array.isArray(runs) || runs.length % 2 !== 0) {
      throw new MaskFormatError(`class ${classId}: odd run list length`);
    }
    for (let i = 0; i < runs.length; i += 2) {
      const start = runs[i]!;
      const length = runs[i + 1]!;
      if (!Number.isInteger(start) || !Number.isInteger(length) ||
          length <= 0 || start < 0 || start + length > flat.length) {
        throw new MaskFormatError(`class ${classId}: run (${start},${length}) outside raster`);
      }
      flat.fill(classId, start, start + length);
    }
  }
  return flat;
}

/**
 * Re-encode a label raster into the wire document. Runs are emitted in
 * ascending class-id order with ascending starts, matching the server's
 * output byte for byte after JSON serialization.
 */
export function encodeMask(flat: Uint8Array, width: number, height: number): MaskDoc {
  if (width <= 0 || height <= 0 || flat.length !== width * height) {
    throw new MaskFormatError(`raster length ${flat.length} != ${width}x${height}`);
  }
  const present = new Set<number>();
  for (const v of flat) {
    if (v !== 0) present.add(v);
  }
  const classes: Record<string, number[]> = {};
  for (const classId of [...present].sort((a, b) => a - b)) {
    const runs: number[] = [];
    let start = -1;
    for (let i = 0; i < flat.length; i++) {
      if (flat[i] === classId) {
        if (start < 0) start = i;
      } else if (start >= 0) {
        runs.push(start, i - start);
        start = -1;
      }
    }
    if (start >= 0) runs.push(start, flat.length - start);
    classes[String(classId)] = runs;
  }
  return { width, height, classes };
}

/** Pixel count per class id present in the raster (background excluded). */
export function classAreas(flat: Uint8Array): Map<number, number> {
  const areas = new Map<number, number>();
  for (const v of flat) {
    if (v !== 0) areas.set(v, (areas.get(v) ?? 0) + 1);
  }
  return areas;
}
