import { ApiClient, ApiError, BackendUnreachable } from "./api.js";
import { decodeMask } from "./rle.js";
import { OverlayModel } from "./overlay.js";
import { SessionState } from "./session.js";
import type { PredictResponse } from "./wire.js";

export class NotAnImageError extends Error {}

// Magic numbers for the formats the file input accepts. Anything else is
// refused locally — the bytes never leave the browser.
const SIGNATURES: Array<{ name: string; bytes: number[]; offset?: number }> = [
  { name: "png", bytes: [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a] },
  { name: "jpeg", bytes: [0xff, 0xd8, 0xff] },
  { name: "gif", bytes: [0x47, 0x49, 0x46, 0x38] },
  { name: "bmp", bytes: [0x42, 0x4d] },
  { name: "webp", bytes: [0x57, 0x45, 0x42, 0x50], offset: 8 },
];

export function sniffImageFormat(bytes: Uint8Array): string | null {
  for (const sig of SIGNATURES) {
    const offset = sig.offset ?? 0;
    if (bytes.length < offset + sig.bytes.length) continue;
    if (sig.bytes.every((b, i) => bytes[offset + i] === b)) return sig.name;
  }
  return null;
}

export type UploadStatus =
  | { kind: "idle" }
  | { kind: "busy" }
  | { kind: "ready"; prediction: PredictResponse; overlay: OverlayModel }
  | { kind: "error"; message: string; retryable: boolean };

/**
 * Upload view: pick a photo, send it to /predict, decode the returned runs
 * and expose an overlay with one legend row per detected class. Backend
 * trouble lands in a retryable error state instead of throwing at the DOM.
 */
export class UploadView {
  status: UploadStatus = { kind: "idle" };

  constructor(
    private readonly api: ApiClient,
    private readonly session: SessionState,
  ) {}

  /**
   * Validate and submit a picked file. Rejects non-image bytes before any
   * request is made; the returned promise resolves to the new status.
   */
  async submit(name: string, bytes: Uint8Array): Promise<UploadStatus> {
    if (sniffImageFormat(bytes) === null) {
      throw new NotAnImageError(`${name} is not a supported image file`);
    }
    this.lastAttempt = { name, bytes };
    this.status = { kind: "busy" };
    try {
      const prediction = await this.api.predict(bytes);
      const flat = decodeMask(prediction);
      const overlay = new OverlayModel(prediction, flat);
      this.session.loadPrediction({ name, bytes }, prediction);
      this.status = { kind: "ready", prediction, overlay };
    } catch (err) {
      if (err instanceof BackendUnreachable) {
        this.status = { kind: "error", message: "backend unreachable", retryable: true };
      } else if (err instanceof ApiError) {
        this.status = { kind: "error", message: err.detail, retryable: err.status >= 500 };
      } else {
        this.status = { kind: "error", message: String(err), retryable: false };
      }
    }
    return this.status;
  }

  /** Re-submit the last attempted image after a retryable failure. */
  async retry(): Promise<UploadStatus> {
    if (this.status.kind !== "error" || !this.lastAttempt) {
      return this.status;
    }
    return this.submit(this.lastAttempt.name, this.lastAttempt.bytes);
  }

  private lastAttempt: { name: string; bytes: Uint8Array } | null = null;
}
