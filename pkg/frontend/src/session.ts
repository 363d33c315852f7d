import type { EditRequest, PredictResponse } from "./wire.js";

export class EditTargetError extends Error {}

/**
 * Per-tab session state shared by the three views. The one rule enforced
 * here: pending edits may only reference items of the prediction currently
 * loaded — loading a new prediction clears them, and an edit against a
 * missing item index is refused outright.
 */
export class SessionState {
  currentImage: { name: string; bytes: Uint8Array } | null = null;
  lastPrediction: PredictResponse | null = null;
  pendingEdits: EditRequest[] = [];
  diaryRange: { from?: string; to?: string } = {};

  loadPrediction(image: { name: string; bytes: Uint8Array }, prediction: PredictResponse): void {
    this.currentImage = image;
    this.lastPrediction = prediction;
    this.pendingEdits = [];
  }

  addEdit(edit: EditRequest): void {
    if (!this.lastPrediction) {
      throw new EditTargetError("no prediction loaded");
    }
    const itemCount = this.lastPrediction.meal.items.length;
    if (!Number.isInteger(edit.item) || edit.item < 0 || edit.item >= itemCount) {
      throw new EditTargetError(
        `edit references item ${edit.item}, prediction has ${itemCount}`);
    }
    this.pendingEdits.push(edit);
  }

  clear(): void {
    this.currentImage = null;
    this.lastPrediction = null;
    this.pendingEdits = [];
  }
}
