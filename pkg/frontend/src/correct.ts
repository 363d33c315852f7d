import { ApiClient } from "./api.js";
import { sumNutrients, withClass, withGrams } from "./nutrients.js";
import { SessionState } from "./session.js";
import type {
  DiaryAddResponse,
  EditRequest,
  FoodsResponse,
  MealItemWire,
  Nutrients,
  PredictResponse,
} from "./wire.js";
import { ZERO_NUTRIENTS } from "./wire.js";

export class NoPredictionError extends Error {}

/**
 * Correction view: the predicted items as an editable list. Grams and class
 * reassignments recompute nutrients from the /foods table immediately so the
 * displayed totals always reflect what would be logged; deletions drop the
 * item from the outgoing entry. "Log" posts the original mask plus the edit
 * list, so the server journals the same changes the user saw.
 */
export class CorrectionView {
  private items: MealItemWire[] = [];
  private deleted = new Set<number>();
  private prediction: PredictResponse | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly session: SessionState,
    private readonly foods: FoodsResponse,
  ) {}

  /** Load the session's last prediction into the editor. */
  load(): void {
    const prediction = this.session.lastPrediction;
    if (!prediction) throw new NoPredictionError("run a prediction first");
    this.prediction = prediction;
    this.items = prediction.meal.items.map((it) => ({ ...it, nutrients: { ...it.nutrients } }));
    this.deleted = new Set();
  }

  private requireItem(index: number): void {
    if (!Number.isInteger(index) || index < 0 || index >= this.items.length) {
      throw new RangeError(`no item at index ${index}`);
    }
  }

  /** Items still part of the entry, with their editor indexes. */
  visibleItems(): Array<{ index: number; item: MealItemWire }> {
    return this.items
      .map((item, index) => ({ index, item }))
      .filter(({ index }) => !this.deleted.has(index));
  }

  setGrams(index: number, grams: number): void {
    this.requireItem(index);
    this.items[index] = withGrams(this.foods, this.items[index]!, grams);
    this.session.addEdit({ item: index, field: "grams", value: String(grams) });
  }

  reassignClass(index: number, classId: number): void {
    this.requireItem(index);
    this.items[index] = withClass(this.foods, this.items[index]!, classId);
    this.session.addEdit({ item: index, field: "class_id", value: classId });
  }

  deleteItem(index: number): void {
    this.requireItem(index);
    this.deleted.add(index);
  }

  restoreItem(index: number): void {
    this.deleted.delete(index);
  }

  /** Totals over surviving items; zero when everything was deleted. */
  totals(): Nutrients {
    const alive = this.visibleItems().map(({ item }) => item.nutrients);
    return alive.length > 0 ? sumNutrients(alive) : { ...ZERO_NUTRIENTS };
  }

  /** Logging is pointless without at least one surviving item. */
  canLog(): boolean {
    return this.prediction !== null && this.visibleItems().length > 0;
  }

  /** Edits to send: the user's changes plus a zero-grams edit per deletion. */
  outgoingEdits(): EditRequest[] {
    const edits = [...this.session.pendingEdits];
    for (const index of [...this.deleted].sort((a, b) => a - b)) {
      edits.push({ item: index, field: "grams", value: "0" });
    }
    return edits;
  }

  /** Commit the entry to the diary. */
  async log(imageRef = ""): Promise<DiaryAddResponse> {
    if (!this.prediction || !this.canLog()) {
      throw new NoPredictionError("nothing to log");
    }
    const { width, height, classes } = this.prediction;
    return this.api.diaryAdd({ width, height, classes }, imageRef, this.outgoingEdits());
  }
}
