// ============================================
// WIRE TYPES — shapes exchanged with the backend
// ============================================

/** Per-macro nutrient figures; grams for macros, kcal for energy. */
export interface Nutrients {
  kcal: number;
  protein: number;
  carb: number;
  fat: number;
}

/** Run-length mask document: 0-based [start, length, ...] pairs per class id,
 *  row-major over the flattened raster. Background (0) is implicit. */
export interface MaskDoc {
  width: number;
  height: number;
  classes: Record<string, number[]>;
}

export interface MealItemWire {
  class_id: number;
  pixel_area: number;
  grams: number;
  nutrients: Nutrients;
}

export interface MealWire {
  items: MealItemWire[];
  totals: Nutrients;
}

export interface PredictResponse extends MaskDoc {
  model: string;
  class_names: Record<string, string>;
  confidence: Record<string, number> | null;
  meal: MealWire;
}

export interface FoodClass {
  id: number;
  name: string;
  per_100g: Nutrients;
}

export interface FoodsResponse {
  classes: FoodClass[];
}

export interface HealthResponse {
  status: string;
  model: string;
  model_digest: string;
  uptime_s: number;
}

/** One applied edit as the server journals it: [item index, field, old, new]. */
export type EditRecord = [number, string, string, string];

export interface DiaryEntryWire {
  entry_id: string;
  timestamp: string;
  image_ref: string;
  meal: MealWire;
  user_edits: EditRecord[];
}

export interface DiaryListResponse {
  entries: DiaryEntryWire[];
  daily_totals: Record<string, Nutrients>;
}

export interface DiaryAddResponse {
  entry_id: string;
  entry: DiaryEntryWire;
}

/** Edit as sent to the server (POST /diary inline or PATCH /diary/{id}). */
export interface EditRequest {
  item: number;
  field: "grams" | "class_id";
  value: string | number;
}

export const ZERO_NUTRIENTS: Nutrients = { kcal: 0, protein: 0, carb: 0, fat: 0 };
