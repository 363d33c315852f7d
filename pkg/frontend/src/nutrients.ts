import type { FoodClass, FoodsResponse, MealItemWire, Nutrients } from "./wire.js";
import { ZERO_NUTRIENTS } from "./wire.js";

/**
 * All nutrient math on the client side runs off the per-100g figures served
 * by GET /foods — the app holds no nutrient constants of its own, so a table
 * change on the server is picked up on the next load.
 */

export class UnknownClassError extends Error {}

export function foodById(foods: FoodsResponse, classId: number): FoodClass {
  const entry = foods.classes.find((c) => c.id === classId);
  if (!entry) throw new UnknownClassError(`no food class with id ${classId}`);
  return entry;
}

/** Nutrients for `grams` of a class, scaled from its per-100g profile. */
export function nutrientsFor(foods: FoodsResponse, classId: number, grams: number): Nutrients {
  if (!Number.isFinite(grams) || grams < 0) {
    throw new RangeError(`grams must be >= 0, got ${grams}`);
  }
  const per = foodById(foods, classId).per_100g;
  return {
    kcal: (per.kcal * grams) / 100,
    protein: (per.protein * grams) / 100,
    carb: (per.carb * grams) / 100,
    fat: (per.fat * grams) / 100,
  };
}

export function addNutrients(a: Nutrients, b: Nutrients): Nutrients {
  return {
    kcal: a.kcal + b.kcal,
    protein: a.protein + b.protein,
    carb: a.carb + b.carb,
    fat: a.fat + b.fat,
  };
}

export function sumNutrients(list: Nutrients[]): Nutrients {
  return list.reduce(addNutrients, { ...ZERO_NUTRIENTS });
}

/** An item with grams changed: nutrients recomputed from the foods table. */
export function withGrams(foods: FoodsResponse, item: MealItemWire, grams: number): MealItemWire {
  return { ...item, grams, nutrients: nutrientsFor(foods, item.class_id, grams) };
}

/** An item reassigned to another class: same grams, new per-100g profile. */
export function withClass(foods: FoodsResponse, item: MealItemWire, classId: number): MealItemWire {
  return {
    ...item,
    class_id: classId,
    nutrients: nutrientsFor(foods, classId, item.grams),
  };
}

const DISPLAY_DECIMALS = 1;

/** Render a nutrient figure the way every view shows it. */
export function formatAmount(value: number): string {
  return value.toFixed(DISPLAY_DECIMALS);
}

export function formatNutrients(n: Nutrients): string {
  return `${formatAmount(n.kcal)} kcal · ${formatAmount(n.protein)}g protein · ` +
    `${formatAmount(n.carb)}g carb · ${formatAmount(n.fat)}g fat`;
}
