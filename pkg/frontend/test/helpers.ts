import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { StubBackend, type RecordedExchange } from "../src/testing/stub.js";
import type {
  DiaryAddResponse,
  DiaryEntryWire,
  DiaryListResponse,
  FoodsResponse,
  HealthResponse,
  PredictResponse,
} from "../src/wire.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export interface GroundTruth {
  width: number;
  height: number;
  labels: number[];
}

export interface UploadFixture {
  name: string;
  sha256: string;
  base64: string;
}

export const predictRice = (): PredictResponse => fixture("predict_rice.json");
export const predictMulti = (): PredictResponse => fixture("predict_multi.json");
export const gtRice = (): GroundTruth => fixture("gt_rice.json");
export const gtMulti = (): GroundTruth => fixture("gt_multi.json");
export const foodsFixture = (): FoodsResponse => fixture("foods.json");
export const healthFixture = (): HealthResponse => fixture("health.json");
export const diaryListFixture = (): DiaryListResponse => fixture("diary_list.json");
export const diaryEmptyFixture = (): DiaryListResponse => fixture("diary_empty.json");
export const diaryAddDoubled = (): DiaryAddResponse => fixture("diary_add_doubled.json");
export const diaryPatchMulti = (): { entry: DiaryEntryWire } => fixture("diary_patch_multi.json");
export const uploads = (): Record<"rice" | "multi", UploadFixture> => fixture("uploads.json");

export function uploadBytes(which: "rice" | "multi"): Uint8Array {
  return Uint8Array.from(Buffer.from(uploads()[which].base64, "base64"));
}

/** Start a stub backend loaded with every recorded exchange. */
export async function startStub(): Promise<{ stub: StubBackend; url: string }> {
  const recordings = fixture<RecordedExchange[]>("recorded.json");
  const stub = new StubBackend(recordings);
  const url = await stub.listen();
  return { stub, url };
}
