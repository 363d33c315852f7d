import { ApiClient } from "./api.js";
import { CorrectionView } from "./correct.js";
import { DiaryView } from "./diaryview.js";
import { formatAmount, formatNutrients } from "./nutrients.js";
import { cssColor } from "./overlay.js";
import { SessionState } from "./session.js";
import { NotAnImageError, UploadView } from "./upload.js";
import type { FoodsResponse } from "./wire.js";

// ============================================
// BOOTSTRAP
// ============================================

const params = new URLSearchParams(location.search);
const backend = params.get("backend") ?? "http://127.0.0.1:8000";

const api = new ApiClient(backend);
const session = new SessionState();
const uploadView = new UploadView(api, session);
const diaryView = new DiaryView(api, session);
let correctionView: CorrectionView | null = null;
let foods: FoodsResponse | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

// ============================================
// TABS
// ============================================

const tabs = ["analyze", "correct", "diary"] as const;
type Tab = (typeof tabs)[number];

function showTab(tab: Tab): void {
  for (const name of tabs) {
    el(`view-${name}`).hidden = name !== tab;
    el(`tab-${name}`).classList.toggle("active", name === tab);
  }
  if (tab === "correct") renderCorrection();
  if (tab === "diary") void refreshDiary();
}

for (const name of tabs) {
  el(`tab-${name}`).addEventListener("click", () => showTab(name));
}

// ============================================
// ANALYZE VIEW
// ============================================

const fileInput = el<HTMLInputElement>("photo-input");
const banner = el<HTMLDivElement>("banner");
const photoCanvas = el<HTMLCanvasElement>("photo-canvas");
const overlayCanvas = el<HTMLCanvasElement>("overlay-canvas");
const legendBox = el<HTMLUListElement>("legend");

function setBanner(message: string, retryable: boolean): void {
  banner.hidden = false;
  banner.textContent = message;
  const retryBtn = document.createElement("button");
  retryBtn.textContent = "retry";
  retryBtn.hidden = !retryable;
  retryBtn.addEventListener("click", () => void resubmit());
  banner.append(" ", retryBtn);
}

function clearBanner(): void {
  banner.hidden = true;
  banner.textContent = "";
}

async function drawPhoto(bytes: Uint8Array, width: number, height: number): Promise<void> {
  const blob = new Blob([new Uint8Array(bytes)]);
  const bitmap = await createImageBitmap(blob);
  photoCanvas.width = width;
  photoCanvas.height = height;
  photoCanvas.getContext("2d")!.drawImage(bitmap, 0, 0, width, height);
}

function drawOverlay(): void {
  if (uploadView.status.kind !== "ready") return;
  const { overlay } = uploadView.status;
  overlayCanvas.width = overlay.width;
  overlayCanvas.height = overlay.height;
  const ctx = overlayCanvas.getContext("2d")!;
  ctx.clearRect(0, 0, overlay.width, overlay.height);
  ctx.putImageData(new ImageData(overlay.rgba(), overlay.width, overlay.height), 0, 0);
}

function renderLegend(): void {
  legendBox.replaceChildren();
  if (uploadView.status.kind !== "ready") return;
  const { overlay } = uploadView.status;
  for (const entry of overlay.legend()) {
    const li = document.createElement("li");
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = cssColor(entry.classId);
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = entry.visible;
    box.addEventListener("change", () => {
      overlay.toggle(entry.classId);
      drawOverlay();
    });
    const confidence = entry.confidence === null ? "" : ` (${(entry.confidence * 100).toFixed(0)}%)`;
    label.append(box, swatch, ` ${entry.name} — ${entry.pixelArea} px${confidence}`);
    li.append(label);
    legendBox.append(li);
  }
}

async function analyze(name: string, bytes: Uint8Array): Promise<void> {
  clearBanner();
  let status;
  try {
    status = await uploadView.submit(name, bytes);
  } catch (err) {
    if (err instanceof NotAnImageError) {
      setBanner(err.message, false);
      return;
    }
    throw err;
  }
  if (status.kind === "error") {
    setBanner(status.message, status.retryable);
    return;
  }
  if (status.kind === "ready") {
    await drawPhoto(bytes, status.prediction.width, status.prediction.height);
    drawOverlay();
    renderLegend();
    el("goto-correct").hidden = false;
  }
}

async function resubmit(): Promise<void> {
  clearBanner();
  const status = await uploadView.retry();
  if (status.kind === "error") setBanner(status.message, status.retryable);
  if (status.kind === "ready") {
    drawOverlay();
    renderLegend();
  }
}

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  const bytes = new Uint8Array(await file.arrayBuffer());
  await analyze(file.name, bytes);
});

el("goto-correct").addEventListener("click", () => showTab("correct"));

// ============================================
// CORRECTION VIEW
// ============================================

const itemsBox = el<HTMLDivElement>("items");
const totalsBox = el<HTMLParagraphElement>("totals");
const logButton = el<HTMLButtonElement>("log-button");
const logStatus = el<HTMLParagraphElement>("log-status");

async function ensureFoods(): Promise<FoodsResponse> {
  if (!foods) foods = await api.foods();
  return foods;
}

function renderCorrection(): void {
  void (async () => {
    const table = await ensureFoods();
    if (!session.lastPrediction) {
      itemsBox.textContent = "No prediction loaded — analyze a photo first.";
      totalsBox.textContent = "";
      logButton.disabled = true;
      return;
    }
    if (!correctionView) correctionView = new CorrectionView(api, session, table);
    correctionView.load();
    paintItems(table);
  })();
}

function paintItems(table: FoodsResponse): void {
  const view = correctionView!;
  itemsBox.replaceChildren();
  for (const { index, item } of view.visibleItems()) {
    const row = document.createElement("div");
    row.className = "item-row";

    const select = document.createElement("select");
    for (const food of table.classes) {
      const option = document.createElement("option");
      option.value = String(food.id);
      option.textContent = food.name;
      option.selected = food.id === item.class_id;
      select.append(option);
    }
    select.addEventListener("change", () => {
      view.reassignClass(index, Number(select.value));
      paintItems(table);
    });

    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = String(Math.max(200, Math.ceil(item.grams * 4)));
    slider.step = "1";
    slider.value = String(item.grams);
    const gramsOut = document.createElement("span");
    gramsOut.textContent = `${formatAmount(item.grams)} g`;
    slider.addEventListener("input", () => {
      view.setGrams(index, Number(slider.value));
      paintItems(table);
    });

    const kcalOut = document.createElement("span");
    kcalOut.textContent = `${formatAmount(item.nutrients.kcal)} kcal`;

    const remove = document.createElement("button");
    remove.textContent = "delete";
    remove.addEventListener("click", () => {
      view.deleteItem(index);
      paintItems(table);
    });

    row.append(select, slider, gramsOut, kcalOut, remove);
    itemsBox.append(row);
  }
  totalsBox.textContent = `Totals: ${formatNutrients(view.totals())}`;
  logButton.disabled = !view.canLog();
}

logButton.addEventListener("click", async () => {
  try {
    const result = await correctionView!.log(session.currentImage?.name ?? "");
    logStatus.textContent = `Logged as ${result.entry_id}.`;
  } catch (err) {
    logStatus.textContent = `Logging failed: ${err}`;
  }
});

// ============================================
// DIARY VIEW
// ============================================

const diaryBox = el<HTMLDivElement>("diary");
const fromInput = el<HTMLInputElement>("from-date");
const toInput = el<HTMLInputElement>("to-date");

async function refreshDiary(): Promise<void> {
  diaryView.setRange(fromInput.value || undefined, toInput.value || undefined);
  try {
    await diaryView.refresh();
  } catch (err) {
    diaryBox.textContent = `Could not load the diary: ${err}`;
    return;
  }
  diaryBox.replaceChildren();
  if (diaryView.isEmpty()) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = diaryView.emptyMessage();
    diaryBox.append(empty);
    return;
  }
  if (!diaryView.totalsConsistent()) {
    const warn = document.createElement("p");
    warn.className = "warn";
    warn.textContent = "Daily totals disagree with the listed entries.";
    diaryBox.append(warn);
  }
  for (const group of diaryView.days()) {
    const head = document.createElement("h3");
    head.textContent = `${group.day} — ${formatNutrients(group.totals)}`;
    diaryBox.append(head);
    const list = document.createElement("ul");
    for (const entry of group.entries) {
      const li = document.createElement("li");
      const when = entry.timestamp.slice(11, 16);
      li.textContent = `${when} ${entry.image_ref || entry.entry_id}: ${formatNutrients(entry.meal.totals)}`;
      list.append(li);
    }
    diaryBox.append(list);
  }
}

el("refresh-diary").addEventListener("click", () => void refreshDiary());

// ============================================
// START
// ============================================

showTab("analyze");
void api.health().then(
  (h) => (el("backend-status").textContent = `backend: ${h.model} @ ${backend}`),
  () => (el("backend-status").textContent = `backend unreachable @ ${backend}`),
);
