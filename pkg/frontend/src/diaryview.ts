import { ApiClient } from "./api.js";
import { formatAmount, sumNutrients } from "./nutrients.js";
import { SessionState } from "./session.js";
import type { DiaryEntryWire, DiaryListResponse, Nutrients } from "./wire.js";

export interface DayGroup {
  day: string;
  entries: DiaryEntryWire[];
  /** The server's figure for the day, displayed as-is. */
  totals: Nutrients;
}

/**
 * Diary view: entries for the selected range grouped by UTC day, each day
 * headed by the server's daily totals. The client re-sums the entries it
 * shows and flags any disagreement with the served totals instead of hiding
 * it — the two must match, since both sides derive from the same entries.
 */
export class DiaryView {
  private listing: DiaryListResponse | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly session: SessionState,
  ) {}

  async refresh(): Promise<void> {
    const { from, to } = this.session.diaryRange;
    this.listing = await this.api.diaryList(from, to);
  }

  setRange(from?: string, to?: string): void {
    this.session.diaryRange = { from, to };
  }

  isEmpty(): boolean {
    return this.listing === null || this.listing.entries.length === 0;
  }

  /** Message for the zero-state screen when the range holds nothing. */
  emptyMessage(): string {
    const { from, to } = this.session.diaryRange;
    if (from || to) return "No meals logged in this range.";
    return "No meals logged yet — analyze a photo and log your first one.";
  }

  days(): DayGroup[] {
    if (!this.listing) return [];
    const byDay = new Map<string, DiaryEntryWire[]>();
    for (const entry of this.listing.entries) {
      const day = entry.timestamp.slice(0, 10);
      const bucket = byDay.get(day);
      if (bucket) bucket.push(entry);
      else byDay.set(day, [entry]);
    }
    return [...byDay.keys()].sort().map((day) => ({
      day,
      entries: byDay.get(day)!,
      totals: this.listing!.daily_totals[day] ?? sumNutrients(byDay.get(day)!.map((e) => e.meal.totals)),
    }));
  }

  /** Sum of the displayed entries' totals for one day. */
  entrySum(day: string): Nutrients {
    const group = this.days().find((g) => g.day === day);
    return sumNutrients((group?.entries ?? []).map((e) => e.meal.totals));
  }

  /**
   * True when every day's served total agrees with the sum of its entries
   * at display precision. A false here means server and client disagree
   * about the same numbers and the UI shows a warning badge.
   */
  totalsConsistent(): boolean {
    return this.days().every((group) => {
      const sum = this.entrySum(group.day);
      return (["kcal", "protein", "carb", "fat"] as const).every(
        (key) => formatAmount(sum[key]) === formatAmount(group.totals[key]),
      );
    });
  }
}
