/** Feedback draft state: rank ordering, exclusions, specificity sliders.
 *
 * The composer keeps the ranked rules as an ordered list (drag-to-rank
 * reorders it); ranks are always the dense positions 1..k. Excluding a
 * rule removes any rank it had, so a draft can never rank and exclude
 * the same rule. `draft()` emits a complete UserFeedback payload.
 */

import { UserFeedback, UserFeedbackSchema } from "./schema.js";

export class FeedbackComposer {
  private order: string[] = [];
  private excluded = new Set<string>();
  private minScore: number | null = null;
  private minCorrelation: number | null = null;

  constructor(readonly ruleIds: string[]) {}

  private assertKnown(id: string): void {
    if (!this.ruleIds.includes(id)) {
      throw new Error(`unknown rule id ${id}`);
    }
  }

  rankedIds(): string[] {
    return [...this.order];
  }

  excludedIds(): string[] {
    return [...this.excluded].sort();
  }

  /** Append to the ranking (no-op when already ranked). */
  addRank(id: string): void {
    this.assertKnown(id);
    this.excluded.delete(id);
    if (!this.order.includes(id)) this.order.push(id);
  }

  /** Drag-to-rank: move a ranked rule to a target position (0-based). */
  moveTo(id: string, position: number): void {
    const from = this.order.indexOf(id);
    if (from < 0) return;
    this.order.splice(from, 1);
    const clamped = Math.max(0, Math.min(position, this.order.length));
    this.order.splice(clamped, 0, id);
  }

  clearRank(id: string): void {
    this.order = this.order.filter((r) => r !== id);
  }

  toggleExclude(id: string): void {
    this.assertKnown(id);
    if (this.excluded.has(id)) {
      this.excluded.delete(id);
    } else {
      this.excluded.add(id);
      this.clearRank(id);
    }
  }

  excludeAll(): void {
    for (const id of this.ruleIds) this.toggleExcludeOn(id);
  }

  private toggleExcludeOn(id: string): void {
    this.excluded.add(id);
    this.clearRank(id);
  }

  setMinScore(value: number | null): void {
    if (value !== null && (value < 0 || value > 1)) {
      throw new Error("min score slider is within [0, 1]");
    }
    this.minScore = value;
  }

  setMinCorrelation(value: number | null): void {
    if (value !== null && (value < 0 || value > 1)) {
      throw new Error("min correlation slider is within [0, 1]");
    }
    this.minCorrelation = value;
  }

  rankOf(id: string): number | null {
    const pos = this.order.indexOf(id);
    return pos >= 0 ? pos + 1 : null;
  }

  isExcluded(id: string): boolean {
    return this.excluded.has(id);
  }

  /** Complete UserFeedback payload; always schema-valid. */
  draft(): UserFeedback {
    const rankings: Record<string, number> = {};
    this.order.forEach((id, pos) => {
      rankings[id] = pos + 1;
    });
    const payload: UserFeedback = {
      rankings,
      exclusions: this.excludedIds(),
    };
    if (this.minScore !== null || this.minCorrelation !== null) {
      payload.specificity = {};
      if (this.minScore !== null) payload.specificity.min_score = this.minScore;
      if (this.minCorrelation !== null) {
        payload.specificity.min_correlation = this.minCorrelation;
      }
    }
    return UserFeedbackSchema.parse(payload);
  }
}
