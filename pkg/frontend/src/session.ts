// Rating session state machine.
//
// Guarantees the UI relies on:
//  - submit is possible only when all three axes are selected;
//  - at most one submission is in flight;
//  - a failed submission is held locally (no score loss) until retried;
//  - a successful submission advances to the next task automatically.

import type { ApiClient } from "./api";
import { AXIS_KEYS, type AxisKey, type AxisScores, type RatingTask } from "./types";

export type SessionPhase = "idle" | "loading" | "rating" | "submitting" | "retry" | "done";

export interface PendingSubmission {
  videoId: string;
  scores: AxisScores;
}

export class RatingSession {
  phase: SessionPhase = "idle";
  task: RatingTask | null = null;
  selections: Partial<Record<AxisKey, number>> = {};
  pending: PendingSubmission | null = null;
  lastError = "";
  ratedCount = 0;

  private listeners: Array<() => void> = [];

  constructor(
    private readonly api: ApiClient,
    readonly raterId: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async start(): Promise<void> {
    this.phase = "loading";
    this.emit();
    await this.advance();
  }

  private async advance(): Promise<void> {
    try {
      const task = await this.api.fetchNextTask(this.raterId);
      this.task = task;
      this.selections = {};
      this.phase = task ? "rating" : "done";
      this.lastError = "";
    } catch (error) {
      this.phase = "retry";
      this.lastError = String(error);
    }
    this.emit();
  }

  select(axis: AxisKey, value: number): void {
    if (this.phase !== "rating") return;
    if (!Number.isInteger(value) || value < 1 || value > 10) return;
    this.selections[axis] = value;
    this.emit();
  }

  canSubmit(): boolean {
    return this.phase === "rating" && AXIS_KEYS.every((key) => this.selections[key] !== undefined);
  }

  async submit(): Promise<void> {
    if (!this.canSubmit() || !this.task) return;
    this.pending = {
      videoId: this.task.video_id,
      scores: {
        semantic_accuracy: this.selections.semantic_accuracy!,
        spatial_coherence: this.selections.spatial_coherence!,
        temporal_consistency: this.selections.temporal_consistency!,
      },
    };
    await this.sendPending();
  }

  async retry(): Promise<void> {
    if (this.phase !== "retry") return;
    if (this.pending) {
      await this.sendPending();
    } else {
      this.phase = "loading";
      this.emit();
      await this.advance();
    }
  }

  private async sendPending(): Promise<void> {
    if (!this.pending || this.phase === "submitting") return;
    const submission = this.pending;
    this.phase = "submitting";
    this.emit();
    try {
      await this.api.submitRating(this.raterId, submission.videoId, submission.scores);
      this.pending = null;
      this.ratedCount += 1;
      this.phase = "loading";
      this.emit();
      await this.advance();
    } catch (error) {
      // hold the submission locally; the banner offers a retry
      this.phase = "retry";
      this.lastError = String(error);
      this.emit();
    }
  }
}
