// Wire types mirroring the rating service API.

export interface RubricAxis {
  key: AxisKey;
  title: string;
  description: string;
}

export type AxisKey = "semantic_accuracy" | "spatial_coherence" | "temporal_consistency";

export const AXIS_KEYS: AxisKey[] = [
  "semantic_accuracy",
  "spatial_coherence",
  "temporal_consistency",
];

export interface RatingTask {
  task_id: string;
  video_id: string;
  original_media_url: string;
  edited_media_url: string;
  edit_prompt: string;
  rubric: RubricAxis[];
}

export interface AxisScores {
  semantic_accuracy: number;
  spatial_coherence: number;
  temporal_consistency: number;
}

export interface SubmittedRecord {
  video_id: string;
  rater_id: string;
  raw_score: number;
  normalized: number;
  timestamp: string;
}

export interface AggregateScore {
  video_id: string;
  mean_normalized: number;
  n_raters: number;
  per_axis: number[];
}
