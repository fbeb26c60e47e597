/** Payload shapes served by the analytics API (field names are stable). */

export interface OverviewRow {
  problem_type: string;
  correct: number;
  incorrect: number;
  skipped: number;
  skipped_hidden: boolean;
}

export interface SegmentPayload {
  kind: "correct" | "incorrect" | "hint";
  duration: number;
  kc: string;
  input: string;
}

export interface TimelineStepPayload {
  selection: string;
  segments: SegmentPayload[];
}

export interface TimelineBar {
  attempt_id: string;
  user_id: string;
  tutor: string;
  interface: string;
  start_state: string;
  start_time: string;
  completed: boolean;
  total_duration: number;
  steps: TimelineStepPayload[];
}

export interface PathPoint {
  step_index: number;
  cumulative_time: number;
}

export interface StepPath {
  attempt_id: string;
  user_id: string;
  start_time: string;
  points: PathPoint[];
  terminal: "complete" | "incomplete";
}

export interface ProblemTypePaths {
  problem_type: string;
  step_order: string[];
  paths: StepPath[];
}

export interface DetailStepPayload {
  selection: string;
  step_index: number;
  segments: SegmentPayload[];
}

export interface DetailPath extends StepPath {
  problem_type: string;
  step_order: string[];
  steps: DetailStepPayload[];
  total_duration: number;
}

export interface QueryMatch {
  stream_id: string;
  start: number;
  end: number;
  symbols: string;
}

export interface QueryResult {
  pattern: string;
  scope: string;
  same_step: boolean;
  matches: QueryMatch[];
}

/** Legend visibility for the outcome series in the Overview. */
export interface LegendToggles {
  correct: boolean;
  incorrect: boolean;
  skipped: boolean;
}

export type ViewMode = "overview" | "student" | "problem_type" | "details";

export interface ViewState {
  mode: ViewMode;
  studentId: string | null;
  problemType: string | null;
  attemptId: string | null;
  legend: LegendToggles;
}
