// Wire types mirroring the service JSON.

export interface ContinuousDomain {
  class: 'continuous';
  min: number;
  max: number;
  step: number;
  unit: string;
}

export interface DiscreteDomain {
  class: 'discrete';
  options: Array<number | string>;
}

export interface ColorDomain {
  class: 'color';
  notation: string;
}

export interface PositionDomain {
  class: 'position';
  width: number;
  height: number;
}

export type ValueDomain = ContinuousDomain | DiscreteDomain | ColorDomain | PositionDomain;

export interface PresetDoc {
  value: number | string;
  caption: string;
  preview: string;
}

export interface ControlSpecDoc {
  kind: string;
  label: string;
  parameter: string;
  value_domain: ValueDomain;
  presets?: PresetDoc[];
}

export interface WeightedControlDoc {
  kind: string;
  weight: number;
  score: number;
  rationale: string;
}

export interface RecommendationDoc {
  task: string;
  n_runs: number;
  per_aspect: Record<string, WeightedControlDoc[]>;
}

export interface GenerateResponse {
  recommendation: RecommendationDoc;
  specs: ControlSpecDoc[];
  condition: string;
}

export interface TaskDoc {
  name: string;
  description: string;
  requirements?: string[];
  goal_style?: string;
}

export interface TasksResponse {
  dataset_tasks: TaskDoc[];
  evaluation_tasks: TaskDoc[];
}

export interface SummaryCell {
  task: string;
  aspect: string;
  total: number;
  counts: Record<string, number>;
}

export interface SummaryResponse {
  provenance: string;
  respondents_per_cell: number;
  total_pieces: number;
  cells: SummaryCell[];
}

export interface AssignmentItemDoc {
  task: string;
  aspect: string;
  pair: [string, string];
}

export interface AssignmentDoc {
  participant: string;
  task_set: number;
  permutation_index: number;
  latin_row: number;
  items: AssignmentItemDoc[];
}

export interface PreferenceVote {
  participant: string;
  task: string;
  aspect: string;
  kind: string;
  reason?: string;
  condition?: string;
}

export interface ComparisonVote {
  participant: string;
  task: string;
  aspect: string;
  left: string;
  right: string;
  chosen: string;
}

// Values emitted by rendered controls.
export type ControlValue = number | string | { x: number; y: number };
