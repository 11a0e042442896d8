// Wire types for the diagram service. These mirror the service's JSON
// schemas; the UI treats the service as the single source of truth and
// never recomputes any of these values.

export const STRATEGIES = [
  { slug: "baseline", label: "Baseline" },
  { slug: "minimal", label: "Minimal context" },
  { slug: "guided", label: "Guided prompts" },
  { slug: "two-stage", label: "Two-stage" },
] as const;

export type StrategySlug = (typeof STRATEGIES)[number]["slug"];

export type LoopKind = "Reinforcing" | "Balancing";

export interface LoopInfo {
  length: number;
  kind: LoopKind;
  members: string[];
}

export interface GenerateResponse {
  digraph: string | null;
  render_dot: string | null;
  variables: string[];
  loops: LoopInfo[];
  diagnostics: string[];
  transcripts_id: string;
}

export interface ScoreTriple {
  precision: number;
  recall: number;
  f1: number;
}

export interface EvaluateResponse {
  node: ScoreTriple;
  link_strict: ScoreTriple;
  link_lenient: ScoreTriple;
  polarity_accuracy: number | null;
  loops: {
    generated: [number, LoopKind][];
    truth: [number, LoopKind][];
    loop_count_match: boolean;
    loop_kind_multiset_match: boolean;
  };
  matching: {
    pairs: [string, string, number][];
    unmatched_generated: string[];
    unmatched_truth: string[];
  };
}

export interface CorpusIndexEntry {
  id: string;
  source: string;
  variable_count: number;
  loop_summary: [number, LoopKind][];
}

export interface CorpusItemDetail {
  id: string;
  dh: string;
  digraph: string;
  render_dot: string;
  source: string;
  expected_loops: [number, LoopKind][] | null;
  variables: string[];
  loops: LoopInfo[];
}

export interface TranscriptsResponse {
  transcripts: [string, string][];
}

export interface HealthResponse {
  status: string;
  provider: string;
}
