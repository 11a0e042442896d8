import type { GenerateResponse, StrategySlug } from "./types";

export interface HistoryEntry {
  dh: string;
  strategy: StrategySlug;
  digraph: string | null;
  response: GenerateResponse;
}

/**
 * Per-tab session state. Nothing is persisted — a reload starts clean —
 * and the history list only ever grows within the session.
 */
export class SessionState {
  draft = "";
  strategy: StrategySlug = "two-stage";
  shots = 3;
  lastGeneration: GenerateResponse | null = null;
  selectedCorpusId: string | null = null;

  private readonly entries: HistoryEntry[] = [];

  get history(): readonly HistoryEntry[] {
    return this.entries;
  }

  recordGeneration(
    dh: string,
    strategy: StrategySlug,
    response: GenerateResponse,
  ): HistoryEntry {
    const entry: HistoryEntry = { dh, strategy, digraph: response.digraph, response };
    this.entries.push(entry);
    this.lastGeneration = response;
    return entry;
  }

  /** Re-select a past generation (for history navigation; no network). */
  recall(index: number): HistoryEntry | undefined {
    const entry = this.entries[index];
    if (entry) this.lastGeneration = entry.response;
    return entry;
  }
}
