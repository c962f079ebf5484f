/** Single source of truth for everything painted on screen.
 *
 * The store only ever ingests service responses; no forced/open/conflict
 * fact is computed client-side. Rendering reads the store, never the
 * network. */

import type {
  ConsequencesJson,
  Diagnostic,
  MatchReportJson,
  ModelJson,
  OptimizeResult,
} from "./api.js";

export type NodeState = "user-in" | "user-out" | "forced-in" | "forced-out" | "open";

export interface UiState {
  modelId: number | null;
  model: ModelJson | null;
  diagnostics: Diagnostic[];
  sessionId: number | null;
  consequences: ConsequencesJson | null;
  totalCount: number | null;
  solutions: string[][];
  solutionIndex: number;
  exhausted: boolean;
  optimal: { result: OptimizeResult; attr: string } | null;
  matchReport: MatchReportJson | null;
  mustWarnings: string[];
  lastError: string | null;
}

function emptyState(): UiState {
  return {
    modelId: null,
    model: null,
    diagnostics: [],
    sessionId: null,
    consequences: null,
    totalCount: null,
    solutions: [],
    solutionIndex: -1,
    exhausted: false,
    optimal: null,
    matchReport: null,
    mustWarnings: [],
    lastError: null,
  };
}

export class UiStore {
  state: UiState = emptyState();

  reset(): void {
    this.state = emptyState();
  }

  applyModel(modelId: number, model: ModelJson, diagnostics: Diagnostic[]): void {
    this.reset();
    this.state.modelId = modelId;
    this.state.model = model;
    this.state.diagnostics = diagnostics;
  }

  applyDiagnosticsOnly(diagnostics: Diagnostic[]): void {
    this.reset();
    this.state.diagnostics = diagnostics;
  }

  applySession(sessionId: number, consequences: ConsequencesJson): void {
    this.state.sessionId = sessionId;
    this.applyConsequences(consequences);
  }

  applyCount(count: number): void {
    this.state.totalCount = count;
  }

  /** Every decision/undo/musts response lands here; the previous solution
   * ring and optimization ghost are stale afterwards and are dropped. */
  applyConsequences(consequences: ConsequencesJson): void {
    this.state.consequences = consequences;
    this.state.solutions = [];
    this.state.solutionIndex = -1;
    this.state.exhausted = false;
    this.state.optimal = null;
    this.state.lastError = null;
  }

  applySolutionsPage(configurations: string[][], exhausted: boolean): void {
    this.state.solutions.push(...configurations);
    this.state.exhausted = exhausted;
    if (configurations.length > 0) {
      this.state.solutionIndex = this.state.solutions.length - 1;
    }
  }

  showPreviousSolution(): void {
    if (this.state.solutionIndex > 0) {
      this.state.solutionIndex -= 1;
    }
  }

  showSolutionFromRing(index: number): void {
    if (index >= 0 && index < this.state.solutions.length) {
      this.state.solutionIndex = index;
    }
  }

  applyOptimal(result: OptimizeResult, attr: string): void {
    this.state.optimal = { result, attr };
    this.state.lastError = null;
  }

  applyMatchReport(report: MatchReportJson): void {
    this.state.matchReport = report;
    this.state.lastError = null;
  }

  applyMustWarnings(warnings: string[]): void {
    this.state.mustWarnings = warnings;
  }

  applyError(message: string): void {
    this.state.lastError = message;
  }

  get conflicted(): boolean {
    return this.state.consequences?.status === "conflicted";
  }

  get complete(): boolean {
    return this.state.consequences?.status === "complete";
  }

  get decisionCount(): number {
    return this.state.consequences?.decided.length ?? 0;
  }

  /** State badge for one tree node, straight from the latest response:
   * a user decision wins, then the forced sets, otherwise open. */
  nodeState(featureId: string): NodeState {
    const consequences = this.state.consequences;
    if (!consequences) {
      return "open";
    }
    const decided = consequences.decided.find((d) => d.feature === featureId);
    if (decided) {
      return decided.state === "in" ? "user-in" : "user-out";
    }
    if (consequences.forced_in.includes(featureId)) {
      return "forced-in";
    }
    if (consequences.forced_out.includes(featureId)) {
      return "forced-out";
    }
    return "open";
  }

  currentSolution(): string[] | null {
    if (this.state.solutionIndex < 0) {
      return null;
    }
    return this.state.solutions[this.state.solutionIndex] ?? null;
  }

  solutionCounter(): string {
    const shown = this.state.solutionIndex + 1;
    const found = this.state.solutions.length;
    if (this.state.exhausted) {
      return `${shown} / ${found} found`;
    }
    if (this.state.totalCount !== null && this.decisionCount === 0) {
      return `${shown} / ${this.state.totalCount} found`;
    }
    return `${shown} / ${found}+ found`;
  }
}
