/** Typed client for the derivation service. The UI talks to the backend
 * exclusively through this module; every screen state is painted from the
 * responses it returns. */

export interface Diagnostic {
  severity: string;
  code: string;
  subject: string[];
  message: string;
}

export interface FeatureJson {
  id: string;
  terms?: string[];
}

export interface EdgeJson {
  kind: "mandatory" | "optional";
  parent: string;
  child: string;
}

export interface GroupJson {
  id: string;
  parent: string;
  min: number;
  max: number;
  members: string[];
}

export interface ConstraintJson {
  kind: "requires" | "mutex";
  a: string;
  b: string;
}

export interface ModelJson {
  name: string;
  root: string;
  features: FeatureJson[];
  edges: EdgeJson[];
  groups: GroupJson[];
  constraints: ConstraintJson[];
  attrs: Record<string, Record<string, string>>;
}

export interface DecisionJson {
  feature: string;
  state: "in" | "out";
  origin: string;
}

export interface TrailStepJson {
  feature: string;
  value: number;
  reason: string;
}

export interface ConflictJson {
  violated: string | null;
  provenance: string;
  trail: TrailStepJson[];
}

export interface ConsequencesJson {
  forced_in: string[];
  forced_out: string[];
  open: string[];
  decided: DecisionJson[];
  status: string;
  conflict?: ConflictJson;
}

export interface LoadResult {
  model_id: number;
  diagnostics: Diagnostic[];
}

export interface ModelInfo {
  model_id: number;
  model: ModelJson;
  diagnostics: Diagnostic[];
}

export interface SessionStart {
  session_id: number;
  consequences: ConsequencesJson;
}

export interface SolutionsPage {
  configurations: string[][];
  exhausted: boolean;
}

export interface OptimizeResult {
  configuration: string[];
  value: string;
  totals: Record<string, string>;
}

export interface MatchEntryJson {
  requirement: string;
  feature: string;
  score: string;
}

export interface MatchReportJson {
  model: string;
  metric: string;
  a: string;
  b: string;
  threshold: string;
  gap: string;
  entries: MatchEntryJson[];
  classification: Record<string, { kind: string; features: string[] }>;
  capitalization_candidates: string[];
}

export interface MustsResult {
  consequences: ConsequencesJson;
  warnings: string[];
  capitalization_candidates: string[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: number,
    message: string,
    readonly details: unknown,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(response.status, body.code ?? 0, body.message ?? response.statusText, body.details);
  } catch {
    return new ApiError(response.status, 0, response.statusText, null);
  }
}

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown, raw?: string): Promise<T> {
    const headers: Record<string, string> = {};
    let payload: string | undefined;
    if (raw !== undefined) {
      headers["content-type"] = "text/plain";
      payload = raw;
    } else if (body !== undefined) {
      headers["content-type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, { method, headers, body: payload });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  loadModel(dslText: string): Promise<LoadResult> {
    return this.request("POST", "/models", undefined, dslText);
  }

  getModel(modelId: number): Promise<ModelInfo> {
    return this.request("GET", `/models/${modelId}`);
  }

  getCount(modelId: number): Promise<{ count: number }> {
    return this.request("GET", `/models/${modelId}/count`);
  }

  newSession(modelId: number): Promise<SessionStart> {
    return this.request("POST", `/models/${modelId}/sessions`);
  }

  decide(sessionId: number, feature: string, state: "in" | "out"): Promise<ConsequencesJson> {
    return this.request("POST", `/sessions/${sessionId}/decisions`, { feature, state });
  }

  undoLast(sessionId: number): Promise<ConsequencesJson> {
    return this.request("DELETE", `/sessions/${sessionId}/decisions/last`);
  }

  whatIf(sessionId: number, feature: string, state: "in" | "out"): Promise<ConsequencesJson> {
    return this.request("POST", `/sessions/${sessionId}/whatif`, { feature, state });
  }

  nextSolutions(sessionId: number, limit: number, restart = false): Promise<SolutionsPage> {
    const restartPart = restart ? "&restart=true" : "";
    return this.request("GET", `/sessions/${sessionId}/solutions?limit=${limit}${restartPart}`);
  }

  optimize(sessionId: number, attr: string, direction: "minimize" | "maximize"): Promise<OptimizeResult> {
    return this.request("POST", `/sessions/${sessionId}/optimize`, { attr, direction });
  }

  match(modelId: number, requirements: string, lexicon: string, metric: string): Promise<MatchReportJson> {
    return this.request("POST", `/models/${modelId}/match`, {
      requirements,
      lexicon,
      metric,
      threshold: "0.5",
      gap: "0.1",
    });
  }

  applyMusts(sessionId: number, requirements: string, lexicon: string): Promise<MustsResult> {
    return this.request("POST", `/sessions/${sessionId}/musts`, { requirements, lexicon });
  }
}
