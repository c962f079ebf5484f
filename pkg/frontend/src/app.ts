/** Wiring: every user action maps to exactly one API call, responses land
 * in the store, and the whole screen repaints from the store. Mutating
 * requests are funneled through a single queue so at most one is in
 * flight per session. */

import { ApiClient, ApiError } from "./api.js";
import { render, type Handlers } from "./render.js";
import { UiStore } from "./state.js";

export class App {
  readonly store = new UiStore();
  private queue: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {}

  start(): void {
    this.paint();
  }

  paint(): void {
    render(this.root, this.store, this.handlers());
  }

  /** Serialize actions: clicks that arrive while a request is in flight
   * run afterwards, in order. */
  enqueue(action: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(async () => {
      try {
        await action();
      } catch (error) {
        this.store.applyError(error instanceof Error ? error.message : String(error));
      }
      this.paint();
    });
    return this.queue;
  }

  private handlers(): Handlers {
    return {
      onLoadModel: (text) => void this.loadModel(text),
      onToggle: (feature, state) => void this.toggle(feature, state),
      onUndo: () => void this.undo(),
      onNextSolution: () => void this.nextSolution(),
      onPreviousSolution: () => void this.previousSolution(),
      onOptimize: (attr, direction) => void this.optimize(attr, direction),
      onMatch: (reqs, lexicon, metric) => void this.match(reqs, lexicon, metric),
      onApplyMusts: (reqs, lexicon) => void this.applyMusts(reqs, lexicon),
    };
  }

  loadModel(text: string): Promise<void> {
    return this.enqueue(async () => {
      let loaded;
      try {
        loaded = await this.client.loadModel(text);
      } catch (error) {
        if (error instanceof ApiError && error.status === 422
            && Array.isArray(error.details) && error.details.length > 0) {
          // invalid model: show the diagnostics panel, no tree
          this.store.applyDiagnosticsOnly(error.details as never[]);
          return;
        }
        throw error;
      }
      const info = await this.client.getModel(loaded.model_id);
      this.store.applyModel(loaded.model_id, info.model, info.diagnostics);
      const session = await this.client.newSession(loaded.model_id);
      this.store.applySession(session.session_id, session.consequences);
      const count = await this.client.getCount(loaded.model_id);
      this.store.applyCount(count.count);
    });
  }

  toggle(feature: string, state: "in" | "out"): Promise<void> {
    return this.enqueue(async () => {
      const sessionId = this.store.state.sessionId;
      if (sessionId === null) {
        return;
      }
      try {
        const consequences = await this.client.decide(sessionId, feature, state);
        this.store.applyConsequences(consequences);
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          // an existing determination: surface it without changing state
          this.store.applyError(error.message);
          return;
        }
        throw error;
      }
    });
  }

  undo(): Promise<void> {
    return this.enqueue(async () => {
      const sessionId = this.store.state.sessionId;
      if (sessionId === null) {
        return;
      }
      const consequences = await this.client.undoLast(sessionId);
      this.store.applyConsequences(consequences);
    });
  }

  nextSolution(): Promise<void> {
    return this.enqueue(async () => {
      const { sessionId, solutionIndex, solutions } = {
        sessionId: this.store.state.sessionId,
        solutionIndex: this.store.state.solutionIndex,
        solutions: this.store.state.solutions,
      };
      if (sessionId === null) {
        return;
      }
      // walk the already fetched ring first (previous/next without refetch)
      if (solutionIndex < solutions.length - 1) {
        this.store.showSolutionFromRing(solutionIndex + 1);
        return;
      }
      if (this.store.state.exhausted) {
        return;
      }
      const page = await this.client.nextSolutions(sessionId, 1);
      this.store.applySolutionsPage(page.configurations, page.exhausted);
    });
  }

  previousSolution(): Promise<void> {
    return this.enqueue(async () => {
      this.store.showPreviousSolution();
    });
  }

  optimize(attr: string, direction: "minimize" | "maximize"): Promise<void> {
    return this.enqueue(async () => {
      const sessionId = this.store.state.sessionId;
      if (sessionId === null) {
        return;
      }
      const result = await this.client.optimize(sessionId, attr, direction);
      this.store.applyOptimal(result, attr);
    });
  }

  match(requirements: string, lexicon: string, metric: string): Promise<void> {
    return this.enqueue(async () => {
      const modelId = this.store.state.modelId;
      if (modelId === null) {
        return;
      }
      const report = await this.client.match(modelId, requirements, lexicon, metric);
      this.store.applyMatchReport(report);
    });
  }

  applyMusts(requirements: string, lexicon: string): Promise<void> {
    return this.enqueue(async () => {
      const sessionId = this.store.state.sessionId;
      if (sessionId === null) {
        return;
      }
      try {
        const result = await this.client.applyMusts(sessionId, requirements, lexicon);
        this.store.applyConsequences(result.consequences);
        this.store.applyMustWarnings(result.warnings);
      } catch (error) {
        if (error instanceof ApiError && error.status === 409
            && error.details && typeof error.details === "object"
            && "consequences" in (error.details as Record<string, unknown>)) {
          // conflicting musts: the session is now conflicted; paint it
          const details = error.details as {
            consequences: { forced_in: string[] } };
          this.store.applyConsequences(details.consequences as never);
          return;
        }
        throw error;
      }
    });
  }
}

export function createApp(root: HTMLElement, client: ApiClient = new ApiClient()): App {
  const app = new App(root, client);
  app.start();
  return app;
}
