/** DOM painting. Renders the whole screen from the store on every change;
 * no incremental bookkeeping, no logic beyond reading store fields. */

import type { MatchReportJson } from "./api.js";
import type { UiStore } from "./state.js";
import { buildTree, type TreeNode } from "./tree.js";

export interface Handlers {
  onLoadModel(text: string): void;
  onToggle(feature: string, state: "in" | "out"): void;
  onUndo(): void;
  onNextSolution(): void;
  onPreviousSolution(): void;
  onOptimize(attr: string, direction: "minimize" | "maximize"): void;
  onMatch(requirements: string, lexicon: string, metric: string): void;
  onApplyMusts(requirements: string, lexicon: string): void;
}

function el(tag: string, attrs: Record<string, string> = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function render(root: HTMLElement, store: UiStore, handlers: Handlers): void {
  root.textContent = "";
  root.appendChild(renderLoader(store, handlers));
  const diagnosticsPanel = renderDiagnostics(store);
  if (diagnosticsPanel) {
    root.appendChild(diagnosticsPanel);
  }
  if (!store.state.model || store.state.sessionId === null) {
    return;
  }
  root.appendChild(renderStatus(store, handlers));
  const banner = renderConflictBanner(store);
  if (banner) {
    root.appendChild(banner);
  }
  root.appendChild(renderTree(store, handlers));
  root.appendChild(renderSolutionsPanel(store, handlers));
  root.appendChild(renderOptimizePanel(store, handlers));
  root.appendChild(renderMatchPanel(store, handlers));
  if (store.state.lastError) {
    root.appendChild(el("div", { id: "error-line", class: "error" }, store.state.lastError));
  }
}

function renderLoader(store: UiStore, handlers: Handlers): HTMLElement {
  const section = el("section", { id: "loader" });
  section.appendChild(el("h2", {}, "Model"));
  const textarea = el("textarea", { id: "model-input", rows: "8" }) as HTMLTextAreaElement;
  const button = el("button", { id: "load-model" }, "Load model") as HTMLButtonElement;
  button.disabled = true;
  textarea.addEventListener("input", () => {
    button.disabled = textarea.value.trim() === "";
  });
  button.addEventListener("click", () => handlers.onLoadModel(textarea.value));
  section.appendChild(textarea);
  section.appendChild(button);
  if (store.state.model) {
    section.appendChild(el("span", { id: "model-name" }, store.state.model.name || "(unnamed)"));
  }
  return section;
}

function renderDiagnostics(store: UiStore): HTMLElement | null {
  if (store.state.diagnostics.length === 0) {
    return null;
  }
  const panel = el("section", { id: "diagnostics" });
  panel.appendChild(el("h2", {}, "Diagnostics"));
  const list = el("ul");
  for (const d of store.state.diagnostics) {
    list.appendChild(el(
      "li",
      { class: `diag-${d.severity}` },
      `${d.severity.toUpperCase()} ${d.code} ${d.subject.join(" ")} : ${d.message}`,
    ));
  }
  panel.appendChild(list);
  return panel;
}

function renderStatus(store: UiStore, handlers: Handlers): HTMLElement {
  const bar = el("section", { id: "status-bar" });
  bar.appendChild(el("span", { id: "session-status" }, `status: ${store.state.consequences?.status}`));
  const undo = el("button", { id: "undo" }, "Undo") as HTMLButtonElement;
  undo.disabled = store.decisionCount === 0;
  undo.addEventListener("click", () => handlers.onUndo());
  bar.appendChild(undo);
  return bar;
}

function renderConflictBanner(store: UiStore): HTMLElement | null {
  const conflict = store.state.consequences?.conflict;
  if (!store.conflicted || !conflict) {
    return null;
  }
  const banner = el("section", { id: "conflict-banner", class: "conflict" });
  banner.appendChild(el("h2", {}, "Conflict"));
  const what = conflict.violated
    ? `${conflict.provenance} (${conflict.violated})`
    : conflict.provenance;
  banner.appendChild(el("p", { id: "conflict-source" }, what));
  const trail = el("ol", { id: "conflict-trail" });
  for (const step of conflict.trail) {
    trail.appendChild(el("li", {}, `${step.feature} = ${step.value} (${step.reason})`));
  }
  banner.appendChild(trail);
  banner.appendChild(el("p", {}, "Undo the last decision to continue."));
  return banner;
}

function renderTree(store: UiStore, handlers: Handlers): HTMLElement {
  const section = el("section", { id: "tree" });
  section.appendChild(el("h2", {}, "Feature tree"));
  const model = store.state.model!;
  const rootNode = buildTree(model);
  const ghost = new Set(store.state.optimal?.result.configuration ?? []);
  section.appendChild(renderNode(rootNode, store, handlers, ghost));
  return section;
}

function renderNode(node: TreeNode, store: UiStore, handlers: Handlers, ghost: Set<string>): HTMLElement {
  const list = el("ul");
  const item = el("li", { "data-feature": node.id });
  const state = store.nodeState(node.id);
  item.classList.add(`state-${state}`);
  if (ghost.size > 0 && ghost.has(node.id)) {
    item.classList.add("ghost-optimal");
  }

  const label = el("span", { class: "label" }, node.id);
  item.appendChild(label);
  item.appendChild(el("span", { class: "kind" }, node.kindLabel));
  if (node.cardinalityBadge) {
    item.appendChild(el("span", { class: "badge cardinality" }, node.cardinalityBadge));
  }
  for (const badge of node.constraintBadges) {
    item.appendChild(el("span", { class: "badge constraint" }, badge));
  }
  item.appendChild(el("span", { class: "node-state" }, state));

  const canAct = !store.conflicted;
  const include = el("button", { class: "include" }, "select") as HTMLButtonElement;
  include.disabled = !canAct || state === "user-in";
  include.addEventListener("click", () => handlers.onToggle(node.id, "in"));
  const exclude = el("button", { class: "exclude" }, "exclude") as HTMLButtonElement;
  exclude.disabled = !canAct || state === "user-out";
  exclude.addEventListener("click", () => handlers.onToggle(node.id, "out"));
  item.appendChild(include);
  item.appendChild(exclude);

  for (const child of node.children) {
    item.appendChild(renderNode(child, store, handlers, ghost));
  }
  list.appendChild(item);
  return list;
}

function renderSolutionsPanel(store: UiStore, handlers: Handlers): HTMLElement {
  const panel = el("section", { id: "solutions-panel" });
  panel.appendChild(el("h2", {}, "Solutions"));
  const next = el("button", { id: "next-solution" }, "Next") as HTMLButtonElement;
  const previous = el("button", { id: "previous-solution" }, "Previous") as HTMLButtonElement;
  const disabled = store.conflicted;
  next.disabled = disabled || (store.state.exhausted
    && store.state.solutionIndex >= store.state.solutions.length - 1);
  previous.disabled = disabled || store.state.solutionIndex <= 0;
  next.addEventListener("click", () => handlers.onNextSolution());
  previous.addEventListener("click", () => handlers.onPreviousSolution());
  panel.appendChild(previous);
  panel.appendChild(next);
  const current = store.currentSolution();
  panel.appendChild(el("div", { id: "solution-card" }, current ? current.join(" ") : "(none yet)"));
  panel.appendChild(el("div", { id: "solution-counter" },
    store.state.solutionIndex >= 0 ? store.solutionCounter() : ""));
  return panel;
}

function renderOptimizePanel(store: UiStore, handlers: Handlers): HTMLElement {
  const panel = el("section", { id: "optimize-panel" });
  panel.appendChild(el("h2", {}, "Optimize"));
  const attrs = Object.keys(store.state.model?.attrs ?? {});
  const select = el("select", { id: "optimize-attr" }) as HTMLSelectElement;
  for (const attr of attrs) {
    select.appendChild(el("option", { value: attr }, attr));
  }
  const direction = el("select", { id: "optimize-direction" }) as HTMLSelectElement;
  direction.appendChild(el("option", { value: "minimize" }, "minimize"));
  direction.appendChild(el("option", { value: "maximize" }, "maximize"));
  const run = el("button", { id: "run-optimize" }, "Optimize") as HTMLButtonElement;
  run.disabled = store.conflicted || attrs.length === 0;
  run.addEventListener("click", () => handlers.onOptimize(
    select.value, direction.value as "minimize" | "maximize"));
  panel.appendChild(select);
  panel.appendChild(direction);
  panel.appendChild(run);
  const optimal = store.state.optimal;
  panel.appendChild(el("div", { id: "optimize-result" },
    optimal
      ? `${optimal.result.configuration.join(" ")} | ${optimal.attr} = ${optimal.result.value}`
      : ""));
  return panel;
}

function renderMatchPanel(store: UiStore, handlers: Handlers): HTMLElement {
  const panel = el("section", { id: "match-panel" });
  panel.appendChild(el("h2", {}, "Match requirements"));
  const reqs = el("textarea", { id: "match-reqs", rows: "3" }) as HTMLTextAreaElement;
  const lexicon = el("textarea", { id: "match-lexicon", rows: "3" }) as HTMLTextAreaElement;
  const metric = el("select", { id: "match-metric" }) as HTMLSelectElement;
  for (const name of ["dice", "jaccard", "cosine"]) {
    metric.appendChild(el("option", { value: name }, name));
  }
  const run = el("button", { id: "run-match" }, "Match") as HTMLButtonElement;
  run.disabled = store.conflicted;
  run.addEventListener("click", () => handlers.onMatch(reqs.value, lexicon.value, metric.value));
  panel.appendChild(reqs);
  panel.appendChild(lexicon);
  panel.appendChild(metric);
  panel.appendChild(run);

  const report = store.state.matchReport;
  if (report) {
    panel.appendChild(renderMatchReport(report));
    const apply = el("button", { id: "apply-musts" }, "Apply musts") as HTMLButtonElement;
    apply.disabled = store.conflicted;
    apply.addEventListener("click", () => handlers.onApplyMusts(reqs.value, lexicon.value));
    panel.appendChild(apply);
  }
  if (store.state.mustWarnings.length > 0) {
    const warnings = el("ul", { id: "must-warnings" });
    for (const warning of store.state.mustWarnings) {
      warnings.appendChild(el("li", {}, warning));
    }
    panel.appendChild(warnings);
  }
  return panel;
}

function renderMatchReport(report: MatchReportJson): HTMLElement {
  const container = el("div", { id: "match-report" });
  container.appendChild(el("div", { class: "match-params" },
    `metric=${report.metric} a=${report.a} b=${report.b} threshold=${report.threshold} gap=${report.gap}`));
  const table = el("table", { id: "match-rows" });
  for (const [rid, classification] of Object.entries(report.classification)) {
    const row = el("tr", { "data-requirement": rid });
    row.appendChild(el("td", {}, rid));
    if (classification.kind === "matched") {
      const feature = classification.features[0];
      const entry = report.entries.find(
        (e) => e.requirement === rid && e.feature === feature);
      row.appendChild(el("td", {}, `matched ${feature}`));
      row.appendChild(el("td", {}, entry ? `${report.metric} ${entry.score}` : ""));
    } else if (classification.kind === "ambiguous") {
      row.appendChild(el("td", {}, `ambiguous ${classification.features.join(" ")}`));
      row.appendChild(el("td", {}, ""));
    } else {
      row.appendChild(el("td", {}, "unmatched (capitalization candidate)"));
      row.appendChild(el("td", {}, ""));
    }
    table.appendChild(row);
  }
  container.appendChild(table);
  return container;
}
