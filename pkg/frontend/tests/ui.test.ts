/** End-to-end DOM tests of the configurator: real rendering and event
 * wiring, service responses replayed from the recorded contract fixtures. */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, createApp } from "../src/app.js";
import { fixtureEntry, makeStubFetch, modelTextByStatus } from "./stub.js";

let root: HTMLElement;
let app: App;
let requests: string[];

function settle(): Promise<void> {
  return app.enqueue(async () => {});
}

async function loadText(text: string): Promise<void> {
  const input = root.querySelector<HTMLTextAreaElement>("#model-input")!;
  input.value = text;
  input.dispatchEvent(new Event("input"));
  root.querySelector<HTMLButtonElement>("#load-model")!.click();
  await settle();
}

async function loadModel(): Promise<void> {
  await loadText(modelTextByStatus(201));
}

function node(feature: string): HTMLElement {
  const item = root.querySelector<HTMLElement>(`li[data-feature="${feature}"]`);
  expect(item, `tree node ${feature}`).toBeTruthy();
  return item!;
}

function nodeState(feature: string): string {
  return node(feature).querySelector<HTMLElement>(".node-state")!.textContent!;
}

function clickSelect(feature: string): Promise<void> {
  node(feature).querySelector<HTMLButtonElement>(":scope > button.include")!.click();
  return settle();
}

function clickExclude(feature: string): Promise<void> {
  node(feature).querySelector<HTMLButtonElement>(":scope > button.exclude")!.click();
  return settle();
}

function clickUndo(): Promise<void> {
  root.querySelector<HTMLButtonElement>("#undo")!.click();
  return settle();
}

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
  const stub = makeStubFetch();
  requests = stub.requests;
  app = createApp(root, new ApiClient("", stub.fetchFn));
});

describe("load screen", () => {
  it("disables submit on empty input", () => {
    const button = root.querySelector<HTMLButtonElement>("#load-model")!;
    expect(button.disabled).toBe(true);
    const input = root.querySelector<HTMLTextAreaElement>("#model-input")!;
    input.value = "root R";
    input.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(false);
  });

  it("shows diagnostics and no tree for an invalid model", async () => {
    await loadText(modelTextByStatus(422));
    const diagnostics = root.querySelector("#diagnostics");
    expect(diagnostics).toBeTruthy();
    expect(diagnostics!.textContent).toContain("CYCLE");
    expect(root.querySelector("#tree")).toBeNull();
  });

  it("renders the tree with badges after loading", async () => {
    await loadModel();
    expect(root.querySelectorAll("li[data-feature]").length).toBe(6);
    expect(node("C").textContent).toContain("[1..2]");
    expect(node("D").textContent).toContain("[1..2]");
    expect(node("D").textContent).toContain("mutex E");
    expect(node("E").textContent).toContain("mutex D");
    expect(node("B").textContent).toContain("requires C");
    // the mandatory core is already painted as forced
    expect(nodeState("R")).toBe("forced-in");
    expect(nodeState("A")).toBe("forced-in");
    expect(nodeState("B")).toBe("open");
  });
});

describe("decision toggling (state fidelity)", () => {
  it("paints D forced-out and keeps B, C open after selecting E", async () => {
    await loadModel();
    await clickSelect("E");
    expect(nodeState("E")).toBe("user-in");
    expect(nodeState("D")).toBe("forced-out");
    expect(node("D").classList.contains("state-forced-out")).toBe(true);
    expect(nodeState("B")).toBe("open");
    expect(nodeState("C")).toBe("open");
    expect(requests).toContain("POST /sessions/1/decisions");
  });

  it("undo restores the previous paint state", async () => {
    await loadModel();
    await clickSelect("E");
    await clickUndo();
    expect(nodeState("E")).toBe("open");
    expect(nodeState("D")).toBe("open");
    expect(root.querySelector("#conflict-banner")).toBeNull();
  });

  it("shows the conflict banner with the trail after excluding A", async () => {
    await loadModel();
    await clickSelect("E");
    await clickUndo();
    await clickExclude("A");
    const banner = root.querySelector<HTMLElement>("#conflict-banner");
    expect(banner).toBeTruthy();
    expect(banner!.textContent).toContain("mandatory R A");
    const steps = banner!.querySelectorAll("#conflict-trail li");
    expect(steps.length).toBeGreaterThanOrEqual(3);
    expect(banner!.textContent).toContain("user decision");
    // panels are disabled, not hidden
    expect(root.querySelector<HTMLButtonElement>("#next-solution")!.disabled).toBe(true);
    expect(root.querySelector<HTMLButtonElement>("#run-optimize")!.disabled).toBe(true);
    expect(root.querySelector<HTMLButtonElement>("#run-match")!.disabled).toBe(true);
    await clickUndo();
    expect(root.querySelector("#conflict-banner")).toBeNull();
  });
});

describe("solution browser", () => {
  async function browseAll(): Promise<void> {
    await loadModel();
    await clickSelect("E");
    await clickUndo();
    await clickExclude("A");
    await clickUndo();
    for (let i = 0; i < 9; i += 1) {
      root.querySelector<HTMLButtonElement>("#next-solution")!.click();
      await settle();
    }
  }

  it("walks every solution and reports 8 / 8 found", async () => {
    await browseAll();
    expect(root.querySelector("#solution-counter")!.textContent).toBe("8 / 8 found");
    expect(root.querySelector<HTMLButtonElement>("#next-solution")!.disabled).toBe(true);
  });

  it("first two cards follow the solver order", async () => {
    await loadModel();
    await clickSelect("E");
    await clickUndo();
    await clickExclude("A");
    await clickUndo();
    root.querySelector<HTMLButtonElement>("#next-solution")!.click();
    await settle();
    expect(root.querySelector("#solution-card")!.textContent).toBe("A E R");
    expect(root.querySelector("#solution-counter")!.textContent).toBe("1 / 8 found");
    root.querySelector<HTMLButtonElement>("#next-solution")!.click();
    await settle();
    expect(root.querySelector("#solution-card")!.textContent).toBe("A D R");
    expect(root.querySelector("#solution-counter")!.textContent).toBe("2 / 8 found");
    // previous walks the client-side ring without refetching
    const fetches = requests.filter((r) => r.includes("/solutions")).length;
    root.querySelector<HTMLButtonElement>("#previous-solution")!.click();
    await settle();
    expect(root.querySelector("#solution-card")!.textContent).toBe("A E R");
    expect(requests.filter((r) => r.includes("/solutions")).length).toBe(fetches);
  });
});

describe("optimize and match panels", () => {
  async function fullFlow(): Promise<void> {
    await loadModel();
    await clickSelect("E");
    await clickUndo();
    await clickExclude("A");
    await clickUndo();
    for (let i = 0; i < 9; i += 1) {
      root.querySelector<HTMLButtonElement>("#next-solution")!.click();
      await settle();
    }
  }

  it("shows the optimum and ghost-highlights it on the tree", async () => {
    await fullFlow();
    root.querySelector<HTMLButtonElement>("#run-optimize")!.click();
    await settle();
    expect(root.querySelector("#optimize-result")!.textContent).toBe("A D R | cost = 4");
    expect(node("D").classList.contains("ghost-optimal")).toBe(true);
    expect(node("A").classList.contains("ghost-optimal")).toBe(true);
    expect(node("E").classList.contains("ghost-optimal")).toBe(false);
  });

  it("lists match rows and applies musts", async () => {
    await fullFlow();
    root.querySelector<HTMLButtonElement>("#run-optimize")!.click();
    await settle();

    const matchBody = fixtureEntry("POST", "/models/1/match").body as {
      requirements: string; lexicon: string };
    let reqsBox = root.querySelector<HTMLTextAreaElement>("#match-reqs")!;
    let lexBox = root.querySelector<HTMLTextAreaElement>("#match-lexicon")!;
    reqsBox.value = matchBody.requirements;
    lexBox.value = matchBody.lexicon;
    root.querySelector<HTMLButtonElement>("#run-match")!.click();
    await settle();

    const s1 = root.querySelector<HTMLElement>('tr[data-requirement="S1"]')!;
    expect(s1.textContent).toContain("matched C");
    expect(s1.textContent).toContain("dice 0.75");
    const s2 = root.querySelector<HTMLElement>('tr[data-requirement="S2"]')!;
    expect(s2.textContent).toContain("unmatched (capitalization candidate)");

    const mustsBody = fixtureEntry("POST", "/sessions/1/musts").body as {
      requirements: string; lexicon: string };
    reqsBox = root.querySelector<HTMLTextAreaElement>("#match-reqs")!;
    lexBox = root.querySelector<HTMLTextAreaElement>("#match-lexicon")!;
    reqsBox.value = mustsBody.requirements;
    lexBox.value = mustsBody.lexicon;
    root.querySelector<HTMLButtonElement>("#apply-musts")!.click();
    await settle();

    expect(nodeState("E")).toBe("user-in");
    expect(nodeState("D")).toBe("forced-out");
  });
});

describe("action queue", () => {
  it("serializes rapid clicks in arrival order", async () => {
    await loadModel();
    await clickSelect("E");
    await clickUndo();
    await clickExclude("A");
    await clickUndo();
    const next = root.querySelector<HTMLButtonElement>("#next-solution")!;
    next.click();
    next.click(); // queued while the first request is in flight
    await settle();
    const card = root.querySelector("#solution-card")!.textContent;
    expect(card).toBe("A D R");
    expect(root.querySelector("#solution-counter")!.textContent).toBe("2 / 8 found");
  });
});
