// The full interactive loop against a conversation recorded from the real
// session service: load a fixture, mark two publications by clicking them,
// drill down with intermediates, expand with successors at threshold 2,
// then navigate back and forward. After every step the number of rendered
// nodes must equal the service-reported member count capped by the display
// count, hovering shows the four bibliographic fields, and marked
// publications render as squares.

import { beforeEach, describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { ExplorerApp } from "../src/app.js";
import { approximateMeasure } from "../src/renderer.js";
import type { Frame, SessionState } from "../src/types.js";
import { RecordingContext, mouseEventAt, replayFetch, type Exchange } from "./helpers.js";
import fixture from "./fixtures/ui-session.json";

const DISPLAY_COUNT = 40;
const exchanges = fixture.exchanges as unknown as Exchange[];

function expectedRendered(state: SessionState): number {
  return Math.min(state.counts.publications, DISPLAY_COUNT);
}

describe("explorer loop", () => {
  let app: ExplorerApp;
  let ctx: RecordingContext;
  let canvasEl: HTMLElement;
  let root: HTMLElement;
  let replay: ReturnType<typeof replayFetch>;

  beforeEach(() => {
    document.body.innerHTML = "";
    root = document.createElement("div");
    document.body.append(root);
    ctx = new RecordingContext();
    canvasEl = document.createElement("div");
    replay = replayFetch(exchanges);
    const api = new ApiClient("/v1", replay.impl);
    app = new ExplorerApp(root, api, {
      element: canvasEl,
      width: 1100,
      height: 720,
      context: ctx,
      measure: approximateMeasure,
    });
  });

  function clickNode(id: string): Promise<void> {
    const scene = app.currentScene()!;
    const node = scene.nodes.find((n) => n.id === id)!;
    expect(node).toBeDefined();
    canvasEl.dispatchEvent(mouseEventAt("mousedown", node.x, node.y));
    canvasEl.dispatchEvent(mouseEventAt("mouseup", node.x, node.y));
    return app.whenIdle();
  }

  function assertRenderedMatchesService(): void {
    const s = app.store.get();
    const want = expectedRendered(s.service!);
    expect(app.currentScene()!.nodes).toHaveLength(want);
    expect(ctx.markers()).toHaveLength(want);
  }

  it("marks, drills with intermediates, expands with successors, navigates history", async () => {
    // step 1: load the fixture through the create endpoint
    const createBody = exchanges[0].body as { publications: string; citations: string };
    await app.openPairs(createBody.publications, createBody.citations);
    const initial = app.store.get().service!;
    expect(initial.counts.publications).toBe(2500);
    assertRenderedMatchesService();

    // step 2: mark two publications by clicking their markers
    const markA = (exchanges[2].body as { ids: string[] }).ids[0];
    const markB = (exchanges[4].body as { ids: string[] }).ids[0];
    await clickNode(markA);
    assertRenderedMatchesService();
    await clickNode(markB);
    assertRenderedMatchesService();
    expect(app.store.get().service!.marked.sort()).toEqual([markA, markB].sort());

    // marked publications render as squares
    const squares = ctx.markers().filter((m) => m.kind === "rect");
    expect(squares).toHaveLength(2);
    const frameNow = app.store.get().frame!;
    expect(frameNow.nodes.filter((n) => n.marked).map((n) => n.id).sort())
      .toEqual([markA, markB].sort());

    // hover shows the four bibliographic fields in the left pane
    const scene = app.currentScene()!;
    const hoverNode = scene.nodes.find((n) => n.id === markA)!;
    canvasEl.dispatchEvent(mouseEventAt("mousemove", hoverNode.x, hoverNode.y));
    await app.pendingHover;
    const details = exchanges[6].response as { authors: string[]; title: string; source: string; year: number };
    expect(root.querySelector(".detail-authors")!.textContent).toBe(details.authors.join("; "));
    expect(root.querySelector(".detail-title")!.textContent).toBe(details.title);
    expect(root.querySelector(".detail-source")!.textContent).toBe(details.source);
    expect(root.querySelector(".detail-year")!.textContent).toBe(String(details.year));

    // step 3: drill down with intermediate publications via the dialog
    (root.querySelector(".menu-drill") as HTMLButtonElement).click();
    const drillBox = root.querySelector(".drill-intermediates input") as HTMLInputElement;
    drillBox.checked = true;
    (root.querySelector(".dialog-ok") as HTMLButtonElement).click();
    await app.whenIdle();
    const drilled = app.store.get().service!;
    expect(drilled.counts.publications).toBe(72);
    assertRenderedMatchesService();

    // step 4: expand with successors at minimum 2 citation relations
    (root.querySelector(".menu-expand") as HTMLButtonElement).click();
    const succBox = root.querySelector(".expand-successors input") as HTMLInputElement;
    succBox.checked = true;
    const minRel = root.querySelector(".expand-min-relations") as HTMLInputElement;
    minRel.value = "2";
    (root.querySelector(".dialog-ok") as HTMLButtonElement).click();
    await app.whenIdle();
    const expanded = app.store.get().service!;
    expect(expanded.counts.publications).toBe(162);
    expect(expanded.counts.publications).toBeGreaterThan(drilled.counts.publications);
    assertRenderedMatchesService();

    // step 5: back restores the drilled view, forward the expanded one
    (root.querySelector(".menu-back") as HTMLButtonElement).click();
    await app.whenIdle();
    expect(app.store.get().service!.counts).toEqual(drilled.counts);
    assertRenderedMatchesService();

    (root.querySelector(".menu-forward") as HTMLButtonElement).click();
    await app.whenIdle();
    expect(app.store.get().service!.counts).toEqual(expanded.counts);
    assertRenderedMatchesService();

    // the whole recorded conversation was consumed in order
    expect(replay.remaining()).toBe(0);

    // the left pane reports the counts the service sent
    expect(root.querySelector(".counts")!.textContent)
      .toContain("162 publications, ");
  });

  it("keeps counts visible while switching tabs and disables history at the boundary", async () => {
    const createBody = exchanges[0].body as { publications: string; citations: string };
    // a fresh replay: only the first two exchanges will be used
    const localReplay = replayFetch(exchanges.slice(0, 2));
    const api = new ApiClient("/v1", localReplay.impl);
    document.body.innerHTML = "";
    root = document.createElement("div");
    document.body.append(root);
    ctx = new RecordingContext();
    canvasEl = document.createElement("div");
    app = new ExplorerApp(root, api, {
      element: canvasEl, width: 1100, height: 720,
      context: ctx, measure: approximateMeasure,
    });
    await app.openPairs(createBody.publications, createBody.citations);

    const backBtn = root.querySelector(".menu-back") as HTMLButtonElement;
    const fwdBtn = root.querySelector(".menu-forward") as HTMLButtonElement;
    expect(backBtn.disabled).toBe(true);
    expect(fwdBtn.disabled).toBe(true);

    const visPane = root.querySelector(".pane-visualization") as HTMLElement;
    const listPane = root.querySelector(".pane-list") as HTMLElement;
    expect(visPane.style.display).toBe("");    // visualization is the default tab
    expect(listPane.style.display).toBe("none");
    (root.querySelector(".tab-list") as HTMLButtonElement).click();
    expect(listPane.style.display).toBe("");
    expect(visPane.style.display).toBe("none");
  });
});
