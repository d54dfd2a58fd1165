// Two-pane explorer: the left pane reports counts, hosts the selection
// controls and shows bibliographic details on hover; the right pane
// switches between the historiograph canvas and a searchable publication
// list. The menu bar opens networks, runs drill-down / expansion dialogs,
// clustering, core extraction, and back/forward history navigation.
//
// Every mutation goes through the service; its response already carries
// the new counts, and a fresh frame is fetched afterwards.

import { ApiClient, ServiceError } from "./api.js";
import {
  buildScene, drawScene, hitTest, approximateMeasure,
  type Draw2D, type Scene, type TextMeasure,
} from "./renderer.js";
import { Store } from "./state.js";
import type { SelectionRequest, SessionState } from "./types.js";

export interface CanvasHost {
  width: number;
  height: number;
  context: Draw2D;
  measure: TextMeasure;
  element: HTMLElement;
}

export class ExplorerApp {
  readonly store = new Store();
  private scene: Scene | null = null;
  private frameCounter = 0;
  private mutationChain: Promise<unknown> = Promise.resolve();
  private displayCount = 40;
  private useReduction = false;
  pendingHover: Promise<void> | null = null;

  private countsEl!: HTMLElement;
  private detailsEl!: HTMLElement;
  private noticeEl!: HTMLElement;
  private listBodyEl!: HTMLElement;
  private searchInput!: HTMLInputElement;
  private panes!: { visualization: HTMLElement; list: HTMLElement };
  private backBtn!: HTMLButtonElement;
  private forwardBtn!: HTMLButtonElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private canvas: CanvasHost,
    private doc: Document = document,
  ) {
    this.buildDom();
    this.store.subscribe(() => this.sync());
  }

  // -- DOM scaffolding -----------------------------------------------------

  private el<K extends keyof HTMLElementTagNameMap>(
    tag: K, cls?: string, text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = this.doc.createElement(tag);
    if (cls) node.className = cls;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  private button(label: string, cls: string, onClick: () => void): HTMLButtonElement {
    const b = this.el("button", cls, label);
    b.addEventListener("click", onClick);
    return b;
  }

  private buildDom(): void {
    const menu = this.el("div", "menu-bar");
    menu.append(
      this.button("Open…", "menu-open", () => this.openDialog()),
      this.button("Drill down…", "menu-drill", () => this.drillDialog()),
      this.button("Expand…", "menu-expand", () => this.expandDialog()),
      this.button("Cluster…", "menu-cluster", () => this.clusterDialog()),
      this.button("Cores…", "menu-cores", () => this.coresDialog()),
    );
    this.backBtn = this.button("< Back", "menu-back", () => this.navigate("back"));
    this.forwardBtn = this.button("Forward >", "menu-forward", () => this.navigate("forward"));
    menu.append(this.backBtn, this.forwardBtn);

    const left = this.el("div", "left-pane");
    this.countsEl = this.el("div", "counts");
    this.noticeEl = this.el("div", "notice");
    const selection = this.el("div", "selection-controls");
    selection.append(
      this.el("h3", undefined, "Selection"),
      this.button("Select period…", "select-period", () => this.selectPeriodDialog()),
      this.button("Clear marks", "clear-marks", () => this.clearMarks()),
    );
    this.detailsEl = this.el("div", "details");
    left.append(this.countsEl, this.noticeEl, selection, this.detailsEl);

    const right = this.el("div", "right-pane");
    const tabs = this.el("div", "tab-bar");
    const visTab = this.button("Visualization", "tab-visualization", () =>
      this.store.dispatch({ kind: "tab", tab: "visualization" }));
    const listTab = this.button("List", "tab-list", () =>
      this.store.dispatch({ kind: "tab", tab: "list" }));
    tabs.append(visTab, listTab);

    const visPane = this.el("div", "pane-visualization");
    visPane.append(this.canvas.element);
    const listPane = this.el("div", "pane-list");
    this.searchInput = this.el("input", "search-input");
    this.searchInput.placeholder = "Title search, e.g. *communit* detect*";
    const searchBtn = this.button("Search", "search-run", () => void this.refreshList());
    this.searchInput.addEventListener("keydown", (ev) => {
      if ((ev as KeyboardEvent).key === "Enter") void this.refreshList();
    });
    this.listBodyEl = this.el("div", "list-body");
    listPane.append(this.searchInput, searchBtn, this.listBodyEl);
    right.append(tabs, visPane, listPane);
    this.panes = { visualization: visPane, list: listPane };

    this.root.append(menu, left, right);

    this.attachCanvasEvents();
    this.sync();
  }

  private attachCanvasEvents(): void {
    const host = this.canvas.element;
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    let moved = false;

    host.addEventListener("mousedown", (ev) => {
      const e = ev as MouseEvent;
      dragging = true;
      moved = false;
      lastX = e.offsetX;
      lastY = e.offsetY;
    });
    host.addEventListener("mousemove", (ev) => {
      const e = ev as MouseEvent;
      if (dragging) {
        const dx = e.offsetX - lastX;
        const dy = e.offsetY - lastY;
        if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
        lastX = e.offsetX;
        lastY = e.offsetY;
        this.store.dispatch({ kind: "pan", dx, dy });
        return;
      }
      this.pendingHover = this.handleHover(e.offsetX, e.offsetY);
    });
    host.addEventListener("mouseup", (ev) => {
      const e = ev as MouseEvent;
      dragging = false;
      if (!moved) void this.handleClick(e.offsetX, e.offsetY);
    });
    host.addEventListener("wheel", (ev) => {
      const e = ev as WheelEvent;
      e.preventDefault();
      const factor = e.deltaY < 0 ? 1.25 : 0.8;
      this.store.dispatch({ kind: "zoom", factor, centerX: e.offsetX, centerY: e.offsetY });
    });
  }

  // -- session lifecycle ------------------------------------------------------

  async openPairs(publications: string, citations: string): Promise<void> {
    const doc = await this.api.createSessionFromPairs(publications, citations);
    this.store.dispatch({ kind: "session", sessionId: doc.session_id, state: doc });
    await this.fetchFrame();
  }

  async openExport(wos: string): Promise<void> {
    const doc = await this.api.createSessionFromExport(wos);
    this.store.dispatch({ kind: "session", sessionId: doc.session_id, state: doc });
    await this.fetchFrame();
  }

  private get sid(): string {
    const sid = this.store.get().sessionId;
    if (!sid) throw new Error("no active session");
    return sid;
  }

  async fetchFrame(): Promise<void> {
    const seq = ++this.frameCounter;
    const frame = await this.api.frame(this.sid, {
      display_count: this.displayCount,
      transitive_reduction: this.useReduction,
    });
    this.store.dispatch({ kind: "frame", frame, seq });
  }

  /** Serialize mutations: at most one in flight, responses applied in order. */
  mutate(run: () => Promise<SessionState>): Promise<void> {
    const step = this.mutationChain.then(async () => {
      try {
        const state = await run();
        this.store.dispatch({ kind: "service-state", state });
        this.store.dispatch({ kind: "notice", message: null });
        await this.fetchFrame();
      } catch (err) {
        if (err instanceof ServiceError) {
          this.store.dispatch({ kind: "notice", message: `${err.status}: ${err.message}` });
        } else {
          throw err;
        }
      }
    });
    this.mutationChain = step;
    return step;
  }

  // -- interactions -------------------------------------------------------------

  async handleHover(x: number, y: number): Promise<void> {
    if (!this.scene) return;
    const pid = hitTest(this.scene, x, y);
    if (!pid) {
      if (this.store.get().hovered) this.store.dispatch({ kind: "hover", details: null });
      return;
    }
    if (this.store.get().hovered?.id === pid) return;
    const details = await this.api.publication(this.sid, pid);
    this.store.dispatch({ kind: "hover", details });
  }

  async handleClick(x: number, y: number): Promise<void> {
    if (!this.scene) return;
    const pid = hitTest(this.scene, x, y);
    if (!pid) return;
    await this.toggleMark(pid);
  }

  async toggleMark(pid: string): Promise<void> {
    const marked = new Set(this.store.get().service?.marked ?? []);
    await this.mutate(() => this.api.mark(this.sid, [pid], !marked.has(pid)));
  }

  async clearMarks(): Promise<void> {
    const marked = this.store.get().service?.marked ?? [];
    if (marked.length === 0) return;
    await this.mutate(() => this.api.mark(this.sid, marked, false));
  }

  navigate(direction: "back" | "forward"): Promise<void> {
    return this.mutate(() =>
      direction === "back" ? this.api.back(this.sid) : this.api.forward(this.sid));
  }

  // -- dialogs ---------------------------------------------------------------------

  private dialog(title: string, body: HTMLElement, onOk: () => Promise<void> | void): HTMLElement {
    const overlay = this.el("div", "dialog-overlay");
    const box = this.el("div", "dialog");
    box.append(this.el("h3", undefined, title), body);
    const buttons = this.el("div", "dialog-buttons");
    buttons.append(
      this.button("OK", "dialog-ok", async () => {
        await onOk();
        overlay.remove();
      }),
      this.button("Cancel", "dialog-cancel", () => overlay.remove()),
    );
    box.append(buttons);
    overlay.append(box);
    this.root.append(overlay);
    return overlay;
  }

  private checkbox(cls: string, label: string, checked = false): [HTMLElement, HTMLInputElement] {
    const wrap = this.el("label", `check ${cls}`);
    const input = this.el("input") as HTMLInputElement;
    input.type = "checkbox";
    input.checked = checked;
    wrap.append(input, this.doc.createTextNode(" " + label));
    return [wrap, input];
  }

  private numberInput(cls: string, value: number): HTMLInputElement {
    const input = this.el("input", cls) as HTMLInputElement;
    input.type = "number";
    input.value = String(value);
    return input;
  }

  openDialog(): void {
    const body = this.el("div");
    const pubs = this.el("textarea", "open-pubs") as HTMLTextAreaElement;
    pubs.placeholder = "publications.tsv contents";
    const cites = this.el("textarea", "open-cites") as HTMLTextAreaElement;
    cites.placeholder = "citations.tsv contents";
    body.append(this.el("p", undefined, "Paste the pair files:"), pubs, cites);
    this.dialog("Open citation network", body, () => this.openPairs(pubs.value, cites.value));
  }

  drillDialog(): void {
    const body = this.el("div");
    const [predWrap, preds] = this.checkbox("drill-predecessors", "Include predecessors");
    const [succWrap, succs] = this.checkbox("drill-successors", "Include successors");
    const [interWrap, inters] = this.checkbox("drill-intermediates", "Include intermediate publications");
    const minRel = this.numberInput("drill-min-relations", 1);
    const minWrap = this.el("label", "min-relations-wrap", "Minimum citation relations ");
    minWrap.append(minRel);
    body.append(
      this.el("p", undefined, "Drill down to the marked publications."),
      predWrap, succWrap, interWrap, minWrap,
    );
    this.dialog("Drill down", body, () =>
      this.mutate(() => this.api.drill(this.sid, {
        mode: "by_marked",
        include_predecessors: preds.checked,
        include_successors: succs.checked,
        include_intermediates: inters.checked,
        min_relations: Number(minRel.value) || 1,
      })));
  }

  expandDialog(): void {
    const body = this.el("div");
    const [predWrap, preds] = this.checkbox("expand-predecessors", "Add predecessors");
    const [succWrap, succs] = this.checkbox("expand-successors", "Add successors");
    const [interWrap, inters] = this.checkbox("expand-intermediates", "Add intermediate publications");
    const minRel = this.numberInput("expand-min-relations", 1);
    const minWrap = this.el("label", "min-relations-wrap", "Minimum citation relations ");
    minWrap.append(minRel);
    body.append(predWrap, succWrap, interWrap, minWrap);
    this.dialog("Expand current network", body, () =>
      this.mutate(() => this.api.expand(this.sid, {
        add_predecessors: preds.checked,
        add_successors: succs.checked,
        add_intermediates: inters.checked,
        min_relations: Number(minRel.value) || 1,
      })));
  }

  selectPeriodDialog(): void {
    const body = this.el("div");
    const lo = this.numberInput("period-min", 1990);
    const hi = this.numberInput("period-max", 2020);
    body.append(this.el("span", undefined, "From "), lo, this.el("span", undefined, " to "), hi);
    this.dialog("Select publications by period", body, () =>
      this.mutate(async () => this.api.select(this.sid, {
        mode: "by_period",
        year_min: Number(lo.value),
        year_max: Number(hi.value),
      } as SelectionRequest)));
  }

  clusterDialog(): void {
    const body = this.el("div");
    const res = this.numberInput("cluster-resolution", 1.0);
    res.step = "0.1";
    const wrap = this.el("label", undefined, "Resolution ");
    wrap.append(res);
    body.append(wrap);
    this.dialog("Cluster publications", body, () =>
      this.mutate(() => this.api.cluster(this.sid, Number(res.value) || 1.0)));
  }

  coresDialog(): void {
    const body = this.el("div");
    const k = this.numberInput("cores-k", 10);
    const wrap = this.el("label", undefined, "Minimum citation relations with other core publications ");
    wrap.append(k);
    body.append(wrap);
    this.dialog("Mark core publications", body, () =>
      this.mutate(() => this.api.cores(this.sid, Number(k.value) || 1)));
  }

  // -- list pane ----------------------------------------------------------------------

  async refreshList(): Promise<void> {
    const query = this.searchInput.value.trim() || null;
    const page = await this.api.publications(this.sid, query, 0, 200);
    this.listBodyEl.textContent = "";
    const header = this.el("div", "list-row list-header");
    for (const col of ["", "Authors", "Title", "Source", "Year", "Cit."]) {
      header.append(this.el("span", "list-cell", col));
    }
    this.listBodyEl.append(header);
    for (const item of page.items) {
      const row = this.el("div", "list-row");
      row.dataset.id = item.id;
      const markBox = this.el("input") as HTMLInputElement;
      markBox.type = "checkbox";
      markBox.checked = item.marked;
      markBox.addEventListener("change", () => void this.toggleMark(item.id));
      const markCell = this.el("span", "list-cell");
      markCell.append(markBox);
      row.append(
        markCell,
        this.el("span", "list-cell", item.authors.join("; ")),
        this.el("span", "list-cell", item.title),
        this.el("span", "list-cell", item.source),
        this.el("span", "list-cell", String(item.year)),
        this.el("span", "list-cell", String(item.internal_score)),
      );
      this.listBodyEl.append(row);
    }
    const total = this.el("div", "list-total", `${page.total} publications match`);
    this.listBodyEl.append(total);
  }

  // -- rendering ----------------------------------------------------------------------

  private sync(): void {
    const s = this.store.get();
    if (s.service) {
      const c = s.service.counts;
      const sel = c.selected_publications > 0
        ? ` Selected: ${c.selected_publications} publications, ` +
          `${c.selected_citation_relations} citation relations.`
        : "";
      this.countsEl.textContent =
        `${c.publications} publications, ${c.citation_relations} citation relations.${sel}`;
      this.backBtn.disabled = !s.service.history.can_back;
      this.forwardBtn.disabled = !s.service.history.can_forward;
    } else {
      this.countsEl.textContent = "No network loaded.";
      this.backBtn.disabled = true;
      this.forwardBtn.disabled = true;
    }

    this.noticeEl.textContent = s.notice ?? "";

    if (s.hovered) {
      this.detailsEl.textContent = "";
      const d = s.hovered;
      this.detailsEl.append(
        this.el("div", "detail-authors", d.authors.join("; ")),
        this.el("div", "detail-title", d.title),
        this.el("div", "detail-source", d.source),
        this.el("div", "detail-year", String(d.year)),
        this.el("div", "detail-scores",
          `citations: ${d.internal_score} internal` +
          (d.external_score === null ? "" : `, ${d.external_score} external`)),
      );
    } else {
      this.detailsEl.textContent = "";
    }

    this.panes.visualization.style.display = s.activeTab === "visualization" ? "" : "none";
    this.panes.list.style.display = s.activeTab === "list" ? "" : "none";

    this.renderCanvas();
  }

  private renderCanvas(): void {
    const s = this.store.get();
    if (!s.frame) {
      this.scene = null;
      return;
    }
    this.scene = buildScene(
      s.frame, s.viewport, this.canvas.width, this.canvas.height,
      this.canvas.measure ?? approximateMeasure,
    );
    drawScene(this.canvas.context, this.scene, this.canvas.width, this.canvas.height);
  }

  currentScene(): Scene | null {
    return this.scene;
  }

  /** Resolves once every queued mutation (and its frame fetch) settled. */
  whenIdle(): Promise<void> {
    return this.mutationChain.then(() => undefined);
  }
}
