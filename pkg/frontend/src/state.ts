// Application state: a plain store mutated only through apply(), so a
// recorded event log replays to the same final state. Frames carry
// sequence numbers; a stale response never overwrites a newer frame.

import type { Frame, PublicationDetails, SessionState } from "./types.js";
import { clampZoom, type Viewport } from "./renderer.js";

export type Tab = "visualization" | "list";

export interface AppState {
  sessionId: string | null;
  service: SessionState | null;
  frame: Frame | null;
  frameSeq: number;
  viewport: Viewport;
  activeTab: Tab;
  hovered: PublicationDetails | null;
  notice: string | null;
}

export type AppEvent =
  | { kind: "session"; sessionId: string; state: SessionState }
  | { kind: "service-state"; state: SessionState }
  | { kind: "frame"; frame: Frame; seq: number }
  | { kind: "zoom"; factor: number; centerX: number; centerY: number }
  | { kind: "pan"; dx: number; dy: number }
  | { kind: "reset-view" }
  | { kind: "tab"; tab: Tab }
  | { kind: "hover"; details: PublicationDetails | null }
  | { kind: "notice"; message: string | null };

export function initialState(): AppState {
  return {
    sessionId: null,
    service: null,
    frame: null,
    frameSeq: -1,
    viewport: { zoom: 1, panX: 0, panY: 0 },
    activeTab: "visualization",   // the visualization tab is the default
    hovered: null,
    notice: null,
  };
}

export function apply(state: AppState, event: AppEvent): AppState {
  switch (event.kind) {
    case "session":
      return {
        ...initialState(),
        sessionId: event.sessionId,
        service: event.state,
        activeTab: state.activeTab,
      };
    case "service-state":
      return { ...state, service: event.state };
    case "frame":
      if (event.seq < state.frameSeq) return state; // stale response: last write wins
      return { ...state, frame: event.frame, frameSeq: event.seq };
    case "zoom": {
      const zoom = clampZoom(state.viewport.zoom * event.factor);
      return { ...state, viewport: { ...state.viewport, zoom } };
    }
    case "pan": {
      const { zoom, panX, panY } = state.viewport;
      return {
        ...state,
        viewport: { zoom, panX: panX - event.dx / zoom, panY: panY - event.dy / zoom },
      };
    }
    case "reset-view":
      return { ...state, viewport: { zoom: 1, panX: 0, panY: 0 } };
    case "tab":
      return { ...state, activeTab: event.tab };
    case "hover":
      return { ...state, hovered: event.details };
    case "notice":
      return { ...state, notice: event.message };
  }
}

export class Store {
  private state: AppState = initialState();
  private listeners: ((s: AppState) => void)[] = [];

  get(): AppState {
    return this.state;
  }

  dispatch(event: AppEvent): AppState {
    this.state = apply(this.state, event);
    for (const fn of this.listeners) fn(this.state);
    return this.state;
  }

  subscribe(fn: (s: AppState) => void): void {
    this.listeners.push(fn);
  }
}
