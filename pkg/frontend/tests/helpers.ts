// Shared test doubles: a recording 2D context (jsdom has no real canvas)
// and a FIFO fetch that replays a conversation recorded from the real
// service, asserting the client sends exactly the recorded requests.

import { expect } from "vitest";
import type { Draw2D } from "../src/renderer.js";

export interface DrawnShape {
  kind: "circle" | "rect" | "path";
  x: number;
  y: number;
  fill?: string;
  stroke?: string;
  lineWidth?: number;
}

export class RecordingContext implements Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern = "#000";
  strokeStyle: string | CanvasGradient | CanvasPattern = "#000";
  lineWidth = 1;
  font = "";
  textAlign: CanvasTextAlign = "left";

  shapes: DrawnShape[] = [];
  texts: { text: string; x: number; y: number }[] = [];
  clears = 0;
  private pending: DrawnShape | null = null;

  clearRect(): void {
    this.clears += 1;
    this.shapes = [];
    this.texts = [];
    this.pending = null;
  }

  beginPath(): void {
    this.flush();
  }

  arc(x: number, y: number): void {
    this.pending = { kind: "circle", x, y };
  }

  rect(x: number, y: number, w: number, h: number): void {
    this.pending = { kind: "rect", x: x + w / 2, y: y + h / 2 };
  }

  moveTo(x: number, y: number): void {
    this.pending = { kind: "path", x, y };
  }

  quadraticCurveTo(): void {}

  fill(): void {
    if (this.pending) this.pending.fill = String(this.fillStyle);
  }

  stroke(): void {
    if (this.pending) {
      this.pending.stroke = String(this.strokeStyle);
      this.pending.lineWidth = this.lineWidth;
    }
  }

  fillText(text: string, x: number, y: number): void {
    this.texts.push({ text, x, y });
  }

  flush(): void {
    if (this.pending) {
      this.shapes.push(this.pending);
      this.pending = null;
    }
  }

  done(): void {
    this.flush();
  }

  markers(): DrawnShape[] {
    this.done();
    return this.shapes.filter((s) => s.kind !== "path");
  }
}

export interface Exchange {
  method: string;
  path: string;
  body: unknown;
  status: number;
  response: unknown;
}

/** FIFO replay: each request must match the next recorded exchange. */
export function replayFetch(exchanges: Exchange[]) {
  const queue = [...exchanges];
  const impl = async (input: string, init?: RequestInit): Promise<Response> => {
    const next = queue.shift();
    expect(next, `unexpected extra request ${init?.method} ${input}`).toBeDefined();
    const ex = next!;
    expect(`${init?.method ?? "GET"} ${input}`).toBe(`${ex.method} ${ex.path}`);
    const sentBody = init?.body ? JSON.parse(String(init.body)) : null;
    expect(sentBody).toEqual(ex.body ?? null);
    return new Response(JSON.stringify(ex.response), {
      status: ex.status,
      headers: { "content-type": "application/json" },
    });
  };
  return {
    impl,
    remaining: () => queue.length,
  };
}

export function mouseEventAt(type: string, x: number, y: number): MouseEvent {
  const ev = new MouseEvent(type, { bubbles: true });
  Object.defineProperty(ev, "offsetX", { value: x });
  Object.defineProperty(ev, "offsetY", { value: y });
  return ev;
}
