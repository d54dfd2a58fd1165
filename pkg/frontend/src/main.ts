// Browser bootstrap: a real canvas host wired to the local service.

import { ApiClient } from "./api.js";
import { ExplorerApp, type CanvasHost } from "./app.js";
import type { Draw2D } from "./renderer.js";

function realCanvasHost(width: number, height: number): CanvasHost {
  const element = document.createElement("canvas");
  element.width = width;
  element.height = height;
  element.className = "historiograph";
  const ctx = element.getContext("2d");
  if (!ctx) throw new Error("2D canvas is not available");
  return {
    element,
    width,
    height,
    context: ctx as unknown as Draw2D,
    measure: (text) => ctx.measureText(text).width,
  };
}

export function boot(root: HTMLElement, base = "/v1"): ExplorerApp {
  const host = realCanvasHost(1100, 720);
  return new ExplorerApp(root, new ApiClient(base), host);
}

const rootEl = document.getElementById("app");
if (rootEl) {
  boot(rootEl);
}
