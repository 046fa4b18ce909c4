import { ApiClient } from "./api.js";
import { createApp } from "./app.js";
import type { Scene2D } from "./render.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

createApp({
  root,
  api: new ApiClient(""),
  createContext: (canvas) => {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    // The drawing code only ever assigns plain strings to style fields, so
    // the wider CanvasRenderingContext2D property types are safe to narrow.
    return ctx as unknown as Scene2D;
  },
});
