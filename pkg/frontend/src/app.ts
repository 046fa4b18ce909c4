import type { ApiClient } from "./api.js";
import { buildControls, updateControls, type ControlsDom } from "./controls.js";
import { drawScene, type Scene2D, type SceneInput } from "./render.js";
import { layoutAxes, nearestPoint, type Rect } from "./scale.js";
import { Actions, Store } from "./state.js";

export interface AppOptions {
  root: HTMLElement;
  api: ApiClient;
  createContext: (canvas: HTMLCanvasElement) => Scene2D;
  width?: number;
  height?: number;
}

export interface AppHandles {
  store: Store;
  actions: Actions;
  dom: ControlsDom;
  canvas: HTMLCanvasElement;
  /** Resolves once the dataset and an initial session have loaded. */
  ready: Promise<void>;
  renderNow(): void;
}

/**
 * Assemble the workbench: a plot canvas plus the sidebar, bound to a shared
 * store. Every piece of displayed state originates from a server payload;
 * this layer only routes events and repaints.
 */
export function createApp(opts: AppOptions): AppHandles {
  const width = opts.width ?? 960;
  const height = opts.height ?? 560;

  const store = new Store();
  const actions = new Actions(opts.api, store);

  const canvas = document.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  canvas.id = "plot";

  const dom = buildControls(actions, store);

  const shell = document.createElement("div");
  shell.className = "workbench";
  shell.append(canvas, dom.root);
  opts.root.append(shell);

  const ctx = opts.createContext(canvas);

  function sceneInput(): SceneInput | null {
    const { dataset, session } = store.state;
    if (!dataset || !session) return null;
    return {
      dataset,
      session,
      heatmap: store.state.heatmap,
      quantiles: store.state.quantiles,
      selectedBlocks: store.state.selectedBlocks,
      selectedPoint: store.state.selectedPoint,
      showRefused: store.state.controls.showRefused,
    };
  }

  function renderNow(): void {
    updateControls(dom, store.state, actions);
    const input = sceneInput();
    if (input) drawScene(ctx, input, width, height);
  }

  store.subscribe(renderNow);

  canvas.addEventListener("click", (ev) => {
    const { dataset, session } = store.state;
    if (!dataset || !session) return;
    // Point picking targets the overview plot; side-by-side panels are
    // block close-ups, so clicks there are ignored.
    if (session.viewSettings.sideBySide.length > 0) return;
    const rect: Rect = { x: 0, y: 0, width, height };
    const axes = layoutAxes(dataset.coordinates, session.activeCoordinates, rect);
    const bounds = canvas.getBoundingClientRect();
    const px = ev.clientX - bounds.left;
    const py = ev.clientY - bounds.top;
    const values = dataset.points.map((p) => p.values);
    const hit = nearestPoint(values, axes, rect, px, py);
    if (hit !== null) void actions.seedAtPoint(dataset.points[hit].id);
  });

  const ready = actions.boot().then(() => undefined);

  return { store, actions, dom, canvas, ready, renderNow };
}
