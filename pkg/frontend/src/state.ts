import { ApiClient, ApiRequestError, blockToWire } from "./api.js";
import type {
  ClassifyResponse,
  DatasetPayload,
  HeatmapResponse,
  LinguisticResponse,
  QuantilesResponse,
  SessionPayload,
} from "./types.js";

export interface ControlValues {
  seedDistance: number;
  impurity: number;
  k: number;
  variant: "N1" | "N2" | "N3";
  showQuantiles: boolean;
  showRefused: boolean;
  linguisticTarget: "all" | "class" | "block";
}

/**
 * Everything the view renders. `session`, `heatmap`, `quantiles`,
 * `linguistic` and `classification` hold server payloads untouched; the
 * client never recomputes counts, impurities, or sentences.
 */
export interface ViewState {
  dataset: DatasetPayload | null;
  session: SessionPayload | null;
  heatmap: HeatmapResponse | null;
  quantiles: QuantilesResponse[];
  linguistic: LinguisticResponse | null;
  classification: ClassifyResponse | null;
  selectedBlocks: number[];
  selectedPoint: number | null;
  controls: ControlValues;
  error: string | null;
  busy: boolean;
}

export function initialState(): ViewState {
  return {
    dataset: null,
    session: null,
    heatmap: null,
    quantiles: [],
    linguistic: null,
    classification: null,
    selectedBlocks: [],
    selectedPoint: null,
    controls: {
      seedDistance: 0.2,
      impurity: 0.1,
      k: 3,
      variant: "N2",
      showQuantiles: false,
      showRefused: true,
      linguisticTarget: "class",
    },
    error: null,
    busy: false,
  };
}

type Listener = (state: ViewState) => void;

export class Store {
  private listeners: Listener[] = [];

  constructor(public state: ViewState = initialState()) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  set(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const fn of this.listeners) fn(this.state);
  }

  setControls(partial: Partial<ControlValues>): void {
    this.set({ controls: { ...this.state.controls, ...partial } });
  }
}

/** Serializes mutations: at most one request chain in flight per session. */
export class MutationQueue {
  private tail: Promise<unknown> = Promise.resolve();

  run<T>(task: () => Promise<T>): Promise<T> {
    const next = this.tail.then(task, task);
    this.tail = next.catch(() => undefined);
    return next;
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiRequestError) return `${err.code}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}

/**
 * All server interactions. Mutations run through the queue and only apply
 * acknowledged payloads; on failure the last acknowledged state stays and
 * the error surfaces inline.
 */
export class Actions {
  constructor(
    private readonly api: ApiClient,
    private readonly store: Store,
    private readonly queue = new MutationQueue(),
  ) {}

  private get sessionId(): string {
    const s = this.store.state.session;
    if (!s) throw new Error("no live session");
    return s.sessionId;
  }

  /** Resolves once every mutation queued so far has settled. */
  idle(): Promise<void> {
    return this.queue.run(async () => {});
  }

  private run<T>(task: () => Promise<T>): Promise<T | null> {
    this.store.set({ busy: true });
    return this.queue.run(task).then(
      (value) => {
        this.store.set({ busy: false, error: null });
        return value;
      },
      (err) => {
        this.store.set({ busy: false, error: describeError(err) });
        return null;
      },
    );
  }

  /** Session blocks changed: refresh the heatmap and any quantile overlays. */
  private async refreshDerived(): Promise<void> {
    const state = this.store.state;
    const session = state.session;
    let heatmap: HeatmapResponse | null = null;
    if (session && session.blocks.length >= 2) {
      try {
        heatmap = await this.api.heatmap(session.sessionId);
      } catch {
        heatmap = null; // 409 when blocks disappear between calls
      }
    }
    const quantiles = await this.fetchQuantiles();
    this.store.set({ heatmap, quantiles });
  }

  private async fetchQuantiles(): Promise<QuantilesResponse[]> {
    const { session, controls, selectedBlocks } = this.store.state;
    if (!session || !controls.showQuantiles || selectedBlocks.length === 0) return [];
    const blockId = selectedBlocks[0];
    if (!session.blocks.some((b) => b.id === blockId)) return [];
    const q = session.viewSettings.quantileQ;
    const out: QuantilesResponse[] = [];
    for (let coord = 0; coord < session.activeCoordinates.length; coord++) {
      if (!session.activeCoordinates[coord]) continue;
      out.push(await this.api.quantiles(session.sessionId, blockId, coord, q));
    }
    return out;
  }

  boot(): Promise<void | null> {
    return this.run(async () => {
      const dataset = await this.api.dataset();
      const session = await this.api.createSession();
      this.store.set({ dataset, session });
    });
  }

  seedAtPoint(pointId: number): Promise<void | null> {
    return this.run(async () => {
      const distance = this.store.state.controls.seedDistance;
      await this.api.seed(this.sessionId, pointId, distance);
      const session = await this.api.getSession(this.sessionId);
      this.store.set({ session, selectedPoint: pointId });
      await this.refreshDerived();
    });
  }

  discover(): Promise<void | null> {
    return this.run(async () => {
      const threshold = this.store.state.controls.impurity;
      const session = await this.api.discover(this.sessionId, threshold);
      this.store.set({ session, selectedBlocks: [], quantiles: [] });
      await this.refreshDerived();
    });
  }

  mergeSelected(): Promise<void | null> {
    return this.run(async () => {
      const ids = this.store.state.selectedBlocks;
      await this.api.merge(this.sessionId, ids);
      const session = await this.api.getSession(this.sessionId);
      this.store.set({ session, selectedBlocks: [] });
      await this.refreshDerived();
    });
  }

  toggleCoordinate(index: number): Promise<void | null> {
    return this.run(async () => {
      const current = this.store.state.session;
      if (!current) throw new Error("no live session");
      const mask = [...current.activeCoordinates];
      mask[index] = !mask[index];
      const session = await this.api.coordinates(this.sessionId, mask);
      this.store.set({ session });
      const quantiles = await this.fetchQuantiles();
      this.store.set({ quantiles });
    });
  }

  setFrequencyWidths(enabled: boolean): Promise<void | null> {
    return this.run(async () => {
      const session = await this.api.view(this.sessionId, { frequencyWidths: enabled });
      this.store.set({ session });
    });
  }

  setQuantileQ(q: number): Promise<void | null> {
    return this.run(async () => {
      const session = await this.api.view(this.sessionId, { quantileQ: q });
      this.store.set({ session });
      const quantiles = await this.fetchQuantiles();
      this.store.set({ quantiles });
    });
  }

  sideBySideSelected(): Promise<void | null> {
    return this.run(async () => {
      const ids = this.store.state.selectedBlocks;
      const session = await this.api.view(this.sessionId, { sideBySide: ids });
      this.store.set({ session });
    });
  }

  clearPanels(): Promise<void | null> {
    return this.run(async () => {
      const session = await this.api.view(this.sessionId, { sideBySide: [] });
      this.store.set({ session });
    });
  }

  describe(): Promise<void | null> {
    return this.run(async () => {
      const { controls, selectedBlocks } = this.store.state;
      const target = controls.linguisticTarget;
      const block = target === "block" ? selectedBlocks[0] : undefined;
      const linguistic = await this.api.linguistic(this.sessionId, target, block);
      this.store.set({ linguistic });
    });
  }

  closeLinguistic(): void {
    this.store.set({ linguistic: null });
  }

  classifySelected(): Promise<void | null> {
    return this.run(async () => {
      const { dataset, session, selectedPoint, controls } = this.store.state;
      if (!dataset || !session) throw new Error("not booted");
      if (selectedPoint === null) throw new Error("select a point first");
      if (session.blocks.length === 0) throw new Error("no blocks to classify with");
      const model = {
        hbModel: {
          blocks: session.blocks.map(blockToWire),
          refused: session.refused.map(blockToWire),
          config: {},
          provenance: session.datasetFingerprint,
        },
        k: controls.k,
        distanceVariant: controls.variant,
        classPriority: dataset.classPriority,
      };
      const point = dataset.points.find((p) => p.id === selectedPoint);
      if (!point) throw new Error(`no point ${selectedPoint}`);
      const classification = await this.api.classify(model, [point.values], "normalized");
      this.store.set({ classification });
    });
  }

  /** Block selection is client-side view state; no server call. */
  toggleBlockSelection(blockId: number): void {
    const selected = this.store.state.selectedBlocks;
    const next = selected.includes(blockId)
      ? selected.filter((id) => id !== blockId)
      : [...selected, blockId];
    this.store.set({ selectedBlocks: next });
    void this.run(async () => {
      const quantiles = await this.fetchQuantiles();
      this.store.set({ quantiles });
    });
  }

  setShowQuantiles(enabled: boolean): void {
    this.store.setControls({ showQuantiles: enabled });
    void this.run(async () => {
      const quantiles = await this.fetchQuantiles();
      this.store.set({ quantiles });
    });
  }
}
