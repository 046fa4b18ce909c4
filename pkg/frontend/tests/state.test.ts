import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Actions, MutationQueue, Store, initialState } from "../src/state.js";
import { ServerStub, mkBlock, mkSession } from "./stubs.js";

function harness(stub = new ServerStub()) {
  const store = new Store();
  const actions = new Actions(new ApiClient("", stub.fetch), store);
  return { stub, store, actions };
}

describe("Store", () => {
  it("notifies subscribers and honors unsubscribe", () => {
    const store = new Store();
    let seen = 0;
    const off = store.subscribe(() => (seen += 1));
    store.set({ busy: true });
    off();
    store.set({ busy: false });
    expect(seen).toBe(1);
  });

  it("merges control values without touching the rest", () => {
    const store = new Store();
    store.setControls({ k: 5 });
    expect(store.state.controls.k).toBe(5);
    expect(store.state.controls.variant).toBe(initialState().controls.variant);
  });
});

describe("MutationQueue", () => {
  it("keeps running after a failed task", async () => {
    const q = new MutationQueue();
    const p1 = q.run(async () => {
      throw new Error("nope");
    });
    const p2 = q.run(async () => 42);
    await expect(p1).rejects.toThrow("nope");
    await expect(p2).resolves.toBe(42);
  });

  it("runs tasks strictly one after another", async () => {
    const q = new MutationQueue();
    const order: string[] = [];
    let release!: () => void;
    const gate = new Promise<void>((r) => (release = r));
    const p1 = q.run(async () => {
      order.push("a-start");
      await gate;
      order.push("a-end");
    });
    const p2 = q.run(async () => {
      order.push("b");
    });
    await new Promise((r) => setTimeout(r, 5));
    expect(order).toEqual(["a-start"]);
    release();
    await Promise.all([p1, p2]);
    expect(order).toEqual(["a-start", "a-end", "b"]);
  });
});

describe("Actions", () => {
  it("boot loads the dataset payload and opens a session", async () => {
    const { store, actions } = harness();
    await actions.boot();
    expect(store.state.dataset?.fingerprint).toBe("fixture-8x9");
    expect(store.state.dataset?.classPriority).toEqual(["M", "B"]);
    expect(store.state.session?.sessionId).toBe("s-1");
    expect(store.state.busy).toBe(false);
  });

  it("seeds with the slider distance and applies the acknowledged session", async () => {
    const { stub, store, actions } = harness();
    stub.nextSeedBlock = mkBlock({ id: 10, members: [3, 1, 5], classCounts: { B: 2, M: 1 } });
    await actions.boot();
    store.setControls({ seedDistance: 0.35 });

    await actions.seedAtPoint(3);

    const seed = stub.callsTo("/session/s-1/seed");
    expect(seed).toHaveLength(1);
    expect(seed[0].body).toEqual({ pointId: 3, distance: 0.35 });
    expect(store.state.session?.blocks.map((b) => b.id)).toEqual([10]);
    expect(store.state.session?.blocks[0].memberCount).toBe(3);
    expect(store.state.selectedPoint).toBe(3);
  });

  it("serializes mutations: the second waits for the first", async () => {
    const { stub, store, actions } = harness();
    stub.mergeResult = mkBlock({ id: 50, members: [0, 1, 2, 3] });
    await actions.boot();
    store.set({ selectedBlocks: [1, 2] });

    let release!: () => void;
    const gate = new Promise<void>((r) => (release = r));
    stub.onRequest = async (call) => {
      if (call.path.endsWith("/discover")) await gate;
    };

    const p1 = actions.discover();
    const p2 = actions.mergeSelected();
    await new Promise((r) => setTimeout(r, 10));
    expect(stub.callsTo("/session/s-1/merge")).toHaveLength(0);

    release();
    await Promise.all([p1, p2]);
    const paths = stub.calls.map((c) => c.path);
    expect(paths.indexOf("/session/s-1/merge")).toBeGreaterThan(
      paths.indexOf("/session/s-1/discover"),
    );
  });

  it("keeps the last acknowledged state when a mutation fails", async () => {
    const { stub, store, actions } = harness();
    await actions.boot();
    const before = store.state.session;

    stub.failNext = { status: 422, code: "validation_error", message: "bad threshold" };
    await actions.discover();

    expect(store.state.session).toBe(before);
    expect(store.state.error).toBe("validation_error: bad threshold");
    expect(store.state.busy).toBe(false);

    await actions.discover(); // next success clears the error
    expect(store.state.error).toBeNull();
  });

  it("applies discover results wholesale and refreshes the heatmap", async () => {
    const { stub, store, actions } = harness();
    stub.discoverBlocks = [
      mkBlock({ id: 21, members: [0, 1, 2] }),
      mkBlock({ id: 22, members: [5, 6], classCounts: { M: 2 }, dominant: "M" }),
    ];
    await actions.boot();
    store.set({ selectedBlocks: [99] });
    store.setControls({ impurity: 0.07 });

    await actions.discover();

    expect(stub.callsTo("/session/s-1/discover")[0].body).toEqual({
      threshold: 0.07,
      mode: "envelope-M1",
    });
    expect(store.state.session?.blocks.map((b) => b.id)).toEqual([21, 22]);
    expect(store.state.selectedBlocks).toEqual([]);
    expect(store.state.heatmap?.argmaxCoordinate).toBe("X6");
  });

  it("sends the flipped mask but displays whatever the server returns", async () => {
    const { stub, store, actions } = harness();
    await actions.boot();
    // server refuses the change and keeps every coordinate active
    stub.coordinatesResponder = () => stub.session.activeCoordinates;

    await actions.toggleCoordinate(0);

    const sent = stub.callsTo("/session/s-1/coordinates")[0].body.mask;
    expect(sent[0]).toBe(false);
    expect(sent.slice(1).every(Boolean)).toBe(true);
    expect(store.state.session?.activeCoordinates.every(Boolean)).toBe(true);
  });

  it("round-trips view settings through the server", async () => {
    const { stub, store, actions } = harness();
    await actions.boot();
    store.set({ selectedBlocks: [1, 2] });

    await actions.setFrequencyWidths(true);
    await actions.sideBySideSelected();
    await actions.clearPanels();
    await actions.setQuantileQ(6);

    const bodies = stub.callsTo("/session/s-1/view").map((c) => c.body);
    expect(bodies).toEqual([
      { frequencyWidths: true },
      { sideBySide: [1, 2] },
      { sideBySide: [] },
      { quantileQ: 6 },
    ]);
    expect(store.state.session?.viewSettings.frequencyWidths).toBe(true);
    expect(store.state.session?.viewSettings.quantileQ).toBe(6);
  });

  it("fetches one quantile payload per active coordinate for the selection", async () => {
    const stub = new ServerStub();
    stub.session = mkSession({
      blocks: [mkBlock({ id: 4, members: [0, 1] })],
      activeCoordinates: [true, true, false, false, false, false, false, false, true],
    });
    const { store, actions } = harness(stub);
    await actions.boot();
    store.set({ selectedBlocks: [4] });

    actions.setShowQuantiles(true);
    await actions.idle();

    const calls = stub.callsTo("/session/s-1/quantiles");
    expect(calls.map((c) => c.query.get("coord"))).toEqual(["0", "1", "8"]);
    expect(calls.every((c) => c.query.get("block") === "4")).toBe(true);
    expect(calls.every((c) => c.query.get("q") === "4")).toBe(true);
    expect(store.state.quantiles.map((q) => q.coordinate)).toEqual(["X1", "X2", "X9"]);

    actions.setShowQuantiles(false);
    await actions.idle();
    expect(store.state.quantiles).toEqual([]);
  });

  it("asks for class descriptions, or one block when targeted", async () => {
    const { stub, store, actions } = harness();
    await actions.boot();

    await actions.describe();
    let q = stub.callsTo("/session/s-1/linguistic")[0].query;
    expect(q.get("target")).toBe("class");
    expect(q.get("block")).toBeNull();
    expect(store.state.linguistic?.descriptions[0].subject).toBe("class B");

    store.set({ selectedBlocks: [7] });
    store.setControls({ linguisticTarget: "block" });
    await actions.describe();
    q = stub.callsTo("/session/s-1/linguistic")[1].query;
    expect(q.get("target")).toBe("block");
    expect(q.get("block")).toBe("7");

    actions.closeLinguistic();
    expect(store.state.linguistic).toBeNull();
  });

  it("classifies the selected point with a model built from server payloads", async () => {
    const stub = new ServerStub();
    stub.session = mkSession({ blocks: [mkBlock({ id: 4, members: [1, 2] })] });
    const { store, actions } = harness(stub);
    await actions.boot();
    store.set({ selectedPoint: 2 });
    store.setControls({ k: 5, variant: "N1" });

    await actions.classifySelected();

    const call = stub.callsTo("/classify")[0];
    expect(call.body.units).toBe("normalized");
    expect(call.body.points).toEqual([stub.dataset.points[2].values]);
    const model = call.body.model;
    expect(model.k).toBe(5);
    expect(model.distanceVariant).toBe("N1");
    expect(model.classPriority).toEqual(["M", "B"]);
    expect(model.hbModel.provenance).toBe("fixture-8x9");
    expect(model.hbModel.blocks).toHaveLength(1);
    expect(model.hbModel.blocks[0]).not.toHaveProperty("id");
    expect(model.hbModel.blocks[0]).not.toHaveProperty("impurity");
    expect(store.state.classification?.classifications[0].outcome).toBe("B");
  });

  it("refuses to classify without a selected point", async () => {
    const { store, actions } = harness();
    await actions.boot();
    await actions.classifySelected();
    expect(store.state.error).toBe("select a point first");
    expect(store.state.classification).toBeNull();
  });

  it("toggles block selection locally without a server round-trip", async () => {
    const { stub, store, actions } = harness();
    await actions.boot();
    const mutations = stub.calls.length;

    actions.toggleBlockSelection(3);
    actions.toggleBlockSelection(5);
    actions.toggleBlockSelection(3);
    await actions.idle();

    expect(store.state.selectedBlocks).toEqual([5]);
    // quantile overlay is off, so nothing was fetched
    expect(stub.calls.length).toBe(mutations);
  });
});
