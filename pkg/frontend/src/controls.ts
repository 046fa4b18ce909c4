import type { Actions, Store, ViewState } from "./state.js";
import type { BlockPayload } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

export interface ControlsDom {
  root: HTMLElement;
  seedDistance: HTMLInputElement;
  impurity: HTMLInputElement;
  kSelect: HTMLSelectElement;
  variantSelect: HTMLSelectElement;
  discoverBtn: HTMLButtonElement;
  mergeBtn: HTMLButtonElement;
  sideBySideBtn: HTMLButtonElement;
  clearPanelsBtn: HTMLButtonElement;
  classifyBtn: HTMLButtonElement;
  freqWidths: HTMLInputElement;
  showQuantiles: HTMLInputElement;
  quantileQ: HTMLInputElement;
  showRefused: HTMLInputElement;
  coordToggles: HTMLElement;
  blockList: HTMLElement;
  linguisticTarget: HTMLSelectElement;
  describeBtn: HTMLButtonElement;
  popup: HTMLElement;
  popupBody: HTMLElement;
  popupClose: HTMLButtonElement;
  errorBanner: HTMLElement;
  classificationOut: HTMLElement;
  status: HTMLElement;
}

function labeled(input: HTMLElement, text: string): HTMLElement {
  const wrap = el("label", { class: "control" });
  wrap.append(el("span", {}, text), input);
  return wrap;
}

export function buildControls(actions: Actions, store: Store): ControlsDom {
  const root = el("div", { class: "sidebar" });

  const status = el("div", { id: "status", class: "status" });
  const errorBanner = el("div", { id: "error-banner", class: "error hidden" });

  const seedDistance = el("input", {
    id: "seed-distance", type: "range", min: "0.05", max: "0.5", step: "0.05", value: "0.2",
  });
  const impurity = el("input", {
    id: "impurity", type: "range", min: "0", max: "0.5", step: "0.01", value: "0.1",
  });
  const kSelect = el("select", { id: "k-select" });
  for (const k of [1, 3, 5]) kSelect.append(el("option", { value: String(k) }, String(k)));
  kSelect.value = "3";
  const variantSelect = el("select", { id: "variant-select" });
  for (const v of ["N1", "N2", "N3"]) variantSelect.append(el("option", { value: v }, v));
  variantSelect.value = "N2";

  const discoverBtn = el("button", { id: "discover-btn" }, "Discover");
  const mergeBtn = el("button", { id: "merge-btn" }, "Merge selected");
  const sideBySideBtn = el("button", { id: "sidebyside-btn" }, "Side by side");
  const clearPanelsBtn = el("button", { id: "clear-panels-btn" }, "Single panel");
  const classifyBtn = el("button", { id: "classify-btn" }, "Classify point");

  const freqWidths = el("input", { id: "freq-widths", type: "checkbox" });
  const showQuantiles = el("input", { id: "show-quantiles", type: "checkbox" });
  const quantileQ = el("input", { id: "quantile-q", type: "number", min: "1", value: "4" });
  const showRefused = el("input", { id: "show-refused", type: "checkbox" });
  showRefused.checked = true;

  const coordToggles = el("div", { id: "coord-toggles", class: "coord-toggles" });
  const blockList = el("div", { id: "block-list", class: "block-list" });

  const linguisticTarget = el("select", { id: "linguistic-target" });
  for (const t of ["all", "class", "block"]) {
    linguisticTarget.append(el("option", { value: t }, t));
  }
  linguisticTarget.value = "class";
  const describeBtn = el("button", { id: "describe-btn" }, "Describe");

  const popup = el("div", { id: "popup", class: "popup hidden" });
  const popupClose = el("button", { id: "popup-close" }, "Close");
  const popupBody = el("div", { id: "popup-body" });
  popup.append(popupClose, popupBody);

  const classificationOut = el("div", { id: "classification-out", class: "readout" });

  root.append(
    status,
    errorBanner,
    labeled(seedDistance, "Seed distance"),
    labeled(impurity, "Impurity threshold"),
    labeled(kSelect, "k"),
    labeled(variantSelect, "Distance"),
    discoverBtn,
    mergeBtn,
    sideBySideBtn,
    clearPanelsBtn,
    classifyBtn,
    labeled(freqWidths, "Frequency widths"),
    labeled(showQuantiles, "Quantile overlay"),
    labeled(quantileQ, "Quantile bins"),
    labeled(showRefused, "Show refused"),
    el("div", { class: "section" }, "Coordinates"),
    coordToggles,
    el("div", { class: "section" }, "Blocks"),
    blockList,
    labeled(linguisticTarget, "Describe target"),
    describeBtn,
    classificationOut,
    popup,
  );

  seedDistance.addEventListener("input", () => {
    store.setControls({ seedDistance: Number(seedDistance.value) });
  });
  impurity.addEventListener("input", () => {
    store.setControls({ impurity: Number(impurity.value) });
  });
  kSelect.addEventListener("change", () => {
    store.setControls({ k: Number(kSelect.value) });
  });
  variantSelect.addEventListener("change", () => {
    store.setControls({ variant: variantSelect.value as "N1" | "N2" | "N3" });
  });
  linguisticTarget.addEventListener("change", () => {
    store.setControls({
      linguisticTarget: linguisticTarget.value as "all" | "class" | "block",
    });
  });
  discoverBtn.addEventListener("click", () => void actions.discover());
  mergeBtn.addEventListener("click", () => void actions.mergeSelected());
  sideBySideBtn.addEventListener("click", () => void actions.sideBySideSelected());
  clearPanelsBtn.addEventListener("click", () => void actions.clearPanels());
  classifyBtn.addEventListener("click", () => void actions.classifySelected());
  describeBtn.addEventListener("click", () => void actions.describe());
  popupClose.addEventListener("click", () => actions.closeLinguistic());
  freqWidths.addEventListener("change", () => void actions.setFrequencyWidths(freqWidths.checked));
  showQuantiles.addEventListener("change", () => actions.setShowQuantiles(showQuantiles.checked));
  quantileQ.addEventListener("change", () => void actions.setQuantileQ(Number(quantileQ.value)));
  showRefused.addEventListener("change", () => {
    store.setControls({ showRefused: showRefused.checked });
  });

  return {
    root, seedDistance, impurity, kSelect, variantSelect, discoverBtn, mergeBtn,
    sideBySideBtn, clearPanelsBtn, classifyBtn, freqWidths, showQuantiles, quantileQ,
    showRefused, coordToggles, blockList, linguisticTarget, describeBtn, popup,
    popupBody, popupClose, errorBanner, classificationOut, status,
  };
}

function blockRow(block: BlockPayload, selected: boolean, refused: boolean): HTMLElement {
  const row = el("div", {
    class: `block-row${selected ? " selected" : ""}${refused ? " refused" : ""}`,
    "data-block-id": String(block.id),
    "data-member-count": String(block.memberCount),
    "data-impurity": String(block.impurity),
  });
  const impurityPct = `${(block.impurity * 100).toFixed(1)}%`;
  row.textContent =
    `#${block.id} ${block.dominant ?? "?"} n=${block.memberCount} ` +
    `imp=${impurityPct} (${block.kind})${refused ? " refused" : ""}`;
  return row;
}

/** Reflect the latest acknowledged state into the sidebar DOM. */
export function updateControls(dom: ControlsDom, state: ViewState, actions: Actions): void {
  const { dataset, session } = state;

  dom.status.textContent = dataset
    ? `${dataset.size} points, ${dataset.coordinates.length} coordinates` +
      `${state.busy ? " | working" : ""}`
    : "connecting";

  dom.errorBanner.textContent = state.error ?? "";
  dom.errorBanner.classList.toggle("hidden", state.error === null);

  if (dataset && session && dom.coordToggles.childElementCount === 0) {
    dataset.coordinates.forEach((name, i) => {
      const box = el("input", { id: `coord-toggle-${i}`, type: "checkbox" });
      box.checked = session.activeCoordinates[i];
      box.addEventListener("change", () => void actions.toggleCoordinate(i));
      const wrap = el("label", { class: "coord" });
      wrap.append(box, el("span", {}, name));
      dom.coordToggles.append(wrap);
    });
  }
  if (session) {
    session.activeCoordinates.forEach((active, i) => {
      const box = dom.coordToggles.querySelector<HTMLInputElement>(`#coord-toggle-${i}`);
      if (box) box.checked = active;
    });
    dom.freqWidths.checked = session.viewSettings.frequencyWidths;
    if (document.activeElement !== dom.quantileQ) {
      dom.quantileQ.value = String(session.viewSettings.quantileQ);
    }
  }

  dom.blockList.replaceChildren();
  if (session) {
    for (const block of session.blocks) {
      const row = blockRow(block, state.selectedBlocks.includes(block.id), false);
      row.addEventListener("click", () => actions.toggleBlockSelection(block.id));
      dom.blockList.append(row);
    }
    for (const block of session.refused) {
      dom.blockList.append(blockRow(block, false, true));
    }
  }

  // linguistic pop-up: sentences verbatim from the server response
  if (state.linguistic) {
    dom.popupBody.replaceChildren();
    for (const desc of state.linguistic.descriptions) {
      dom.popupBody.append(el("h3", {}, desc.subject));
      const pre = el("pre", { class: "sentences" });
      pre.textContent = desc.sentences.join("\n");
      dom.popupBody.append(pre);
    }
    dom.popup.classList.remove("hidden");
  } else {
    dom.popup.classList.add("hidden");
  }

  if (state.classification) {
    const parts = state.classification.classifications.map((c) => {
      const via = c.topBlockId !== null ? ` via block ${c.topBlockId}` : "";
      return `${c.outcome ?? "refused"} (${c.ruleFired}${via})`;
    });
    dom.classificationOut.textContent = `classified: ${parts.join("; ")}`;
  } else {
    dom.classificationOut.textContent = "";
  }
}
