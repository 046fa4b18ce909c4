// Class colors are assigned by class-label order in the dataset payload and
// never change while the page lives. Refused blocks render desaturated.

const PALETTE = [
  "#3fa7d6", // blue
  "#ee6352", // red
  "#59cd90", // green
  "#fac05e", // yellow
  "#9d6bce", // violet
  "#f79d84",
];

const DESATURATED = [
  "#8fa6b0",
  "#b09a96",
  "#97b0a3",
  "#b0a78f",
  "#a49ab0",
  "#b0a49d",
];

export function classColor(label: string | null, classLabels: string[]): string {
  if (label === null) return "#999999";
  const i = classLabels.indexOf(label);
  return i >= 0 ? PALETTE[i % PALETTE.length] : "#999999";
}

export function refusedColor(label: string | null, classLabels: string[]): string {
  if (label === null) return "#8a8a8a";
  const i = classLabels.indexOf(label);
  return i >= 0 ? DESATURATED[i % DESATURATED.length] : "#8a8a8a";
}

/** Translucent fill for a block band of the given class. */
export function blockFill(label: string | null, classLabels: string[], alpha = 0.18): string {
  const hex = classColor(label, classLabels);
  const r = parseInt(hex.slice(1, 3), 16);
  const g = parseInt(hex.slice(3, 5), 16);
  const b = parseInt(hex.slice(5, 7), 16);
  return `rgba(${r}, ${g}, ${b}, ${alpha})`;
}
