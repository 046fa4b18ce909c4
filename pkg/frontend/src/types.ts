// Wire types for the /api/v1 JSON surface. Field names match the server
// payloads exactly; nothing here is computed client-side.

export interface PointPayload {
  id: number;
  values: number[];
  raw: number[];
  label: string;
}

export interface SegmentEntry {
  values: [number, number];
  count: number;
}

export interface SegmentGroup {
  pair: [number, number];
  segments: SegmentEntry[];
}

export interface DatasetPayload {
  coordinates: string[];
  classLabels: string[];
  classPriority: string[];
  classCounts: Record<string, number>;
  size: number;
  droppedRows: number;
  fingerprint: string;
  points: PointPayload[];
  rawMin: number[];
  rawMax: number[];
  segmentFrequencies: SegmentGroup[];
}

export interface BlockPayload {
  id: number;
  bounds: [number, number][];
  members: number[];
  classCounts: Record<string, number>;
  dominant: string | null;
  kind: string;
  memberCount: number;
  impurity: number;
}

export interface SeedEntry {
  blockId: number;
  pointId: number;
  distance: number;
}

export interface ViewSettings {
  frequencyWidths: boolean;
  quantileQ: number;
  sideBySide: number[];
}

export interface SessionPayload {
  sessionId: string;
  datasetFingerprint: string;
  activeCoordinates: boolean[];
  blocks: BlockPayload[];
  refused: BlockPayload[];
  seeds: SeedEntry[];
  viewSettings: ViewSettings;
}

export interface SeedResponse {
  block: BlockPayload;
  memberCount: number;
}

export interface MergeResponse {
  block: BlockPayload;
}

export interface HeatmapResponse {
  heatmap: { counts: number[]; totalPairs: number; argmax: number };
  coordinates: string[];
  argmaxCoordinate: string;
}

export interface LinguisticEntry {
  coordinate: string;
  third: string;
  concentration: number;
}

export interface LinguisticDescription {
  subject: string;
  entries: LinguisticEntry[];
  groups: Record<string, string[]>;
  sentences: string[];
}

export interface LinguisticResponse {
  descriptions: LinguisticDescription[];
}

export interface QuantilesResponse {
  blockId: number;
  coordinate: string;
  quantiles: {
    edges: number[];
    counts: number[];
    valueFrequencies: [number, number][];
    mean: number;
  };
}

export interface ClassificationEntry {
  id: number;
  outcome: string | null;
  ruleFired: string;
  topBlockId: number | null;
  distance: number | null;
}

export interface ClassifyResponse {
  classifications: ClassificationEntry[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: unknown;
}

// Serialized model accepted by POST /classify. Built from session block
// payloads plus the k / distance-variant controls; the ordering rules all
// live server-side.
export interface WireModel {
  hbModel: {
    blocks: Omit<BlockPayload, "id" | "memberCount" | "impurity">[];
    refused: Omit<BlockPayload, "id" | "memberCount" | "impurity">[];
    config: Record<string, unknown>;
    provenance: string;
  };
  k: number;
  distanceVariant: string;
  classPriority: string[];
}
