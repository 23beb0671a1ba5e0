// Board state is a pure projection of service responses plus the local
// pending edit buffer. Deriving the export gate only reads the
// service-computed OOV arrays, so the UI can warn early but can never be
// more permissive than the service's own 409 check.

import type {
  OovViolationPayload,
  SearchResponse,
  SelectionInfo,
  SessionPayload,
} from "./api.js";

export const TEXT_CHANNELS = ["t2t", "i2t"] as const;
export const ALL_CHANNELS = ["original", "t2t", "t2i", "i2t"] as const;
export type Channel = (typeof ALL_CHANNELS)[number];

export interface Candidate {
  index: number;
  label: string;
  oov: string[];
  imageDataUrl?: string;
}

export interface BoardState {
  sessionId: string;
  topicId: number;
  originalQuery: string;
  originalOov: string[];
  candidates: Record<Channel, Candidate[]>;
  selections: Record<string, SelectionInfo>;
  warnings: string[];
  preview: SearchResponse | null;
  exportViolations: OovViolationPayload[];
  lastError: string | null;
}

export function boardFromSession(payload: SessionPayload): BoardState {
  const reports = payload.oov_reports ?? {};
  const t2t = payload.t2t_texts.map((text, index) => ({
    index,
    label: text,
    oov: reports.t2t?.[index] ?? [],
  }));
  const i2t = payload.i2t_captions.map((text, index) => ({
    index,
    label: text,
    oov: reports.i2t?.[index] ?? [],
  }));
  const t2i = payload.t2i_images.map((image, index) => ({
    index,
    label: image.provenance_prompt,
    oov: [],
    imageDataUrl: `data:image/png;base64,${image.png_base64}`,
  }));
  const original = [{ index: 0, label: payload.topic_text, oov: reports.original ?? [] }];
  return {
    sessionId: payload.session_id,
    topicId: payload.topic_id,
    originalQuery: payload.topic_text,
    originalOov: reports.original ?? [],
    candidates: { original, t2t, t2i, i2t },
    selections: payload.selections ?? {},
    warnings: payload.warnings ?? [],
    preview: null,
    exportViolations: [],
    lastError: null,
  };
}

export function applySession(state: BoardState, payload: SessionPayload): BoardState {
  const next = boardFromSession(payload);
  return { ...next, preview: state.preview, exportViolations: [], lastError: null };
}

export interface SelectionBlocker {
  channel: string;
  terms: string[];
}

// Selected or edited queries whose service-reported OOV set is non-empty.
export function selectionBlockers(state: BoardState): SelectionBlocker[] {
  const blockers: SelectionBlocker[] = [];
  for (const [channel, selection] of Object.entries(state.selections)) {
    const terms = selection.oov ?? [];
    if (terms.length > 0) {
      blockers.push({ channel, terms });
    }
  }
  return blockers;
}

export function hasSelection(state: BoardState): boolean {
  return Object.keys(state.selections).length > 0;
}

export function isExportEnabled(state: BoardState): boolean {
  return hasSelection(state) && selectionBlockers(state).length === 0;
}
