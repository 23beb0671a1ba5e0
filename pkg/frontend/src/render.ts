// HTML-string rendering of the variant board. Pure functions of state so
// the snapshot tests can compare rendered values against recorded service
// fixtures without a DOM.

import type { SearchHitPayload, SearchResponse } from "./api.js";
import {
  ALL_CHANNELS,
  type BoardState,
  type Candidate,
  isExportEnabled,
  selectionBlockers,
} from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// Wrap service-reported OOV terms in <mark>; matching is display-only.
export function highlightOov(text: string, oov: string[]): string {
  let html = escapeHtml(text);
  for (const term of [...oov].sort((a, b) => b.length - a.length)) {
    const pattern = new RegExp(`\\b(${escapeRegExp(escapeHtml(term))})\\b`, "gi");
    html = html.replace(pattern, '<mark class="oov">$1</mark>');
  }
  return html;
}

function escapeRegExp(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

const CHANNEL_TITLES: Record<string, string> = {
  original: "Original query",
  t2t: "Text rewrites",
  t2i: "Generated images",
  i2t: "Image captions",
};

function renderCandidate(channel: string, candidate: Candidate, selected: boolean): string {
  const classes = ["candidate", selected ? "selected" : ""].filter(Boolean).join(" ");
  const image = candidate.imageDataUrl
    ? `<img class="thumb" alt="${escapeHtml(candidate.label)}" src="${candidate.imageDataUrl}">`
    : "";
  const oovNote = candidate.oov.length
    ? `<span class="oov-note">OOV: ${candidate.oov.map(escapeHtml).join(", ")}</span>`
    : "";
  return `
    <li class="${classes}" data-channel="${channel}" data-index="${candidate.index}">
      ${image}
      <span class="label">${highlightOov(candidate.label, candidate.oov)}</span>
      ${oovNote}
      <button class="pick" data-channel="${channel}" data-index="${candidate.index}">select</button>
    </li>`;
}

function renderChannelPanel(state: BoardState, channel: (typeof ALL_CHANNELS)[number]): string {
  const candidates = state.candidates[channel];
  const selection = state.selections[channel];
  const body = candidates.length
    ? `<ul>${candidates
        .map((c) => renderCandidate(channel, c, selection?.candidate_index === c.index))
        .join("")}</ul>`
    : '<p class="placeholder">channel disabled or empty</p>';
  const edited =
    selection?.edited && selection.edited_text !== null
      ? `<p class="edited">edited: ${highlightOov(selection.edited_text, selection.oov ?? [])}</p>`
      : "";
  return `
    <section class="channel" id="channel-${channel}">
      <h2>${CHANNEL_TITLES[channel]}</h2>
      ${body}
      ${edited}
      <form class="edit-form" data-channel="${channel}">
        <input name="edited_text" placeholder="edit ${channel} query">
        <button type="submit">apply edit</button>
      </form>
    </section>`;
}

function renderHits(hits: SearchHitPayload[], depth: number): string {
  const rows = hits
    .slice(0, depth)
    .map(
      (hit, i) =>
        `<tr><td>${i + 1}</td><td>${escapeHtml(hit.shot_id)}</td>` +
        `<td>${hit.score.toFixed(4)}</td></tr>`,
    )
    .join("");
  return `<table class="hits"><tbody>${rows}</tbody></table>`;
}

export function renderPreview(preview: SearchResponse | null, depth = 20): string {
  if (preview === null) {
    return '<p class="placeholder">no preview yet</p>';
  }
  const columns = Object.entries(preview.channels)
    .map(([channel, hits]) => `<div class="col"><h3>${escapeHtml(channel)}</h3>${renderHits(hits, depth)}</div>`)
    .join("");
  const fused = `<div class="col fused"><h3>fused</h3>${renderHits(preview.fused, depth)}</div>`;
  return `<div class="preview-grid">${columns}${fused}</div>`;
}

export function renderExportControls(state: BoardState): string {
  const enabled = isExportEnabled(state);
  const blockers = selectionBlockers(state);
  const notes = blockers
    .map(
      (b) =>
        `<li class="blocker">${escapeHtml(b.channel)}: ${b.terms.map(escapeHtml).join(", ")}</li>`,
    )
    .join("");
  const violations = state.exportViolations
    .map(
      (v) =>
        `<li class="violation">topic ${v.topic_id}: ${v.terms.map(escapeHtml).join(", ")}</li>`,
    )
    .join("");
  return `
    <section class="export">
      <button id="export-run" ${enabled ? "" : "disabled"}>export manual run</button>
      ${notes ? `<ul class="export-blockers">${notes}</ul>` : ""}
      ${violations ? `<ul class="export-violations">${violations}</ul>` : ""}
    </section>`;
}

export function renderBanner(message: string | null): string {
  return message
    ? `<div class="banner error">${escapeHtml(message)} <button id="retry">retry</button></div>`
    : "";
}

export function renderBoard(state: BoardState): string {
  const warnings = state.warnings.length
    ? `<ul class="warnings">${state.warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("")}</ul>`
    : "";
  return `
    ${renderBanner(state.lastError)}
    <header>
      <h1>Topic ${state.topicId}</h1>
      <p class="original">${highlightOov(state.originalQuery, state.originalOov)}</p>
    </header>
    ${warnings}
    <main class="board">
      ${ALL_CHANNELS.map((channel) => renderChannelPanel(state, channel)).join("")}
    </main>
    <section class="preview">${renderPreview(state.preview)}</section>
    ${renderExportControls(state)}`;
}
