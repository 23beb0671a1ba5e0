// Controller for the variant board: loads a topic's generated candidates,
// records the human's selections/edits, previews per-channel results, and
// downloads the exported run verbatim. Stale async responses are dropped
// by sequence number so a slow request can't overwrite a newer state.

import { QueryStudioClient, ServiceError } from "./api.js";
import {
  applySession,
  boardFromSession,
  type BoardState,
  isExportEnabled,
} from "./state.js";

export class QueryStudioBoard {
  private state: BoardState | null = null;
  private requestSeq = 0;

  constructor(private readonly client: QueryStudioClient) {}

  current(): BoardState {
    if (this.state === null) {
      throw new Error("no topic loaded");
    }
    return this.state;
  }

  isLoaded(): boolean {
    return this.state !== null;
  }

  async loadTopic(topicId: number, options: { nImages?: number; seed?: number } = {}):
      Promise<BoardState> {
    const seq = ++this.requestSeq;
    try {
      const payload = await this.client.generateVariants(topicId, options);
      if (seq === this.requestSeq) {
        this.state = boardFromSession(payload);
      }
    } catch (error) {
      this.noteError(error);
      throw error;
    }
    return this.current();
  }

  async selectCandidate(channel: string, index: number): Promise<BoardState> {
    const state = this.current();
    const seq = ++this.requestSeq;
    try {
      const payload = await this.client.select(state.sessionId, channel, {
        candidateIndex: index,
      });
      if (seq === this.requestSeq) {
        this.state = applySession(state, payload);
      }
    } catch (error) {
      this.noteError(error);
      throw error;
    }
    return this.current();
  }

  async editText(channel: string, text: string): Promise<BoardState> {
    const state = this.current();
    const seq = ++this.requestSeq;
    try {
      const payload = await this.client.select(state.sessionId, channel, {
        editedText: text,
      });
      if (seq === this.requestSeq) {
        this.state = applySession(state, payload);
      }
    } catch (error) {
      this.noteError(error);
      throw error;
    }
    return this.current();
  }

  async refreshPreview(depth = 20): Promise<BoardState> {
    const state = this.current();
    const seq = ++this.requestSeq;
    try {
      const preview = await this.client.searchSession(state.sessionId, depth);
      if (seq === this.requestSeq && this.state !== null) {
        this.state = { ...this.state, preview, lastError: null };
      }
    } catch (error) {
      this.noteError(error);
      throw error;
    }
    return this.current();
  }

  // Returns the service-produced file bytes unchanged; the browser layer
  // hands them straight to the download.
  async exportRun(runTag: string): Promise<Uint8Array> {
    const state = this.current();
    if (!isExportEnabled(state)) {
      throw new Error("export blocked: selections missing or out-of-vocabulary");
    }
    try {
      const bytes = await this.client.exportManualRun([state.sessionId], runTag);
      this.state = { ...state, exportViolations: [], lastError: null };
      return bytes;
    } catch (error) {
      if (error instanceof ServiceError && error.payload.error === "OovViolation") {
        this.state = {
          ...state,
          exportViolations: error.payload.violations ?? [],
          lastError: error.message,
        };
      } else {
        this.noteError(error);
      }
      throw error;
    }
  }

  private noteError(error: unknown): void {
    if (this.state !== null) {
      const message = error instanceof Error ? error.message : String(error);
      this.state = { ...this.state, lastError: message };
    }
  }
}
