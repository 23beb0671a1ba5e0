// Browser entry point: thin DOM glue around the board controller. All
// state lives in service sessions; refreshing the page re-fetches.

import { QueryStudioClient } from "./api.js";
import { QueryStudioBoard } from "./board.js";
import { renderBoard } from "./render.js";

const client = new QueryStudioClient("");
const board = new QueryStudioBoard(client);

const root = document.getElementById("app") as HTMLElement;
const topicInput = document.getElementById("topic-id") as HTMLInputElement;
const loadButton = document.getElementById("load-topic") as HTMLButtonElement;
const tagInput = document.getElementById("run-tag") as HTMLInputElement;

function redraw(): void {
  if (board.isLoaded()) {
    root.innerHTML = renderBoard(board.current());
  }
}

async function guard(action: () => Promise<unknown>): Promise<void> {
  try {
    await action();
  } catch {
    // the controller recorded the error; the banner renders it
  }
  redraw();
}

loadButton.addEventListener("click", () => {
  const topicId = Number(topicInput.value);
  if (Number.isInteger(topicId) && topicId > 0) {
    void guard(() => board.loadTopic(topicId));
  }
});

root.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.matches("button.pick")) {
    const channel = target.dataset.channel as string;
    const index = Number(target.dataset.index);
    void guard(async () => {
      await board.selectCandidate(channel, index);
      await board.refreshPreview();
    });
  } else if (target.id === "export-run") {
    void guard(async () => {
      const tag = tagInput.value.trim() || "M.UI.1";
      const bytes = await board.exportRun(tag);
      const blob = new Blob([bytes.buffer as ArrayBuffer], { type: "text/plain" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `${tag}.txt`;
      link.click();
      URL.revokeObjectURL(link.href);
    });
  } else if (target.id === "retry") {
    void guard(() => board.refreshPreview());
  }
});

root.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  if (form.matches("form.edit-form")) {
    event.preventDefault();
    const channel = form.dataset.channel as string;
    const input = form.elements.namedItem("edited_text") as HTMLInputElement;
    const text = input.value.trim();
    if (text) {
      void guard(async () => {
        await board.editText(channel, text);
        await board.refreshPreview();
      });
    }
  }
});
