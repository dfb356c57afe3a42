// DOM wiring for the four GUI blocks: load directories, image display,
// browse and annotation.  All behavior lives in the store / pure
// modules; this file only connects events and repaints.

import { AnnotatorApi } from "./api.js";
import { DragTracker } from "./drag.js";
import { computeScale, readoutText } from "./geometry.js";
import { actionForKey, actionForWheel, type UiAction } from "./keymap.js";
import { renderScene } from "./render.js";
import { UiStore } from "./store.js";
import type { Point } from "./types.js";

const store = new UiStore(new AnnotatorApi(""));
const drag = new DragTracker();

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const canvas = element<HTMLCanvasElement>("canvas");
const ctx = canvas.getContext("2d")!;
const readout = element<HTMLDivElement>("readout");
const frameLabel = element<HTMLDivElement>("frame-label");
const annotationLabel = element<HTMLDivElement>("current-annotation");
const counterLabel = element<HTMLDivElement>("annotated-counter");
const offsetEntry = element<HTMLInputElement>("offset-entry");
const thicknessEntry = element<HTMLInputElement>("thickness-entry");
const noticeBox = element<HTMLDivElement>("notice");
const modal = element<HTMLDivElement>("modal");
const modalText = element<HTMLParagraphElement>("modal-text");

let frameImage: HTMLImageElement | null = null;
let loadedFrameKey = "";

function mousePoint(event: MouseEvent): Point {
  const rect = canvas.getBoundingClientRect();
  return { x: event.clientX - rect.left, y: event.clientY - rect.top };
}

function repaint(): void {
  renderScene(ctx, frameImage, store.state, store.preview, drag.active, store.scale);
}

function refreshFrameImage(): void {
  const state = store.state;
  if (state === null || store.sessionId === null) {
    return;
  }
  const key = `${store.sessionId}:${state.cursor}:${store.scale}`;
  if (key === loadedFrameKey) {
    repaint();
    return;
  }
  const image = new Image();
  image.onload = () => {
    frameImage = image;
    loadedFrameKey = key;
    repaint();
  };
  image.src = store.api.frameUrl(store.sessionId, state.cursor, store.scale);
}

function updateScale(): void {
  const state = store.state;
  if (state === null) {
    return;
  }
  const holder = element<HTMLDivElement>("display-block");
  const maxWidth = Math.max(holder.clientWidth - 16, 100);
  const maxHeight = Math.max(window.innerHeight - 220, 100);
  store.scale = computeScale(state.width, state.height, maxWidth, maxHeight);
  canvas.width = Math.max(1, Math.round(state.width * store.scale));
  canvas.height = Math.max(1, Math.round(state.height * store.scale));
  refreshFrameImage();
}

store.subscribe(() => {
  const state = store.state;
  if (state !== null) {
    frameLabel.textContent = `frame ${state.cursor} / ${state.frame_count}`;
    annotationLabel.textContent = state.current_text;
    counterLabel.textContent = `${state.annotated_count} / ${state.frame_count} annotated` +
      (state.dirty ? " (unsaved)" : "");
    if (document.activeElement !== offsetEntry) {
      offsetEntry.value = String(state.browse_offset);
    }
    if (document.activeElement !== thicknessEntry) {
      thicknessEntry.value = String(state.thickness);
    }
  }
  if (store.notice !== null) {
    noticeBox.textContent = store.notice;
    noticeBox.hidden = false;
    setTimeout(() => {
      noticeBox.hidden = true;
      store.notice = null;
    }, 4000);
  }
  if (store.saveDialog !== null) {
    modalText.textContent =
      `${store.saveDialog.missingCount} frame(s) are not annotated. ` +
      "Save the file with missing annotations?";
    modal.hidden = false;
  } else {
    modal.hidden = true;
  }
  refreshFrameImage();
  repaint();
});

// ---- load directories block ----------------------------------------

element<HTMLButtonElement>("open-video").addEventListener("click", () => {
  const path = element<HTMLInputElement>("video-path").value.trim();
  if (path !== "") {
    void store.open(path).then(updateScale).catch((error) => {
      store.notice = String(error.message ?? error);
      noticeBox.textContent = store.notice;
      noticeBox.hidden = false;
    });
  }
});

element<HTMLButtonElement>("save-gt").addEventListener("click", () => {
  void store.save(element<HTMLInputElement>("save-dir").value.trim() || ".");
});

element<HTMLButtonElement>("load-gt").addEventListener("click", () => {
  const path = element<HTMLInputElement>("gt-path").value.trim();
  if (path !== "") {
    void store.loadGt(path);
  }
});

element<HTMLButtonElement>("modal-save-anyway").addEventListener("click", () => {
  void store.saveAnyway();
});
element<HTMLButtonElement>("modal-cancel").addEventListener("click", () => {
  store.dismissSaveDialog();
});

// ---- browse block ----------------------------------------------------

element<HTMLButtonElement>("prev").addEventListener("click", () => void store.browse("previous"));
element<HTMLButtonElement>("next").addEventListener("click", () => void store.browse("next"));

// ---- annotation block -------------------------------------------------

element<HTMLButtonElement>("validate").addEventListener("click", () => void store.validate());
element<HTMLButtonElement>("delete").addEventListener("click", () => void store.deleteAnnotation());
element<HTMLButtonElement>("hide").addEventListener("click", () => void store.setHidden(true));
element<HTMLButtonElement>("show").addEventListener("click", () => void store.setHidden(false));

function commitEntry(target: HTMLElement | null): void {
  if (target === offsetEntry) {
    void store.setBrowseOffset(offsetEntry.value);
  } else if (target === thicknessEntry) {
    void store.setThickness(thicknessEntry.value);
  }
}

// ---- display block: drag lifecycle and readout -------------------------

canvas.addEventListener("mousedown", (event) => {
  if (event.button === 0 && store.sessionId !== null) {
    drag.begin(mousePoint(event));
    repaint();
  } else if (event.button === 2) {
    // Right click before releasing the left button aborts the gesture.
    drag.abort();
    repaint();
  }
});

canvas.addEventListener("mousemove", (event) => {
  const point = mousePoint(event);
  readout.textContent = readoutText(point, store.scale);
  if (drag.move(point) !== null) {
    repaint();
  }
});

canvas.addEventListener("mouseup", (event) => {
  if (event.button === 0) {
    void store.pointerReleased(drag.release(mousePoint(event)));
  }
});

canvas.addEventListener("contextmenu", (event) => event.preventDefault());

canvas.addEventListener("wheel", (event) => {
  event.preventDefault();
  const action = actionForWheel(event.deltaY);
  if (action === "next" || action === "previous") {
    void store.browse(action);
  }
}, { passive: false });

// ---- keymap -------------------------------------------------------------

function dispatch(action: UiAction): void {
  switch (action) {
    case "next":
    case "previous":
      void store.browse(action);
      break;
    case "validate":
      void store.validate();
      break;
    case "replicate":
      void store.replicate();
      break;
    case "show":
      void store.setHidden(false);
      break;
    case "hide":
      void store.setHidden(true);
      break;
    case "delete":
      void store.deleteAnnotation();
      break;
    case "commit-entry":
      commitEntry(document.activeElement as HTMLElement | null);
      break;
  }
}

document.addEventListener("keydown", (event) => {
  const inTextEntry = document.activeElement instanceof HTMLInputElement;
  const action = actionForKey(event.key, inTextEntry);
  if (action !== null) {
    event.preventDefault();
    dispatch(action);
  }
});

window.addEventListener("resize", updateScale);
