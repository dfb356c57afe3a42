// Client state container.  The server is the single source of truth:
// every mutation response carries the authoritative state, and the view
// is always re-rendered from it.  At most one mutation is in flight at
// a time to respect the server's per-session serialization.

import { AnnotatorApi, ApiError } from "./api.js";
import type { DragOutcome } from "./drag.js";
import { displayToOriginal } from "./geometry.js";
import type { LineView, Point, StateView } from "./types.js";

export interface PreviewLine {
  original: LineView;
  display: LineView;
}

export interface SaveDialog {
  directory: string;
  missingCount: number;
}

type Listener = () => void;

export class UiStore {
  readonly api: AnnotatorApi;

  sessionId: string | null = null;
  state: StateView | null = null;
  scale = 1;
  preview: PreviewLine | null = null;
  notice: string | null = null;
  saveDialog: SaveDialog | null = null;
  lastSavedPath: string | null = null;
  lastReplicated = 0;

  private queue: Promise<unknown> = Promise.resolve();
  private listeners: Listener[] = [];

  constructor(api: AnnotatorApi) {
    this.api = api;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  private setState(state: StateView): void {
    this.state = state;
    this.emit();
  }

  /** Serialize mutations: one in-flight request per session. */
  private enqueue<T>(op: () => Promise<T>): Promise<T> {
    const next = this.queue.then(op, op);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private async guarded<T>(op: () => Promise<T>): Promise<T | null> {
    try {
      return await this.enqueue(op);
    } catch (error) {
      if (error instanceof ApiError) {
        this.notice = error.message;
        this.emit();
        return null;
      }
      throw error;
    }
  }

  async open(videoPath: string): Promise<void> {
    const opened = await this.enqueue(() => this.api.openSession(videoPath));
    this.sessionId = opened.id;
    this.preview = null;
    this.saveDialog = null;
    this.setState(await this.api.state(opened.id));
  }

  private get id(): string {
    if (this.sessionId === null) {
      throw new Error("no open session");
    }
    return this.sessionId;
  }

  /** Re-fetch the authoritative state (used after rendering doubts). */
  async refresh(): Promise<void> {
    this.setState(await this.api.state(this.id));
  }

  toOriginal(displayPoint: Point): Point {
    return displayToOriginal(displayPoint, this.scale);
  }

  /** Outcome of a finished canvas gesture. */
  async pointerReleased(outcome: DragOutcome | null): Promise<void> {
    if (outcome === null) {
      return;
    }
    if (outcome.kind === "aborted") {
      // Right-click abort: drop the gesture with no server call.
      return;
    }
    if (outcome.kind === "click") {
      // A click (no drag) validates the previewed line, mouse-only flow.
      if (this.preview !== null) {
        await this.validate();
      }
      return;
    }
    await this.guarded(async () => {
      const response = await this.api.pending(this.id, outcome.p1, outcome.p2, this.scale);
      this.preview = { original: response.original, display: response.display };
      this.setState(response.state);
    });
  }

  async validate(): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.validate(this.id);
      this.preview = null;
      this.setState(response.state);
    });
  }

  async deleteAnnotation(): Promise<void> {
    await this.guarded(async () => {
      this.setState((await this.api.deleteAnnotation(this.id)).state);
    });
  }

  async setHidden(hidden: boolean): Promise<void> {
    await this.guarded(async () => {
      this.setState((await this.api.setHidden(this.id, hidden)).state);
    });
  }

  async replicate(): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.replicate(this.id);
      this.lastReplicated = response.filled;
      this.setState(response.state);
    });
  }

  async browse(direction: "next" | "previous"): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.browse(this.id, direction);
      this.preview = null; // pending is gone server-side after any move
      this.setState(response.state);
    });
  }

  async setBrowseOffset(raw: string): Promise<void> {
    await this.guarded(async () => {
      this.setState((await this.api.settings(this.id, { browse_offset: raw })).state);
    });
  }

  async setThickness(raw: string): Promise<void> {
    await this.guarded(async () => {
      this.setState((await this.api.settings(this.id, { thickness: raw })).state);
    });
  }

  /**
   * Save the GT file.  An incomplete track opens the confirm dialog
   * instead of writing; saveAnyway() forces past it.
   */
  async save(directory: string, force = false): Promise<boolean> {
    try {
      const response = await this.enqueue(() => this.api.saveGt(this.id, directory, force));
      this.lastSavedPath = response.path;
      this.saveDialog = null;
      this.setState(response.state);
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.code === "incomplete_annotations") {
        this.saveDialog = { directory, missingCount: error.missingCount ?? 0 };
        this.emit();
        return false;
      }
      if (error instanceof ApiError) {
        this.notice = error.message;
        this.emit();
        return false;
      }
      throw error;
    }
  }

  async saveAnyway(): Promise<boolean> {
    const dialog = this.saveDialog;
    if (dialog === null) {
      return false;
    }
    return this.save(dialog.directory, true);
  }

  dismissSaveDialog(): void {
    this.saveDialog = null;
    this.emit();
  }

  async loadGt(path: string): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.loadGt(this.id, path);
      if (response.warnings.length > 0) {
        this.notice = `${response.warnings.length} row(s) had inconsistent stored parameters; endpoints used`;
      }
      this.preview = null;
      this.setState(response.state);
    });
  }

  clearNotice(): void {
    this.notice = null;
    this.emit();
  }
}
