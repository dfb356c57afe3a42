// Typed client for the annotation service.  The server is the single
// source of annotation truth; every mutation returns the fresh state.

import type {
  LoadResponse,
  OpenSessionResponse,
  PendingResponse,
  Point,
  SaveResponse,
  StateView,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly missingCount: number | null;

  constructor(status: number, code: string, message: string, missingCount: number | null = null) {
    super(message);
    this.status = status;
    this.code = code;
    this.missingCount = missingCount;
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  let missingCount: number | null = null;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "object" && body.detail !== null) {
      code = body.detail.code ?? code;
      message = body.detail.message ?? message;
      missingCount = body.detail.missing_count ?? null;
    } else if (typeof body.detail === "string") {
      message = body.detail;
    }
  } catch {
    // non-JSON error body: keep the HTTP status text
  }
  throw new ApiError(response.status, code, message, missingCount);
}

export class AnnotatorApi {
  constructor(private readonly base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      await parseError(response);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  openSession(videoPath: string): Promise<OpenSessionResponse> {
    return this.request("POST", "/sessions", { video_path: videoPath });
  }

  closeSession(id: string): Promise<void> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  async state(id: string): Promise<StateView> {
    const body = await this.request<{ state: StateView }>("GET", `/sessions/${id}/state`);
    return body.state;
  }

  frameUrl(id: string, index: number, scale: number): string {
    return `${this.base}/sessions/${id}/frames/${index}?scale=${scale}`;
  }

  pending(id: string, p1: Point, p2: Point, scale: number): Promise<PendingResponse> {
    return this.request("POST", `/sessions/${id}/pending`, {
      p1, p2, space: "display", scale,
    });
  }

  validate(id: string): Promise<{ state: StateView }> {
    return this.request("POST", `/sessions/${id}/validate`, {});
  }

  abort(id: string): Promise<{ state: StateView }> {
    return this.request("POST", `/sessions/${id}/abort`, {});
  }

  deleteAnnotation(id: string): Promise<{ deleted: boolean; state: StateView }> {
    return this.request("DELETE", `/sessions/${id}/annotation`);
  }

  setHidden(id: string, hidden: boolean): Promise<{ state: StateView }> {
    return this.request("POST", `/sessions/${id}/${hidden ? "hide" : "show"}`, {});
  }

  replicate(id: string): Promise<{ filled: number; state: StateView }> {
    return this.request("POST", `/sessions/${id}/replicate`, {});
  }

  browse(id: string, direction: "next" | "previous"): Promise<{ clamped: boolean; state: StateView }> {
    return this.request("PUT", `/sessions/${id}/cursor`, { direction });
  }

  seek(id: string, index: number): Promise<{ clamped: boolean; state: StateView }> {
    return this.request("PUT", `/sessions/${id}/cursor`, { index });
  }

  settings(
    id: string,
    values: { browse_offset?: string; thickness?: string },
  ): Promise<{ state: StateView }> {
    return this.request("PUT", `/sessions/${id}/settings`, values);
  }

  saveGt(id: string, directory: string, force: boolean): Promise<SaveResponse> {
    return this.request("POST", `/sessions/${id}/gt:save`, { directory, force });
  }

  loadGt(id: string, path: string): Promise<LoadResponse> {
    return this.request("POST", `/sessions/${id}/gt:load`, { path });
  }
}
