// Canvas drag lifecycle.  Drawing holds the left button; releasing asks
// the server to infer the full line.  A right click before release
// aborts the gesture with no server call.  A press-release within the
// click tolerance is not a drawing gesture but a validate click.

import type { Point } from "./types.js";

export const CLICK_TOLERANCE_PX = 3;

export interface DragState {
  start: Point;
  current: Point;
  aborted: boolean;
}

export type DragOutcome =
  | { kind: "draw"; p1: Point; p2: Point }
  | { kind: "click"; at: Point }
  | { kind: "aborted" };

export class DragTracker {
  private drag: DragState | null = null;

  /** Rubber-band segment to render, or null when idle/aborted. */
  get active(): DragState | null {
    return this.drag !== null && !this.drag.aborted ? this.drag : null;
  }

  begin(p: Point): void {
    this.drag = { start: p, current: p, aborted: false };
  }

  move(p: Point): DragState | null {
    if (this.drag !== null && !this.drag.aborted) {
      this.drag.current = p;
    }
    return this.active;
  }

  /** Right-click abort; the gesture stays consumed until release. */
  abort(): boolean {
    if (this.drag === null || this.drag.aborted) {
      return false;
    }
    this.drag.aborted = true;
    return true;
  }

  release(p: Point): DragOutcome | null {
    const drag = this.drag;
    this.drag = null;
    if (drag === null) {
      return null;
    }
    if (drag.aborted) {
      return { kind: "aborted" };
    }
    if (Math.hypot(p.x - drag.start.x, p.y - drag.start.y) <= CLICK_TOLERANCE_PX) {
      return { kind: "click", at: p };
    }
    return { kind: "draw", p1: drag.start, p2: p };
  }
}
