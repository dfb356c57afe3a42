// Canvas scene: frame image, validated annotation (solid red at the
// chosen thickness), server preview (dashed, visually distinct so a
// not-yet-validated line is never mistaken for a stored one) and the
// live rubber band while dragging.

import type { DragState } from "./drag.js";
import { originalToDisplay } from "./geometry.js";
import type { PreviewLine } from "./store.js";
import type { StateView } from "./types.js";

export function renderScene(
  ctx: CanvasRenderingContext2D,
  frame: CanvasImageSource | null,
  state: StateView | null,
  preview: PreviewLine | null,
  drag: DragState | null,
  scale: number,
): void {
  const canvas = ctx.canvas;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (frame !== null) {
    ctx.drawImage(frame, 0, 0);
  }
  if (state === null) {
    return;
  }

  const current = state.current;
  if (current !== null && !current.hidden) {
    const start = originalToDisplay({ x: current.x_s, y: current.y_s }, scale);
    const end = originalToDisplay({ x: current.x_e, y: current.y_e }, scale);
    ctx.save();
    ctx.strokeStyle = "#ff0000";
    ctx.lineWidth = Math.max(1, state.thickness);
    ctx.beginPath();
    ctx.moveTo(start.x, start.y);
    ctx.lineTo(end.x, end.y);
    ctx.stroke();
    ctx.restore();
  }

  if (preview !== null) {
    const start = originalToDisplay({ x: preview.original.x_s, y: preview.original.y_s }, scale);
    const end = originalToDisplay({ x: preview.original.x_e, y: preview.original.y_e }, scale);
    ctx.save();
    ctx.strokeStyle = "#ff4040";
    ctx.lineWidth = 1;
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(start.x, start.y);
    ctx.lineTo(end.x, end.y);
    ctx.stroke();
    ctx.restore();
  }

  if (drag !== null) {
    ctx.save();
    ctx.strokeStyle = "#e0e0e0";
    ctx.lineWidth = 1;
    ctx.setLineDash([3, 3]);
    ctx.beginPath();
    ctx.moveTo(drag.start.x, drag.start.y);
    ctx.lineTo(drag.current.x, drag.current.y);
    ctx.stroke();
    ctx.restore();
  }
}
