// GUI keymap: wheel and arrow keys browse, single letters act on the
// current frame, Enter commits text entries.  Keys are inert while a
// text entry has focus (except Enter) so typing "25" into the offset
// entry never triggers show/delete.

export type UiAction =
  | "next"
  | "previous"
  | "validate"
  | "replicate"
  | "show"
  | "hide"
  | "delete"
  | "commit-entry";

const KEY_ACTIONS: Record<string, UiAction> = {
  ArrowRight: "next",
  ArrowLeft: "previous",
  v: "validate",
  w: "replicate",
  s: "show",
  h: "hide",
  d: "delete",
};

export function actionForKey(key: string, inTextEntry: boolean): UiAction | null {
  if (inTextEntry) {
    return key === "Enter" ? "commit-entry" : null;
  }
  return KEY_ACTIONS[key] ?? null;
}

/** Wheel roll-up browses forward, roll-down backward. */
export function actionForWheel(deltaY: number): UiAction | null {
  if (deltaY < 0) return "next";
  if (deltaY > 0) return "previous";
  return null;
}
