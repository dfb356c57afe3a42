// Mirrors of the annotation service's JSON payloads.

export interface Point {
  x: number;
  y: number;
}

export interface LineView {
  Y: number;
  phi: number;
  x_s: number;
  y_s: number;
  x_e: number;
  y_e: number;
}

export interface CurrentAnnotation extends LineView {
  hidden: boolean;
}

export interface StateView {
  cursor: number;
  frame_count: number;
  width: number;
  height: number;
  browse_offset: number;
  thickness: number;
  annotated_count: number;
  dirty: boolean;
  current: CurrentAnnotation | null;
  current_text: string;
}

export interface OpenSessionResponse {
  id: string;
  frame_count: number;
  width: number;
  height: number;
}

export interface PendingResponse {
  original: LineView;
  display: LineView;
  scale: number;
  state: StateView;
}

export interface SaveResponse {
  path: string;
  byte_count: number;
  state: StateView;
}

export interface ConsistencyWarning {
  frame: number;
  stored_y: number;
  stored_phi: number;
  corrected_y: number;
  corrected_phi: number;
}

export interface LoadResponse {
  warnings: ConsistencyWarning[];
  state: StateView;
}
