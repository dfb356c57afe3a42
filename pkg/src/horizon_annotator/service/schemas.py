"""Request/response models for the annotation HTTP API."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel

from ..geometry import LineAnnotation
from ..session import ConsistencyWarning, Session


class PointBody(BaseModel):
    x: float
    y: float


class OpenSessionRequest(BaseModel):
    video_path: str


class OpenSessionResponse(BaseModel):
    id: str
    frame_count: int
    width: int
    height: int


class LineView(BaseModel):
    Y: float
    phi: float
    x_s: float
    y_s: float
    x_e: float
    y_e: float

    @classmethod
    def from_annotation(cls, a: LineAnnotation, scale: float = 1.0) -> "LineView":
        return cls(
            Y=a.Y * scale, phi=a.phi,
            x_s=a.x_s * scale, y_s=a.y_s * scale,
            x_e=a.x_e * scale, y_e=a.y_e * scale,
        )


class CurrentAnnotationView(LineView):
    hidden: bool


class StateView(BaseModel):
    """Authoritative session snapshot embedded in every mutation response."""

    cursor: int
    frame_count: int
    width: int
    height: int
    browse_offset: int
    thickness: int
    annotated_count: int
    dirty: bool
    current: Optional[CurrentAnnotationView]
    current_text: str

    @classmethod
    def from_session(cls, session: Session) -> "StateView":
        slot = session.current_slot
        current = None
        if slot.annotation is not None:
            current = CurrentAnnotationView(
                **LineView.from_annotation(slot.annotation).model_dump(),
                hidden=slot.hidden,
            )
        return cls(
            cursor=session.cursor,
            frame_count=session.frame_count,
            width=session.dims.width,
            height=session.dims.height,
            browse_offset=session.browse_offset,
            thickness=session.thickness,
            annotated_count=session.track.annotated_count,
            dirty=session.dirty,
            current=current,
            current_text=session.current_annotation_text(),
        )


class MutationRequest(BaseModel):
    # Stale-click guard: when set, the mutation is rejected with 409
    # unless the session cursor still matches.
    expected_cursor: Optional[int] = None


class PendingRequest(MutationRequest):
    p1: PointBody
    p2: PointBody
    space: Literal["display", "original"] = "original"
    scale: Optional[float] = None


class PendingResponse(BaseModel):
    original: LineView
    display: LineView
    scale: float
    state: StateView


class StateResponse(BaseModel):
    state: StateView


class ReplicateResponse(BaseModel):
    filled: int
    state: StateView


class DeleteResponse(BaseModel):
    deleted: bool
    state: StateView


class CursorRequest(MutationRequest):
    index: Optional[int] = None
    direction: Optional[Literal["next", "previous"]] = None


class CursorResponse(BaseModel):
    clamped: bool
    state: StateView


class SettingsRequest(MutationRequest):
    # Raw values are passed through to the session parser so the API
    # rejects exactly what the GUI text entries reject.
    browse_offset: Optional[Union[int, str]] = None
    thickness: Optional[Union[int, str]] = None


class SaveRequest(MutationRequest):
    directory: str
    force: bool = False


class SaveResponse(BaseModel):
    path: str
    byte_count: int
    state: StateView


class LoadRequest(MutationRequest):
    path: str


class ConsistencyWarningView(BaseModel):
    frame: int
    stored_y: float
    stored_phi: float
    corrected_y: float
    corrected_phi: float

    @classmethod
    def from_warning(cls, w: ConsistencyWarning) -> "ConsistencyWarningView":
        return cls(
            frame=w.frame,
            stored_y=w.stored_y,
            stored_phi=w.stored_phi,
            corrected_y=w.corrected_y,
            corrected_phi=w.corrected_phi,
        )


class LoadResponse(BaseModel):
    warnings: list[ConsistencyWarningView]
    state: StateView
