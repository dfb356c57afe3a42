"""HTTP facade over annotation sessions.

Sessions are owned by the service and addressed by opaque ids.  Every
mutating endpoint is serialized per session through a lock and returns
a fresh state snapshot; frames and GT bytes are served as binary.
Overlays are never burned into served frames; clients render them.
"""

from __future__ import annotations

import io
import threading
import uuid
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import cv2
from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles

from ..errors import AnnotatorError
from ..frame_source import IndexOutOfRange, open_source
from ..geometry import (
    GeometryError,
    Point,
    ScaleFactor,
    display_to_original,
)
from ..gt_format import GtFormatError, IoFailure, read_gt_file
from ..session import (
    CurrentNotAnnotated,
    IncompleteWarning,
    InvalidOffset,
    InvalidThickness,
    NoPendingLine,
    Session,
    gt_filename,
)
from .schemas import (
    CursorRequest,
    CursorResponse,
    DeleteResponse,
    LineView,
    LoadRequest,
    LoadResponse,
    ConsistencyWarningView,
    MutationRequest,
    OpenSessionRequest,
    OpenSessionResponse,
    PendingRequest,
    PendingResponse,
    ReplicateResponse,
    SaveRequest,
    SaveResponse,
    SettingsRequest,
    StateResponse,
    StateView,
)

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8750

_CONFLICT_ERRORS = (NoPendingLine, CurrentNotAnnotated)


@dataclass
class SessionHandle:
    id: str
    session: Session
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionRegistry:
    def __init__(self):
        self._handles: dict[str, SessionHandle] = {}
        self._lock = threading.Lock()

    def create(self, session: Session) -> SessionHandle:
        handle = SessionHandle(id=uuid.uuid4().hex, session=session)
        with self._lock:
            self._handles[handle.id] = handle
        return handle

    def get(self, session_id: str) -> SessionHandle:
        with self._lock:
            handle = self._handles.get(session_id)
        if handle is None:
            raise HTTPException(404, detail={"code": "unknown_session", "message": f"no session {session_id}"})
        return handle

    def remove(self, session_id: str) -> SessionHandle:
        with self._lock:
            handle = self._handles.pop(session_id, None)
        if handle is None:
            raise HTTPException(404, detail={"code": "unknown_session", "message": f"no session {session_id}"})
        return handle

    def close_all(self) -> None:
        with self._lock:
            handles = list(self._handles.values())
            self._handles.clear()
        for handle in handles:
            handle.session.source.close()


def _http_status(exc: AnnotatorError) -> int:
    if isinstance(exc, _CONFLICT_ERRORS):
        return 409
    if isinstance(exc, IoFailure):
        return 500
    return 422


@contextmanager
def _api_errors():
    try:
        yield
    except HTTPException:
        raise
    except FileNotFoundError as exc:
        raise HTTPException(404, detail={"code": "not_found", "message": str(exc)})
    except AnnotatorError as exc:
        raise HTTPException(_http_status(exc), detail={"code": exc.code, "message": str(exc)})


def _check_expected_cursor(session: Session, body: MutationRequest) -> None:
    if body.expected_cursor is not None and body.expected_cursor != session.cursor:
        raise HTTPException(
            409,
            detail={
                "code": "cursor_mismatch",
                "message": f"expected cursor {body.expected_cursor} but session is at {session.cursor}",
            },
        )


def create_app(
    video_root: Path,
    cache_frames: int = 32,
    ui_dir: Path | None = None,
) -> FastAPI:
    """Build the annotation service bound to a video root directory."""
    video_root = Path(video_root).resolve()
    registry = SessionRegistry()
    app = FastAPI(title="horizon-annotator", version="0.1.0")
    app.state.registry = registry

    def resolve_video_path(raw: str) -> Path:
        path = Path(raw)
        if not path.is_absolute():
            path = video_root / path
        path = path.resolve()
        if path != video_root and video_root not in path.parents:
            raise HTTPException(
                400,
                detail={"code": "path_escapes_root", "message": f"path {raw!r} escapes the video root"},
            )
        return path

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", response_model=OpenSessionResponse, status_code=201)
    def open_session(body: OpenSessionRequest):
        path = resolve_video_path(body.video_path)
        with _api_errors():
            source = open_source(path, cache_frames=cache_frames)
        handle = registry.create(Session(source))
        info = source.info
        return OpenSessionResponse(
            id=handle.id,
            frame_count=info.frame_count,
            width=info.dims.width,
            height=info.dims.height,
        )

    @app.delete("/sessions/{session_id}", status_code=204)
    def close_session(session_id: str):
        handle = registry.remove(session_id)
        handle.session.source.close()
        return Response(status_code=204)

    @app.get("/sessions/{session_id}/state", response_model=StateResponse)
    def get_state(session_id: str):
        handle = registry.get(session_id)
        with handle.lock:
            return StateResponse(state=StateView.from_session(handle.session))

    @app.get("/sessions/{session_id}/frames/{index}")
    def get_frame(session_id: str, index: int, scale: float = Query(default=1.0)):
        handle = registry.get(session_id)
        session = handle.session
        if not 0 < scale <= 1:
            raise HTTPException(
                422,
                detail={"code": "invalid_scale", "message": f"scale must be in (0, 1], got {scale}"},
            )
        if not 0 <= index < session.frame_count:
            raise HTTPException(
                404,
                detail={"code": "frame_out_of_range", "message": f"frame {index} out of range"},
            )
        with _api_errors():
            frame = session.source.get_frame(index)
        bgr = cv2.cvtColor(frame.pixels, cv2.COLOR_RGB2BGR)
        if scale != 1.0:
            width = max(1, round(session.dims.width * scale))
            height = max(1, round(session.dims.height * scale))
            bgr = cv2.resize(bgr, (width, height), interpolation=cv2.INTER_LINEAR)
        ok, png = cv2.imencode(".png", bgr)
        if not ok:
            raise HTTPException(500, detail={"code": "encode_failure", "message": "PNG encoding failed"})
        return Response(content=png.tobytes(), media_type="image/png")

    @app.post("/sessions/{session_id}/pending", response_model=PendingResponse)
    def set_pending(session_id: str, body: PendingRequest):
        handle = registry.get(session_id)
        with handle.lock:
            session = handle.session
            _check_expected_cursor(session, body)
            if body.space == "display":
                if body.scale is None:
                    raise HTTPException(
                        422,
                        detail={"code": "missing_scale", "message": "scale is required for display-space points"},
                    )
            scale_value = body.scale if body.scale is not None else 1.0
            with _api_errors():
                scale = ScaleFactor(scale_value) if 0 < scale_value <= 1 else None
                if scale is None:
                    raise HTTPException(
                        422,
                        detail={"code": "invalid_scale", "message": f"scale must be in (0, 1], got {scale_value}"},
                    )
                p1 = Point(body.p1.x, body.p1.y)
                p2 = Point(body.p2.x, body.p2.y)
                if body.space == "display":
                    p1 = display_to_original(p1, scale)
                    p2 = display_to_original(p2, scale)
                preview = session.set_pending(p1, p2)
            return PendingResponse(
                original=LineView.from_annotation(preview),
                display=LineView.from_annotation(preview, scale.s),
                scale=scale.s,
                state=StateView.from_session(session),
            )

    @app.post("/sessions/{session_id}/validate", response_model=StateResponse)
    def validate(session_id: str, body: MutationRequest | None = None):
        body = body or MutationRequest()
        handle = registry.get(session_id)
        with handle.lock:
            _check_expected_cursor(handle.session, body)
            with _api_errors():
                handle.session.validate_line()
            return StateResponse(state=StateView.from_session(handle.session))

    @app.post("/sessions/{session_id}/abort", response_model=StateResponse)
    def abort(session_id: str, body: MutationRequest | None = None):
        body = body or MutationRequest()
        handle = registry.get(session_id)
        with handle.lock:
            _check_expected_cursor(handle.session, body)
            handle.session.abort_pending()
            return StateResponse(state=StateView.from_session(handle.session))

    @app.delete("/sessions/{session_id}/annotation", response_model=DeleteResponse)
    def delete_annotation(session_id: str, expected_cursor: int | None = Query(default=None)):
        handle = registry.get(session_id)
        with handle.lock:
            _check_expected_cursor(handle.session, MutationRequest(expected_cursor=expected_cursor))
            deleted = handle.session.delete_annotation()
            return DeleteResponse(deleted=deleted, state=StateView.from_session(handle.session))

    def _set_hidden(session_id: str, body: MutationRequest, hidden: bool) -> StateResponse:
        handle = registry.get(session_id)
        with handle.lock:
            _check_expected_cursor(handle.session, body)
            handle.session.set_hidden(hidden)
            return StateResponse(state=StateView.from_session(handle.session))

    @app.post("/sessions/{session_id}/hide", response_model=StateResponse)
    def hide(session_id: str, body: MutationRequest | None = None):
        return _set_hidden(session_id, body or MutationRequest(), True)

    @app.post("/sessions/{session_id}/show", response_model=StateResponse)
    def show(session_id: str, body: MutationRequest | None = None):
        return _set_hidden(session_id, body or MutationRequest(), False)

    @app.post("/sessions/{session_id}/replicate", response_model=ReplicateResponse)
    def replicate(session_id: str, body: MutationRequest | None = None):
        body = body or MutationRequest()
        handle = registry.get(session_id)
        with handle.lock:
            _check_expected_cursor(handle.session, body)
            with _api_errors():
                filled = handle.session.replicate_backwards()
            return ReplicateResponse(filled=filled, state=StateView.from_session(handle.session))

    @app.put("/sessions/{session_id}/cursor", response_model=CursorResponse)
    def move_cursor(session_id: str, body: CursorRequest):
        if (body.index is None) == (body.direction is None):
            raise HTTPException(
                422,
                detail={"code": "bad_cursor_request", "message": "provide exactly one of index or direction"},
            )
        handle = registry.get(session_id)
        with handle.lock:
            session = handle.session
            _check_expected_cursor(session, body)
            clamped = False
            with _api_errors():
                if body.direction is not None:
                    clamped = session.browse(body.direction)
                else:
                    session.seek(body.index)
            return CursorResponse(clamped=clamped, state=StateView.from_session(session))

    @app.put("/sessions/{session_id}/settings", response_model=StateResponse)
    def update_settings(session_id: str, body: SettingsRequest):
        handle = registry.get(session_id)
        with handle.lock:
            session = handle.session
            _check_expected_cursor(session, body)
            with _api_errors():
                if body.browse_offset is not None:
                    session.set_browse_offset(body.browse_offset)
                if body.thickness is not None:
                    session.set_thickness(body.thickness)
            return StateResponse(state=StateView.from_session(session))

    @app.post("/sessions/{session_id}/gt:save", response_model=SaveResponse)
    def save_gt(session_id: str, body: SaveRequest):
        handle = registry.get(session_id)
        with handle.lock:
            session = handle.session
            _check_expected_cursor(session, body)
            with _api_errors():
                outcome = session.save(body.directory, force=body.force)
            if isinstance(outcome, IncompleteWarning):
                raise HTTPException(
                    409,
                    detail={
                        "code": "incomplete_annotations",
                        "message": f"{outcome.missing_count} frames are not annotated; re-invoke with force=true",
                        "missing_count": outcome.missing_count,
                    },
                )
            return SaveResponse(
                path=str(outcome.path),
                byte_count=outcome.byte_count,
                state=StateView.from_session(session),
            )

    @app.get("/sessions/{session_id}/gt")
    def download_gt(session_id: str):
        handle = registry.get(session_id)
        with handle.lock:
            session = handle.session
            data = session.to_gt_array().to_bytes()
            filename = gt_filename(session.source.info.stem)
        return Response(
            content=data,
            media_type="application/octet-stream",
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    @app.post("/sessions/{session_id}/gt:load", response_model=LoadResponse)
    def load_gt(session_id: str, body: LoadRequest):
        handle = registry.get(session_id)
        path = Path(body.path)
        if not path.is_absolute():
            path = video_root / path
        with handle.lock:
            session = handle.session
            _check_expected_cursor(session, body)
            with _api_errors():
                array = read_gt_file(path)
                warnings = session.load_gt(array)
            return LoadResponse(
                warnings=[ConsistencyWarningView.from_warning(w) for w in warnings],
                state=StateView.from_session(session),
            )

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
