import io

import cv2
import numpy as np
import pytest
from fastapi.testclient import TestClient

from horizon_annotator.gt_format import GtArray, read_gt_file, write_gt_file
from horizon_annotator.service import create_app
from horizon_annotator.session import InvalidOffset, Session

from conftest import ArraySource, make_image_dir, make_video


@pytest.fixture
def video_root(tmp_path):
    root = tmp_path / "videos"
    root.mkdir()
    make_video(root / "clip.mp4", 10)
    make_image_dir(root / "frames", 5)
    (root / "clip.mkv").write_bytes(b"\x00" * 32)
    return root


@pytest.fixture
def client(video_root):
    app = create_app(video_root)
    with TestClient(app) as client:
        yield client
    app.state.registry.close_all()


@pytest.fixture
def sid(client):
    response = client.post("/sessions", json={"video_path": "clip.mp4"})
    assert response.status_code == 201
    return response.json()["id"]


def state_of(client, sid):
    response = client.get(f"/sessions/{sid}/state")
    assert response.status_code == 200
    return response.json()["state"]


def draw(client, sid, y=20.0, validate=True):
    response = client.post(
        f"/sessions/{sid}/pending",
        json={"p1": {"x": 1, "y": y}, "p2": {"x": 60, "y": y}},
    )
    assert response.status_code == 200, response.text
    if validate:
        assert client.post(f"/sessions/{sid}/validate").status_code == 200
    return response.json()


def annotate_all(client, sid, frame_count=10, y=20.0):
    client.put(f"/sessions/{sid}/cursor", json={"index": frame_count - 1})
    draw(client, sid, y)
    assert client.post(f"/sessions/{sid}/replicate").status_code == 200


class TestOpenSession:
    def test_open_video(self, client):
        response = client.post("/sessions", json={"video_path": "clip.mp4"})
        assert response.status_code == 201
        body = response.json()
        assert body["frame_count"] == 10
        assert (body["width"], body["height"]) == (64, 48)

    def test_open_image_directory(self, client):
        response = client.post("/sessions", json={"video_path": "frames"})
        assert response.status_code == 201
        assert response.json()["frame_count"] == 5

    def test_unsupported_format(self, client):
        response = client.post("/sessions", json={"video_path": "clip.mkv"})
        assert response.status_code == 422
        assert response.json()["detail"]["code"] == "unsupported_format"

    def test_missing_file(self, client):
        response = client.post("/sessions", json={"video_path": "absent.mp4"})
        assert response.status_code == 404

    def test_path_traversal_rejected(self, client):
        response = client.post("/sessions", json={"video_path": "../../etc/passwd.mp4"})
        assert response.status_code == 400
        assert response.json()["detail"]["code"] == "path_escapes_root"

    def test_absolute_path_outside_root_rejected(self, client):
        response = client.post("/sessions", json={"video_path": "/etc/passwd.mp4"})
        assert response.status_code == 400

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/state").status_code == 404

    def test_close_session(self, client, sid):
        assert client.delete(f"/sessions/{sid}").status_code == 204
        assert client.get(f"/sessions/{sid}/state").status_code == 404


class TestFrames:
    def test_full_size_png(self, client, sid):
        response = client.get(f"/sessions/{sid}/frames/0")
        assert response.status_code == 200
        assert response.headers["content-type"] == "image/png"
        image = cv2.imdecode(np.frombuffer(response.content, np.uint8), cv2.IMREAD_COLOR)
        assert image.shape == (48, 64, 3)

    def test_scaled_frame(self, client, sid):
        response = client.get(f"/sessions/{sid}/frames/0", params={"scale": 0.5})
        image = cv2.imdecode(np.frombuffer(response.content, np.uint8), cv2.IMREAD_COLOR)
        assert image.shape == (24, 32, 3)

    def test_upscale_rejected(self, client, sid):
        assert client.get(f"/sessions/{sid}/frames/0", params={"scale": 1.5}).status_code == 422
        assert client.get(f"/sessions/{sid}/frames/0", params={"scale": 0}).status_code == 422

    def test_frame_out_of_range(self, client, sid):
        assert client.get(f"/sessions/{sid}/frames/10").status_code == 404


class TestPending:
    def test_original_space(self, client, sid):
        body = draw(client, sid, y=20, validate=False)
        assert body["original"]["Y"] == 20
        assert body["original"]["phi"] == 0
        assert body["display"] == body["original"]

    def test_display_space_converts(self, client, sid):
        response = client.post(
            f"/sessions/{sid}/pending",
            json={
                "p1": {"x": 0.5, "y": 10}, "p2": {"x": 30, "y": 10},
                "space": "display", "scale": 0.5,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["original"]["Y"] == 20
        assert body["display"]["Y"] == 10
        assert body["display"]["x_e"] == body["original"]["x_e"] * 0.5

    def test_display_space_requires_scale(self, client, sid):
        response = client.post(
            f"/sessions/{sid}/pending",
            json={"p1": {"x": 1, "y": 5}, "p2": {"x": 60, "y": 5}, "space": "display"},
        )
        assert response.status_code == 422
        assert response.json()["detail"]["code"] == "missing_scale"

    def test_degenerate_line(self, client, sid):
        response = client.post(
            f"/sessions/{sid}/pending",
            json={"p1": {"x": 5, "y": 1}, "p2": {"x": 5, "y": 40}},
        )
        assert response.status_code == 422
        assert response.json()["detail"]["code"] == "degenerate_line"

    def test_out_of_frame(self, client, sid):
        response = client.post(
            f"/sessions/{sid}/pending",
            json={"p1": {"x": -4, "y": 1}, "p2": {"x": 50, "y": 40}},
        )
        assert response.status_code == 422
        assert response.json()["detail"]["code"] == "out_of_frame"


class TestMutations:
    def test_validate_populates_current(self, client, sid):
        draw(client, sid, y=21)
        state = state_of(client, sid)
        assert state["current"]["Y"] == 21
        assert state["current"]["hidden"] is False
        assert state["annotated_count"] == 1
        assert state["dirty"] is True
        assert state["current_text"] == "Y=21.00 px, phi=0.00 deg"

    def test_validate_without_pending_409(self, client, sid):
        response = client.post(f"/sessions/{sid}/validate")
        assert response.status_code == 409
        assert response.json()["detail"]["code"] == "no_pending_line"

    def test_abort_discards_pending(self, client, sid):
        draw(client, sid, validate=False)
        assert client.post(f"/sessions/{sid}/abort").status_code == 200
        assert client.post(f"/sessions/{sid}/validate").status_code == 409

    def test_delete(self, client, sid):
        draw(client, sid)
        response = client.delete(f"/sessions/{sid}/annotation")
        assert response.status_code == 200
        assert response.json()["deleted"] is True
        assert state_of(client, sid)["current_text"] == "???"

    def test_hide_show(self, client, sid):
        draw(client, sid)
        assert client.post(f"/sessions/{sid}/hide").json()["state"]["current"]["hidden"] is True
        assert client.post(f"/sessions/{sid}/show").json()["state"]["current"]["hidden"] is False

    def test_replicate_without_annotation_409(self, client, sid):
        response = client.post(f"/sessions/{sid}/replicate")
        assert response.status_code == 409
        assert response.json()["detail"]["code"] == "current_not_annotated"

    def test_replicate_fills_backwards(self, client, sid):
        client.put(f"/sessions/{sid}/cursor", json={"index": 9})
        draw(client, sid, y=30)
        response = client.post(f"/sessions/{sid}/replicate")
        assert response.json()["filled"] == 9
        assert response.json()["state"]["annotated_count"] == 10

    def test_cursor_direction_and_clamp(self, client, sid):
        response = client.put(f"/sessions/{sid}/cursor", json={"direction": "next"})
        assert response.json()["state"]["cursor"] == 1
        assert response.json()["clamped"] is False
        client.put(f"/sessions/{sid}/cursor", json={"index": 9})
        response = client.put(f"/sessions/{sid}/cursor", json={"direction": "next"})
        assert response.json()["clamped"] is True
        assert response.json()["state"]["cursor"] == 9

    def test_cursor_index_out_of_range(self, client, sid):
        response = client.put(f"/sessions/{sid}/cursor", json={"index": 99})
        assert response.status_code == 422

    def test_cursor_requires_exactly_one_field(self, client, sid):
        assert client.put(f"/sessions/{sid}/cursor", json={}).status_code == 422
        response = client.put(
            f"/sessions/{sid}/cursor", json={"index": 1, "direction": "next"}
        )
        assert response.status_code == 422

    def test_cursor_move_clears_pending(self, client, sid):
        draw(client, sid, validate=False)
        client.put(f"/sessions/{sid}/cursor", json={"direction": "next"})
        assert client.post(f"/sessions/{sid}/validate").status_code == 409

    def test_settings_roundtrip(self, client, sid):
        response = client.put(
            f"/sessions/{sid}/settings", json={"browse_offset": "25", "thickness": 5}
        )
        state = response.json()["state"]
        assert state["browse_offset"] == 25
        assert state["thickness"] == 5

    def test_settings_invalid_offset_message_matches_session(self, client, sid):
        response = client.put(f"/sessions/{sid}/settings", json={"browse_offset": "abc"})
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert detail["code"] == "invalid_offset"
        try:
            Session(ArraySource()).set_browse_offset("abc")
        except InvalidOffset as exc:
            assert detail["message"] == str(exc)
        assert state_of(client, sid)["browse_offset"] == 1  # prior value retained

    def test_settings_invalid_thickness(self, client, sid):
        response = client.put(f"/sessions/{sid}/settings", json={"thickness": "-2"})
        assert response.status_code == 422
        assert response.json()["detail"]["code"] == "invalid_thickness"
        assert state_of(client, sid)["thickness"] == 2

    def test_expected_cursor_guard(self, client, sid):
        client.put(f"/sessions/{sid}/cursor", json={"index": 3})
        response = client.post(
            f"/sessions/{sid}/pending",
            json={"p1": {"x": 1, "y": 5}, "p2": {"x": 60, "y": 5}, "expected_cursor": 0},
        )
        assert response.status_code == 409
        assert response.json()["detail"]["code"] == "cursor_mismatch"
        draw(client, sid)
        response = client.delete(f"/sessions/{sid}/annotation", params={"expected_cursor": 0})
        assert response.status_code == 409


class TestGtEndpoints:
    def test_incomplete_save_409_then_force(self, client, sid, tmp_path):
        draw(client, sid, y=20)
        out = tmp_path / "out"
        out.mkdir()
        response = client.post(
            f"/sessions/{sid}/gt:save", json={"directory": str(out), "force": False}
        )
        assert response.status_code == 409
        assert response.json()["detail"]["missing_count"] == 9
        assert list(out.iterdir()) == []

        response = client.post(
            f"/sessions/{sid}/gt:save", json={"directory": str(out), "force": True}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["state"]["dirty"] is False
        array = read_gt_file(body["path"])
        assert array.frame_count == 10
        assert array.annotated_count == 1

    def test_complete_save_no_force_needed(self, client, sid, tmp_path):
        annotate_all(client, sid)
        response = client.post(f"/sessions/{sid}/gt:save", json={"directory": str(tmp_path)})
        assert response.status_code == 200
        assert response.json()["path"].endswith("clip_LineGT.npy")

    def test_download_matches_saved_file(self, client, sid, tmp_path):
        annotate_all(client, sid)
        saved = client.post(
            f"/sessions/{sid}/gt:save", json={"directory": str(tmp_path)}
        ).json()
        download = client.get(f"/sessions/{sid}/gt")
        assert download.status_code == 200
        with open(saved["path"], "rb") as fh:
            assert download.content == fh.read()
        assert saved["byte_count"] == len(download.content)

    def test_load_gt(self, client, sid, video_root):
        rows = [(15.0 + i, 0.0, 0.0, 63.0, 15.0 + i, 15.0 + i) for i in range(10)]
        write_gt_file(GtArray.from_rows(rows), video_root / "clip_LineGT.npy")
        response = client.post(f"/sessions/{sid}/gt:load", json={"path": "clip_LineGT.npy"})
        assert response.status_code == 200
        body = response.json()
        assert body["warnings"] == []
        assert body["state"]["annotated_count"] == 10
        assert body["state"]["dirty"] is False
        assert body["state"]["current"]["Y"] == 15

    def test_load_gt_reports_consistency_warnings(self, client, sid, video_root):
        rows = [None] * 10
        rows[0] = (400.0, 0.0, 0.0, 63.0, 20.0, 20.0)  # stored Y off by 380 px
        write_gt_file(GtArray.from_rows(rows), video_root / "bad_LineGT.npy")
        response = client.post(f"/sessions/{sid}/gt:load", json={"path": "bad_LineGT.npy"})
        assert response.status_code == 200
        warnings = response.json()["warnings"]
        assert len(warnings) == 1
        assert warnings[0]["frame"] == 0
        assert warnings[0]["corrected_y"] == 20

    def test_load_wrong_length_422(self, client, sid, video_root):
        write_gt_file(GtArray.empty(11), video_root / "long_LineGT.npy")
        response = client.post(f"/sessions/{sid}/gt:load", json={"path": "long_LineGT.npy"})
        assert response.status_code == 422
        assert response.json()["detail"]["code"] == "length_mismatch"

    def test_load_corrupt_file_422(self, client, sid, video_root):
        (video_root / "junk.npy").write_bytes(b"not an array")
        response = client.post(f"/sessions/{sid}/gt:load", json={"path": "junk.npy"})
        assert response.status_code == 422
        assert response.json()["detail"]["code"] == "bad_magic"


class TestReadOnlyInvariance:
    def test_gets_never_mutate_state(self, client, sid):
        draw(client, sid, y=33)
        client.put(f"/sessions/{sid}/cursor", json={"index": 4})
        before = state_of(client, sid)
        client.get(f"/sessions/{sid}/frames/2", params={"scale": 0.5})
        client.get(f"/sessions/{sid}/frames/0")
        client.get(f"/sessions/{sid}/gt")
        client.get(f"/sessions/{sid}/state")
        assert state_of(client, sid) == before
