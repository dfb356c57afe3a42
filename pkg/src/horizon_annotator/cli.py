"""Command line entry points.

``serve`` runs the HTTP service; the ``gt-*`` commands inspect,
validate, convert, render and diff GT files headlessly.  Every command
is a thin shell over the library modules, so CLI results match direct
library calls byte for byte.

Exit codes: 0 success, 1 validation/processing failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path

import cv2

from .errors import AnnotatorError
from .frame_source import open_source
from .geometry import params_from_endpoints
from .gt_format import GtArray, LengthMismatch, gt_diff, gt_to_text, read_gt_file
from .service import DEFAULT_HOST, DEFAULT_PORT, create_app
from .session import CONSISTENCY_TOL

JSON_SCHEMA_VERSION = 1


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizon-annotator",
        description="Horizon line annotation service and GT file tooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the annotation HTTP service")
    serve.add_argument("--host", default=DEFAULT_HOST)
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument("--video-root", required=True, type=Path,
                       help="directory the service may open videos from")
    serve.add_argument("--cache-frames", type=_positive_int, default=32)
    serve.add_argument("--ui-dir", type=Path, default=None,
                       help="static directory with the browser UI (optional)")

    inspect = sub.add_parser("gt-inspect", help="summarize a GT file")
    inspect.add_argument("file", type=Path)
    inspect.add_argument("--json", action="store_true")

    validate = sub.add_parser("gt-validate", help="check a GT file for violations")
    validate.add_argument("file", type=Path)
    validate.add_argument("--frames", type=_positive_int, default=None,
                          help="expected row count (the video frame count)")

    convert = sub.add_parser("gt-convert", help="convert a GT file to csv or json")
    convert.add_argument("file", type=Path)
    convert.add_argument("--to", dest="to", choices=("csv", "json"), required=True)
    convert.add_argument("-o", "--output", type=Path, default=None)

    render = sub.add_parser("gt-render", help="burn GT lines into frame images")
    render.add_argument("video", type=Path)
    render.add_argument("gt", type=Path)
    render.add_argument("-o", "--output", type=Path, required=True)
    render.add_argument("--thickness", type=_positive_int, default=2)
    render.add_argument("--color", choices=("red",), default="red",
                        help="overlay color (reserved; only red for now)")

    diff = sub.add_parser("gt-diff", help="compare two GT files frame by frame")
    diff.add_argument("file_a", type=Path)
    diff.add_argument("file_b", type=Path)
    diff.add_argument("--json", action="store_true")

    return parser


def cmd_serve(args) -> int:
    if not args.video_root.is_dir():
        print(f"error: video root {args.video_root} is not a directory", file=sys.stderr)
        return 1
    import uvicorn

    app = create_app(args.video_root, cache_frames=args.cache_frames, ui_dir=args.ui_dir)
    try:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    host, port = sock.getsockname()[:2]
    print(f"listening on http://{host}:{port}", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def cmd_gt_inspect(args) -> int:
    array = read_gt_file(args.file)
    annotated = [array.row(i) for i in range(array.frame_count) if not array.is_missing(i)]
    ys = [row[0] for row in annotated]
    phis = [row[1] for row in annotated]
    summary = {
        "schema": JSON_SCHEMA_VERSION,
        "file": str(args.file),
        "frames": array.frame_count,
        "annotated": len(annotated),
        "missing": array.frame_count - len(annotated),
        "y_min": min(ys) if ys else None,
        "y_max": max(ys) if ys else None,
        "phi_min": min(phis) if phis else None,
        "phi_max": max(phis) if phis else None,
    }
    if args.json:
        print(json.dumps(summary))
    else:
        print(f"file:      {args.file}")
        print(f"frames:    {summary['frames']}")
        print(f"annotated: {summary['annotated']}")
        print(f"missing:   {summary['missing']}")
        if ys:
            print(f"Y range:   [{summary['y_min']:.6g}, {summary['y_max']:.6g}] px")
            print(f"phi range: [{summary['phi_min']:.6g}, {summary['phi_max']:.6g}] deg")
        else:
            print("Y range:   n/a")
            print("phi range: n/a")
    return 0


def cmd_gt_validate(args) -> int:
    array = read_gt_file(args.file)
    violations: list[str] = []
    if args.frames is not None and array.frame_count != args.frames:
        violations.append(f"row count {array.frame_count} != expected {args.frames}")
    for i in range(array.frame_count):
        row = array.row(i)
        if row is None:
            continue
        y, phi, x_s, x_e, y_s, y_e = row
        expected_y, expected_phi = params_from_endpoints(x_s, y_s, x_e, y_e)
        if abs(y - expected_y) > CONSISTENCY_TOL:
            violations.append(f"frame {i}: Y={y:.6g} inconsistent with endpoints (expected {expected_y:.6g})")
        if abs(phi - expected_phi) > CONSISTENCY_TOL:
            violations.append(f"frame {i}: phi={phi:.6g} inconsistent with endpoints (expected {expected_phi:.6g})")
    if violations:
        for line in violations:
            print(line, file=sys.stderr)
        return 1
    print(f"OK: {array.frame_count} rows, {array.annotated_count} annotated")
    return 0


def cmd_gt_convert(args) -> int:
    text = gt_to_text(read_gt_file(args.file), args.to)
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)
    return 0


def cmd_gt_render(args) -> int:
    with open_source(args.video) as source:
        array = read_gt_file(args.gt)
        if array.frame_count != source.info.frame_count:
            raise LengthMismatch(
                f"GT has {array.frame_count} rows but video has {source.info.frame_count} frames"
            )
        args.output.mkdir(parents=True, exist_ok=True)
        for i in range(source.info.frame_count):
            bgr = cv2.cvtColor(source.get_frame(i).pixels, cv2.COLOR_RGB2BGR)
            row = array.row(i)
            if row is not None:
                _, _, x_s, x_e, y_s, y_e = row
                cv2.line(
                    bgr,
                    (round(x_s), round(y_s)),
                    (round(x_e), round(y_e)),
                    (0, 0, 255),  # red, BGR order
                    args.thickness,
                )
            out = args.output / f"frame_{i:06d}.png"
            if not cv2.imwrite(str(out), bgr):
                print(f"error: cannot write {out}", file=sys.stderr)
                return 1
    print(f"wrote {source.info.frame_count} frames to {args.output}")
    return 0


def cmd_gt_diff(args) -> int:
    report = gt_diff(read_gt_file(args.file_a), read_gt_file(args.file_b))
    if args.json:
        print(json.dumps({
            "schema": JSON_SCHEMA_VERSION,
            "frames": report.compared_frames + report.skipped_frames,
            "compared": report.compared_frames,
            "skipped": report.skipped_frames,
            "mean_abs_dy": report.mean_abs_dy,
            "max_abs_dy": report.max_abs_dy,
            "mean_abs_dphi": report.mean_abs_dphi,
            "max_abs_dphi": report.max_abs_dphi,
            "per_frame": [[i, dy, dphi] for i, dy, dphi in report.per_frame],
        }))
    else:
        print(f"frames:     {report.compared_frames + report.skipped_frames}")
        print(f"compared:   {report.compared_frames}")
        print(f"skipped:    {report.skipped_frames}")
        print(f"mean |dY|:   {report.mean_abs_dy:.2f} px")
        print(f"max  |dY|:   {report.max_abs_dy:.2f} px")
        print(f"mean |dphi|: {report.mean_abs_dphi:.4f} deg")
        print(f"max  |dphi|: {report.max_abs_dphi:.4f} deg")
    return 0


_COMMANDS = {
    "serve": cmd_serve,
    "gt-inspect": cmd_gt_inspect,
    "gt-validate": cmd_gt_validate,
    "gt-convert": cmd_gt_convert,
    "gt-render": cmd_gt_render,
    "gt-diff": cmd_gt_diff,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except AnnotatorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
