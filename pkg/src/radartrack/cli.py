"""Command-line interface.

Subcommands: simulate, track, evaluate, sweep. Exit codes: 0 on success, 2
for usage or validation problems, 3 for runtime failures. All commands are
deterministic given identical inputs; nothing depends on the wall clock.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .association import SimilarityWeights
from .config import (ConfigError, PipelineConfig, load_pipeline_config,
                     load_scenario_config, pipeline_config_to_dict)
from .io import (FormatError, detections_from_track_records, read_ego,
                 read_frames, read_ground_truth, read_track_records,
                 write_ego, write_frames, write_ground_truth,
                 write_track_records)
from .metrics import evaluate
from .pipeline import EgoAlignmentError, run_tracking
from .simulate import simulate

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

_VALIDATION_ERRORS = (ConfigError, FormatError, EgoAlignmentError,
                      FileNotFoundError, ValueError)


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    return load_pipeline_config(path)


def cmd_simulate(args) -> int:
    cfg = load_scenario_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    frames, ego, gt = simulate(cfg)
    write_frames(out / "frames.jsonl", frames)
    write_ego(out / "ego.jsonl", ego)
    write_ground_truth(out / "gt.jsonl", gt)
    print(f"wrote {len(frames)} frames, {len(gt)} targets to {out}")
    return EXIT_OK


def cmd_track(args) -> int:
    cfg = _load_config(args.config)
    frames = read_frames(args.frames)
    ego = read_ego(args.ego) if args.ego else None
    records, corrected = run_tracking(frames, ego, cfg)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_track_records(out, records)
    if ego is not None:
        write_track_records(out.parent / "corrected.jsonl", corrected)
    print(f"wrote {len(records)} track records to {out}")
    return EXIT_OK


def _evaluation(frames_or_tracks_path, gt_path, cfg: PipelineConfig):
    records = read_track_records(frames_or_tracks_path)
    gt = read_ground_truth(gt_path)
    detections = detections_from_track_records(records)
    return evaluate(gt, detections, match_dist=cfg.eval.match_dist)


def cmd_evaluate(args) -> int:
    cfg = _load_config(args.config)
    report = _evaluation(args.tracks, args.gt, cfg)
    doc = report.to_dict()
    doc["config"] = pipeline_config_to_dict(cfg)
    report_path = Path(args.report)
    if report_path.parent != Path(""):
        report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    residuals_path = report_path.parent / "residuals.csv"
    with open(residuals_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "target", "track", "dx", "dy", "iou"])
        for row in report.residuals:
            writer.writerow(row)
    print(f"precision={report.precision:.4f} recall={report.recall:.4f} "
          f"f1={report.f1:.4f} cme={report.cme:.4f} bbor={report.bbor:.4f}")
    return EXIT_OK


def _read_grid(path) -> list[dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(f"grid file {path} is not valid JSON: {err}") from err
    rows = doc.get("rows") if isinstance(doc, dict) else None
    if not isinstance(rows, list) or not rows:
        raise ConfigError("grid file must contain a non-empty 'rows' list")
    keys = ("w_dis", "w_vel", "w_area", "w_overlap", "w_amp")
    for i, row in enumerate(rows, start=1):
        if not isinstance(row, dict):
            raise ConfigError(f"grid row {i} must be an object")
        missing = [k for k in keys if k not in row]
        if missing:
            raise ConfigError(f"grid row {i} missing {missing[0]}")
        total = sum(float(row[k]) for k in keys)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"grid row {i} weights sum to {total}, not 1")
    return rows


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    rows = _read_grid(args.grid)
    frames = read_frames(args.frames)
    gt = read_ground_truth(args.gt)
    out_rows = []
    for row in rows:
        weights = SimilarityWeights(
            w_dis=float(row["w_dis"]), w_vel=float(row["w_vel"]),
            w_area=float(row["w_area"]), w_overlap=float(row["w_overlap"]),
            w_amp=float(row["w_amp"]))
        thresholds = (replace(cfg.thresholds, gate=float(row["gate"]))
                      if "gate" in row else cfg.thresholds)
        row_cfg = replace(cfg, weights=weights, thresholds=thresholds)
        records, _ = run_tracking(frames, None, row_cfg)
        report = evaluate(gt, detections_from_track_records(records),
                          match_dist=cfg.eval.match_dist)
        out_rows.append([weights.w_dis, weights.w_vel, weights.w_area,
                         weights.w_overlap, weights.w_amp, thresholds.gate,
                         report.f1, report.cme, report.bbor])
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["w_dis", "w_vel", "w_area", "w_overlap", "w_amp",
                         "gate", "f1", "cme", "bbor"])
        writer.writerows(out_rows)
    print(f"wrote {len(out_rows)} sweep rows to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radartrack",
        description="Cluster-based multi-target tracking for radar point clouds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic scenario")
    p.add_argument("--config", required=True, help="scenario config (JSON)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("track", help="run the tracking pipeline over frames")
    p.add_argument("--frames", required=True, help="frames.jsonl input")
    p.add_argument("--ego", help="ego.jsonl input (enables motion "
                                 "classification and trajectory correction)")
    p.add_argument("--config", help="pipeline config (JSON); defaults apply if omitted")
    p.add_argument("--out", required=True, help="tracks.jsonl output path "
                                                "(corrected.jsonl lands beside it)")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("evaluate", help="score tracks against ground truth")
    p.add_argument("--tracks", required=True, help="tracks.jsonl input")
    p.add_argument("--gt", required=True, help="gt.jsonl input")
    p.add_argument("--config", help="pipeline config (JSON)")
    p.add_argument("--report", required=True, help="report.json output path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="evaluate a grid of similarity weights")
    p.add_argument("--frames", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--config", help="pipeline config (JSON)")
    p.add_argument("--grid", required=True, help="grid spec (JSON with 'rows')")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as err:  # runtime failure
        print(f"runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
