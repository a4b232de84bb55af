"""Command-line driver: gbsed gen|encode|sweep|report.

Exit codes: 0 success, 2 usage error, 3 data error, 4 internal invariant
violation.
"""

import argparse
import csv
import math
import os
import sys

from . import scenarios, sweep
from .channel import AWGN64QAM, BSC, PROTECTED, UNPROTECTED
from .errors import GbsedError
from .metrics import compression_ratio, raw_frame_octets
from .ontology import default_ontology, load_ontology
from .scenarios import ScenarioSpec

RAW_FRAME = raw_frame_octets(1280, 720)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


def _load_ontology_arg(path):
    if path is None:
        return default_ontology()
    with open(path, encoding="utf-8") as fh:
        return load_ontology(fh.read())


def _parse_snr_list(text):
    points = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        points.append(math.inf if tok in ("inf", "noiseless") else float(tok))
    if not points:
        raise ValueError("empty SNR list")
    return tuple(points)


def cmd_gen(args):
    o = _load_ontology_arg(args.ontology)
    lo, hi = (int(v) for v in args.vehicles.split(","))
    spec = ScenarioSpec(
        seed=args.seed,
        num_sequences=args.sequences,
        frames_per_sequence=args.frames,
        vehicles_range=(lo, hi),
        risky_fraction=args.risky_fraction,
        lane_count=args.lanes,
    )
    seqs = scenarios.generate(spec, o)
    scenarios.write_scenes(seqs, args.out)
    frames = sum(len(s.frames) for s in seqs)
    print(f"wrote {len(seqs)} sequences ({frames} frames) to {args.out}")
    return EXIT_OK


def cmd_encode(args):
    o = _load_ontology_arg(args.ontology)
    seqs = scenarios.read_scenes(args.scenes, o)
    os.makedirs(args.out, exist_ok=True)
    total = 0
    count = 0
    for s, seq in enumerate(seqs):
        for k, frame in enumerate(seq.frames):
            payload = sweep.encode_frame(frame, o)
            name = os.path.join(args.out, f"seq{s:04d}_f{k:03d}.gbsd")
            with open(name, "wb") as fh:
                fh.write(payload)
            total += len(payload)
            count += 1
    if count == 0:
        print("0 frames encoded")
        return EXIT_OK
    mean = total / count
    cr, reduction = compression_ratio(RAW_FRAME * count, total)
    print(f"{count} frames encoded, {total} octets total, {mean:.1f} mean/frame")
    print(f"compression ratio vs raw 1280x720 frames: {cr:.1f} ({reduction:.4f}% reduction)")
    return EXIT_OK


def cmd_sweep(args):
    o = _load_ontology_arg(args.ontology)
    seqs = scenarios.read_scenes(args.scenes, o)
    cfg = sweep.SweepConfig(
        snr_points=_parse_snr_list(args.snr),
        trials_per_point=args.trials,
        base_seed=args.seed,
        channel_kind=args.channel,
        bsc_flip_prob=args.flip_prob,
        header_protection=args.header_protection,
    )
    rows = sweep.run_sweep(seqs, o, cfg)
    text = sweep.rows_to_csv(rows)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _format_table(header, rows):
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(r, widths))
             for r in [header] + rows]
    return "\n".join(lines)


def cmd_report(args):
    with open(args.csv, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        print("no rows")
        return EXIT_OK
    display = ["snr_db", "ber", "fidelity", "consistency", "accuracy",
               "precision", "recall", "f1", "mcc", "auc"]
    body = [[_round(r[c]) for c in display] for r in rows]
    print(_format_table(display, body))
    print()
    mean_payload = float(rows[0]["mean_payload_octets"])
    cr, reduction = compression_ratio(RAW_FRAME, mean_payload)
    size_rows = [
        ["Raw RGB (24 bits)", f"{RAW_FRAME} B", "1.0", "0.0 %"],
        ["GBSED payload", f"{mean_payload:.1f} B", f"{cr:.1f}", f"{reduction:.4f} %"],
    ]
    print(_format_table(["Method", "Size", "CR", "Reduction (%)"], size_rows))
    return EXIT_OK


def _round(cell):
    try:
        return f"{float(cell):.6g}"
    except ValueError:
        return cell


def build_parser():
    parser = argparse.ArgumentParser(prog="gbsed",
                                     description="scene-graph semantic codec toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic scenario corpus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--sequences", type=int, default=100)
    p.add_argument("--frames", type=int, default=10)
    p.add_argument("--vehicles", default="2,8", help="min,max vehicles per sequence")
    p.add_argument("--risky-fraction", type=float, default=0.3)
    p.add_argument("--lanes", type=int, default=3)
    p.add_argument("--ontology", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("encode", help="encode scenes into .gbsd payload files")
    p.add_argument("--scenes", required=True)
    p.add_argument("--ontology", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("sweep", help="run an SNR sweep and write a results CSV")
    p.add_argument("--scenes", required=True)
    p.add_argument("--ontology", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--snr", default="0,2,4,6,8,10,12,14,16,18,20")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--channel", choices=[AWGN64QAM, BSC], default=AWGN64QAM)
    p.add_argument("--flip-prob", type=float, default=0.0)
    p.add_argument("--header-protection", choices=[PROTECTED, UNPROTECTED],
                   default=PROTECTED)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="render a sweep CSV as aligned tables")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (GbsedError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # invariant violation
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
