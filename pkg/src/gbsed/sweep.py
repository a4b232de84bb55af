"""End-to-end experiment engine: encode every frame, push the payloads
through the configured channel at each SNR point, decode, and evaluate
fidelity plus downstream risk-task metrics.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import codec
from .channel import AWGN64QAM, PROTECTED, FrameGrid, LinkConfig, frames_required, transmit
from .errors import GbsedError
from .metrics import classification_metrics, auc as auc_metric, semantic_fidelity
from .scene_graph import SceneGraph, SceneNode
from .task import GraphSequence, RiskParams, task_consistency

CSV_COLUMNS = (
    "snr_db", "ber", "fidelity", "consistency", "accuracy", "precision",
    "recall", "f1", "mcc", "auc", "mean_payload_octets", "frames_per_payload",
)

DEFAULT_SNR_POINTS = tuple(float(s) for s in range(0, 21, 2))


@dataclass(frozen=True)
class SweepConfig:
    snr_points: tuple = DEFAULT_SNR_POINTS
    trials_per_point: int = 1000
    base_seed: int = 0
    channel_kind: str = AWGN64QAM
    bsc_flip_prob: float = 0.0
    header_protection: str = PROTECTED
    grid: FrameGrid = field(default_factory=FrameGrid)

    def __post_init__(self):
        if not self.snr_points:
            raise ValueError("snr_points is empty")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")


def encode_frame(graph, ontology):
    """Scene graph -> wire payload octets."""
    tensor = codec.encode_tensor(graph, ontology)
    compressed = codec.compress(tensor)
    return codec.serialize(compressed, graph.feature_matrix(), ontology)


def decode_frame(payload, ontology):
    """Wire payload -> scene graph, or None if the payload fails to parse."""
    try:
        compressed, feats = codec.parse(payload, ontology)
        tensor, _ = codec.decompress(compressed)
        return codec.regenerate(tensor, feats, ontology)
    except GbsedError:
        return None


def _fallback_frame():
    # stands in for an unparseable frame: bare ego, no relations
    return SceneGraph((SceneNode(0, (1.0, 0.0, 0.0, 0.0)),), ())


def _run_point(point_index, snr_db, sequences, payloads, ontology, cfg, risk_params):
    repeats = -(-cfg.trials_per_point // len(payloads))
    bits_total = 0
    errors_total = 0
    fidelity_sum = 0.0
    n_frames = 0
    recv_all = []
    sent_all = []
    trial = 0
    for _ in range(repeats):
        frame_cursor = 0
        for seq in sequences:
            recv_frames = []
            for frame in seq.frames:
                payload = payloads[frame_cursor]
                link = LinkConfig(
                    snr_db=snr_db,
                    channel_kind=cfg.channel_kind,
                    bsc_flip_prob=cfg.bsc_flip_prob,
                    seed=cfg.base_seed ^ point_index ^ trial,
                    header_protection=cfg.header_protection,
                )
                received, bit_errors = transmit(payload, link)
                bits_total += 8 * len(payload)
                errors_total += bit_errors
                decoded = decode_frame(received, ontology)
                fidelity_sum += semantic_fidelity(frame, decoded, ontology).fidelity
                recv_frames.append(decoded if decoded is not None else _fallback_frame())
                n_frames += 1
                frame_cursor += 1
                trial += 1
            recv_all.append(GraphSequence(tuple(recv_frames)))
            sent_all.append(seq)
    counts, consistency, scored = task_consistency(sent_all, recv_all, ontology, risk_params)
    cls = classification_metrics(counts)
    try:
        auc_val = auc_metric(scored)
    except GbsedError:
        auc_val = float("nan")
    mean_payload = sum(len(p) for p in payloads) / len(payloads)
    mean_frames = sum(frames_required(len(p), cfg.grid) for p in payloads) / len(payloads)
    return {
        "snr_db": snr_db,
        "ber": errors_total / bits_total if bits_total else 0.0,
        "fidelity": fidelity_sum / n_frames,
        "consistency": consistency,
        "accuracy": cls.accuracy,
        "precision": cls.precision,
        "recall": cls.recall,
        "f1": cls.f1,
        "mcc": cls.mcc,
        "auc": auc_val,
        "mean_payload_octets": mean_payload,
        "frames_per_payload": mean_frames,
    }


def run_sweep(sequences, ontology, cfg, risk_params=RiskParams()):
    """One result row per SNR point; deterministic given cfg.base_seed.

    trials_per_point is rounded up to a whole number of corpus passes so
    every sequence is always transmitted in full.
    """
    if not sequences:
        raise ValueError("empty corpus")
    payloads = [encode_frame(f, ontology) for seq in sequences for f in seq.frames]
    workers = int(os.environ.get("GBSED_THREADS", "1") or "1")
    points = list(enumerate(cfg.snr_points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda pi: _run_point(pi[0], pi[1], sequences, payloads,
                                      ontology, cfg, risk_params),
                points))
    else:
        rows = [_run_point(i, s, sequences, payloads, ontology, cfg, risk_params)
                for i, s in points]
    return rows


def rows_to_csv(rows):
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _format_cell(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)
