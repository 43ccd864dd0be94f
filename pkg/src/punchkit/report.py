"""Batch report rendering: delimited summaries plus figure files.

Writes, for one stored speech, into an output directory:

* ``summary.csv``        — one row per punchline with per-kind counts
* ``keywords.csv``       — keyword, score, frequency, anchor time
* ``barcode.png``        — punchline occurrence marks on the speech timeline
* ``time_matrix.png``    — per-punchline stacked text/audio feature counts
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import pipeline
from .textfeats import AUDIO_KINDS, TEXT_KINDS

ALL_KINDS = TEXT_KINDS + AUDIO_KINDS


def write_report(doc: dict, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tm = pipeline.document_summary(doc)
    written = []

    summary_path = out_dir / "summary.csv"
    with summary_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snippet", "time_s", "text_features", "audio_features", *ALL_KINDS])
        for row in tm.punchlines:
            writer.writerow(
                [
                    row.snippet,
                    f"{row.time_s:.3f}",
                    row.text_feature_count,
                    row.audio_feature_count,
                    *[row.kind_counts[k] for k in ALL_KINDS],
                ]
            )
    written.append(summary_path)

    keywords_path = out_dir / "keywords.csv"
    with keywords_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["keyword", "snippet", "score", "frequency", "anchor_time_s"])
        for kw in tm.keywords:
            writer.writerow(
                [kw.text, kw.snippet, f"{kw.score:.6f}", kw.frequency, f"{kw.anchor_time_s:.3f}"]
            )
    written.append(keywords_path)

    written.append(_barcode_figure(tm, out_dir / "barcode.png"))
    written.append(_time_matrix_figure(tm, out_dir / "time_matrix.png"))
    return written


def _barcode_figure(tm, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 1.2))
    for row in tm.punchlines:
        ax.axvline(row.time_s, color="0.15", linewidth=1.5)
    ax.set_xlim(0, max(tm.duration_s, 1e-9))
    ax.set_yticks([])
    ax.set_xlabel("time (s)")
    ax.set_title("punchline occurrences")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _time_matrix_figure(tm, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 3))
    times = [row.time_s for row in tm.punchlines]
    text_counts = [row.text_feature_count for row in tm.punchlines]
    audio_counts = [row.audio_feature_count for row in tm.punchlines]
    width = max(tm.duration_s / 60.0, 0.5)
    ax.bar(times, text_counts, width=width, label="text", color="#4878a8")
    ax.bar(times, audio_counts, width=width, bottom=text_counts, label="audio", color="#d1883c")
    ax.set_xlim(0, max(tm.duration_s, 1e-9))
    ax.set_xlabel("punchline time (s)")
    ax.set_ylabel("feature count")
    ax.set_title("per-punchline feature counts")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
