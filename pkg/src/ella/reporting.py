"""File outputs for evaluation runs: delimited scores plus a rendered chart."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

TSV_NAME = "ndcg.tsv"
FIGURE_NAME = "ndcg.png"


def write_report_files(
    report_dir: Path,
    rows: list[tuple[str, dict[int, float]]],
    ks: tuple[int, ...],
) -> tuple[Path, Path]:
    """Write ndcg.tsv and ndcg.png under report_dir; returns both paths."""
    report_dir.mkdir(parents=True, exist_ok=True)
    tsv_path = report_dir / TSV_NAME
    figure_path = report_dir / FIGURE_NAME
    _write_tsv(tsv_path, rows, ks)
    _write_figure(figure_path, rows, ks)
    return tsv_path, figure_path


def _write_tsv(path: Path, rows: list[tuple[str, dict[int, float]]], ks: tuple[int, ...]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\t".join(["model"] + [f"ndcg@{k}" for k in ks]) + "\n")
        for name, results in rows:
            handle.write(
                "\t".join([name] + [f"{results[k] * 100.0:.2f}" for k in ks]) + "\n"
            )


def _write_figure(
    path: Path, rows: list[tuple[str, dict[int, float]]], ks: tuple[int, ...]
) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    positions = range(len(ks))
    width = 0.8 / max(len(rows), 1)
    for offset, (name, results) in enumerate(rows):
        xs = [p + offset * width for p in positions]
        ax.bar(xs, [results[k] * 100.0 for k in ks], width=width, label=name)
    ax.set_xticks([p + width * (len(rows) - 1) / 2 for p in positions])
    ax.set_xticklabels([f"NDCG@{k}" for k in ks])
    ax.set_ylabel("NDCG (%)")
    ax.set_ylim(0, 100)
    if rows:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
