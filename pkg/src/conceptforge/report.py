"""Rendering of clustering results: text, JSON payload, CSV, and PNG.

The text form is for terminals, the JSON payload for scripts, the CSV
matrix for spreadsheets, and the heatmap figure for a quick visual scan
of which snippets sit close together.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .pdg import ClusterResult


def cluster_report_text(result: ClusterResult, threshold: float,
                        rounds: int) -> str:
    lines = [
        f"{len(result.ids)} snippets, {len(result.clusters)} clusters "
        f"at threshold {threshold:g} (rounds {rounds})",
        "",
    ]
    for index, cluster in enumerate(result.clusters, start=1):
        lines.append(f"cluster {index}: {', '.join(cluster)}")
    if result.suggestions:
        lines.append("")
        lines.extend(result.suggestions)
    return "\n".join(lines) + "\n"


def cluster_report_payload(result: ClusterResult, threshold: float,
                           rounds: int) -> dict:
    return {
        "threshold": threshold,
        "rounds": rounds,
        "ids": list(result.ids),
        "clusters": [list(cluster) for cluster in result.clusters],
        "suggestions": list(result.suggestions),
        "matrix": [list(row) for row in result.matrix],
    }


def matrix_csv(result: ClusterResult) -> str:
    """Pairwise similarity as CSV: one header row and one labeled row per
    snippet, cells formatted with six decimals."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id", *result.ids])
    for cid, row in zip(result.ids, result.matrix):
        writer.writerow([cid, *(f"{value:.6f}" for value in row)])
    return buffer.getvalue()


def save_matrix_figure(result: ClusterResult, path: str | Path) -> None:
    """Similarity heatmap rendered to an image file next to the report."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    count = max(len(result.ids), 1)
    side = max(4.0, 0.5 * count + 2.0)
    fig, ax = plt.subplots(figsize=(side, side))
    image = ax.imshow(result.matrix, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xticks(range(count))
    ax.set_yticks(range(count))
    ax.set_xticklabels(result.ids, rotation=45, ha="right", fontsize=8)
    ax.set_yticklabels(result.ids, fontsize=8)
    ax.set_title("snippet similarity")
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
