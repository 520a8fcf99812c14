"""Report figures: incidence graphs, star graphs, missing-weight trajectories.

All figures are rendered off-screen and saved to files by the CLI report
path; nothing here opens a window.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .smallcancel import star_graph
from .words import Presentation


def incidence_figure(presentation: Presentation, matching=None):
    """Two-column layout: relators on the left, generators on the right.

    Matching edges (pairs of relator index and generator name) are drawn
    heavy; the rest light.
    """
    matched = set(matching or ())
    fig, ax = plt.subplots(figsize=(6, 4))
    nr = max(1, len(presentation.relators))
    ng = max(1, presentation.num_generators)
    left_y = {i: 1 - (i + 0.5) / nr for i in range(len(presentation.relators))}
    right_y = {g: 1 - (g + 0.5) / ng for g in range(presentation.num_generators)}
    for i in range(len(presentation.relators)):
        for g in presentation.occurring_generators(i):
            name = presentation.generators[g]
            heavy = (i, name) in matched
            ax.plot(
                [0, 1],
                [left_y[i], right_y[g]],
                color="tab:red" if heavy else "0.75",
                linewidth=2.5 if heavy else 1.0,
                zorder=1 + heavy,
            )
    for i, y in left_y.items():
        ax.plot([0], [y], "o", color="tab:blue", markersize=9, zorder=3)
        ax.annotate(f"r{i}", (0, y), textcoords="offset points", xytext=(-18, -4))
    for g, y in right_y.items():
        ax.plot([1], [y], "s", color="tab:green", markersize=9, zorder=3)
        ax.annotate(presentation.generators[g], (1, y), textcoords="offset points", xytext=(10, -4))
    ax.set_xlim(-0.25, 1.25)
    ax.set_ylim(-0.05, 1.05)
    ax.axis("off")
    ax.set_title("incidence graph" + (" with matching" if matching else ""))
    fig.tight_layout()
    return fig


def star_graph_figure(presentation: Presentation):
    """Letters on a circle, one chord per adjacent pair in the relators."""
    _, edges = star_graph(presentation)
    letters = []
    for g in range(presentation.num_generators):
        letters.extend([g + 1, -(g + 1)])
    pos = {}
    for k, letter in enumerate(letters):
        angle = 2 * math.pi * k / max(1, len(letters))
        pos[letter] = (math.cos(angle), math.sin(angle))
    fig, ax = plt.subplots(figsize=(5, 5))
    for e in sorted(edges, key=sorted):
        a, b = tuple(e)
        ax.plot([pos[a][0], pos[b][0]], [pos[a][1], pos[b][1]], color="0.6", zorder=1)
    for letter, (x, y) in pos.items():
        name = presentation.generators[abs(letter) - 1]
        label = name if letter > 0 else name + "⁻"
        ax.plot([x], [y], "o", color="tab:blue", markersize=10, zorder=2)
        ax.annotate(label, (x * 1.12, y * 1.12), ha="center", va="center")
    ax.set_xlim(-1.3, 1.3)
    ax.set_ylim(-1.3, 1.3)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("star graph")
    fig.tight_layout()
    return fig


def trajectory_figure(values):
    """Missing weight per productive iteration of the subgroup loop."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(range(len(values)), values, marker="o", color="tab:blue")
    ax.set_xlabel("productive iteration")
    ax.set_ylabel("missing weight")
    ax.set_ylim(bottom=-0.5)
    ax.grid(alpha=0.3)
    ax.set_title("missing weight trajectory")
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150)
    plt.close(fig)
