"""Figure rendering and delimited report output.

The census and search report paths write a TSV/JSONL file and, alongside it,
matplotlib drawings of the digraphs involved: circular vertex layout, curved
arrows for digons, loops as small self-arcs, and arc colors keyed to the
pattern's vertices.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import FancyArrowPatch

from hwalks.digraphs import ColoredDigraph, Digraph
from hwalks.partitions import ObstructionRecord

_PALETTE = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def _layout(d: Digraph) -> dict[str, tuple[float, float]]:
    n = max(1, d.n)
    return {
        v: (math.cos(2 * math.pi * i / n + math.pi / 2), math.sin(2 * math.pi * i / n + math.pi / 2))
        for i, v in enumerate(d.vertices)
    }


def draw_digraph(ax, d: Digraph, coloring=None, color_of=None, title: str | None = None):
    """Draw onto an existing axes.  `coloring` maps arcs to color labels and
    `color_of` maps color labels to matplotlib colors."""
    pos = _layout(d)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_xlim(-1.45, 1.45)
    ax.set_ylim(-1.45, 1.45)
    if title:
        ax.set_title(title, fontsize=9)
    for v, (x, y) in pos.items():
        ax.add_patch(plt.Circle((x, y), 0.13, facecolor="white", edgecolor="black", zorder=3))
        ax.text(x, y, v, ha="center", va="center", fontsize=7, zorder=4)
    for u, v in d.sorted_arcs():
        col = "black"
        if coloring is not None and color_of is not None:
            col = color_of[coloring[(u, v)]]
        if u == v:
            x, y = pos[u]
            r = math.hypot(x, y) or 1.0
            cx, cy = x * (1 + 0.22 / r), y * (1 + 0.22 / r)
            ax.add_patch(plt.Circle((cx, cy), 0.1, fill=False, edgecolor=col, zorder=2))
            continue
        rad = 0.18 if (v, u) in d.arcs else 0.05
        arrow = FancyArrowPatch(
            pos[u],
            pos[v],
            connectionstyle=f"arc3,rad={rad}",
            arrowstyle="-|>",
            mutation_scale=11,
            shrinkA=10,
            shrinkB=10,
            color=col,
            lw=1.1,
            zorder=2,
        )
        ax.add_patch(arrow)


def save_digraph_figure(path, d: Digraph, title: str | None = None):
    fig, ax = plt.subplots(figsize=(3.2, 3.2))
    draw_digraph(ax, d, title=title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_colored_figure(path, cd: ColoredDigraph, title: str | None = None):
    color_of = {c: _PALETTE[i % len(_PALETTE)] for i, c in enumerate(cd.pattern.colors)}
    fig, ax = plt.subplots(figsize=(4.0, 4.0))
    draw_digraph(ax, cd.digraph, coloring=cd.coloring, color_of=color_of, title=title)
    handles = [
        plt.Line2D([], [], color=color_of[c], label=c) for c in cd.pattern.colors
    ]
    ax.legend(handles=handles, loc="lower center", ncol=min(4, len(handles)), fontsize=7)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def obstruction_tsv(records: list[ObstructionRecord]) -> str:
    lines = ["n\tfamily_index\tclassifications\tarcs\tkey"]
    for r in records:
        arcs = ";".join(f"{u}>{v}" for u, v in r.digraph.sorted_arcs())
        cls = ",".join(sorted(r.classifications))
        idx = "" if r.family_index is None else str(r.family_index)
        lines.append(f"{r.digraph.n}\t{idx}\t{cls}\t{arcs}\t{r.key.hex()}")
    return "\n".join(lines) + "\n"


def save_obstruction_report(records: list[ObstructionRecord], out_dir) -> tuple[Path, Path]:
    """Write the census as obstructions.tsv plus a drawing grid
    obstructions.png; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tsv_path = out / "obstructions.tsv"
    tsv_path.write_text(obstruction_tsv(records), encoding="utf-8")
    cols = 4
    rows = max(1, (len(records) + cols - 1) // cols)
    fig, axes = plt.subplots(rows, cols, figsize=(2.6 * cols, 2.6 * rows))
    flat = axes.ravel() if hasattr(axes, "ravel") else [axes]
    for ax in flat:
        ax.axis("off")
    for ax, r in zip(flat, records):
        name = f"#{r.family_index}" if r.family_index is not None else ""
        title = f"n={r.digraph.n} {name} " + ",".join(sorted(c.split('-')[0] for c in r.classifications))
        draw_digraph(ax, r.digraph, title=title.strip())
    fig_path = out / "obstructions.png"
    fig.savefig(fig_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return tsv_path, fig_path
