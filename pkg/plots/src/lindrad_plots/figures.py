"""Figure kinds and the rendering entry point.

Four kinds, keyed to the simulator's documented column schemas:

* decay    trajectory tables (t, ..., gamma): one gamma(t) curve per input
* heatmap  phase-space grid dumps (x, pi, f|W0): one image per input slice
* moments  moment time series (t, mean_*, var_*): FP lines vs MC markers
* lindblad population/purity traces (t, pop_pes, pop_nes, purity, ...)

Inputs are never modified; rendering is deterministic (fixed PNG metadata),
so re-running overwrites byte-identical figures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PNG_METADATA = {"Software": "lindrad-plots"}
FIGURE_KINDS = ("decay", "heatmap", "moments", "lindblad")


class SchemaError(ValueError):
    """Input table does not match the documented column schema."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    output: Path
    xlabel: str | None = None
    ylabel: str | None = None
    xscale: str = "linear"
    yscale: str = "linear"
    title: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind '{self.kind}'")
        self.inputs = [Path(p) for p in self.inputs]
        self.output = Path(self.output)
        if not self.inputs:
            raise SchemaError("at least one input file is required")
        for p in self.inputs:
            if not p.exists():
                raise FileNotFoundError(p)


def load_table(path: Path) -> dict:
    """Read a CSV or JSON table into {column: float array}."""
    if path.suffix == ".json":
        rows = json.loads(path.read_text())
        if not rows:
            raise SchemaError(f"{path}: empty table")
        cols = list(rows[0].keys())
        return {c: np.array([r[c] for r in rows], dtype=float) for c in cols}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise SchemaError(f"{path}: empty table")
        data = [[] for _ in header]
        for row in reader:
            for i, cell in enumerate(row):
                data[i].append(float(cell))
    return {name: np.array(col) for name, col in zip(header, data)}


def require_columns(table: dict, names, path: Path) -> None:
    for name in names:
        if name not in table:
            raise SchemaError(f"{path}: missing column '{name}'")


def _new_axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=130)
    if spec.title:
        ax.set_title(spec.title)
    ax.set_xscale(spec.xscale)
    ax.set_yscale(spec.yscale)
    return fig, ax


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata=PNG_METADATA)
    plt.close(fig)
    if path.stat().st_size == 0:
        raise RuntimeError(f"wrote empty figure {path}")
    return path


def render_decay(spec: FigureSpec) -> list:
    fig, ax = _new_axes(spec)
    for path in spec.inputs:
        table = load_table(path)
        require_columns(table, ("t", "gamma"), path)
        ax.plot(table["t"], table["gamma"], label=path.stem)
    ax.set_xlabel(spec.xlabel or "t [1/m]")
    ax.set_ylabel(spec.ylabel or "gamma")
    ax.legend(loc="best", fontsize=8)
    return [_save(fig, spec.output)]


def render_heatmap(spec: FigureSpec) -> list:
    written = []
    many = len(spec.inputs) > 1
    for i, path in enumerate(spec.inputs):
        table = load_table(path)
        value_col = "f" if "f" in table else "W0"
        require_columns(table, ("x", "pi", value_col), path)
        x = np.unique(table["x"])
        pi = np.unique(table["pi"])
        if x.size * pi.size != table[value_col].size:
            raise SchemaError(f"{path}: grid dump is not rectangular")
        order = np.lexsort((table["pi"], table["x"]))
        grid = table[value_col][order].reshape(x.size, pi.size)
        fig, ax = _new_axes(spec)
        mesh = ax.pcolormesh(x, pi, grid.T, shading="auto", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=value_col)
        ax.set_xlabel(spec.xlabel or "x [1/m]")
        ax.set_ylabel(spec.ylabel or "pi [m]")
        out = spec.output
        if many:
            out = out.with_name(f"{out.stem}_{i:03d}{out.suffix}")
        written.append(_save(fig, out))
    return written


MOMENT_PANELS = ("mean_x1", "mean_pi1", "var_x1", "var_pi1")


def render_moments(spec: FigureSpec) -> list:
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 6.0), dpi=130, sharex=True)
    if spec.title:
        fig.suptitle(spec.title)
    styles = [
        {"linestyle": "-", "marker": ""},
        {"linestyle": "", "marker": "o", "markersize": 3},
        {"linestyle": "--", "marker": ""},
    ]
    for j, path in enumerate(spec.inputs):
        table = load_table(path)
        require_columns(table, ("t",) + MOMENT_PANELS, path)
        for ax, col in zip(axes.ravel(), MOMENT_PANELS):
            ax.plot(table["t"], table[col], label=path.stem, **styles[j % len(styles)])
    for ax, col in zip(axes.ravel(), MOMENT_PANELS):
        ax.set_ylabel(col)
        ax.legend(fontsize=7)
    for ax in axes[-1]:
        ax.set_xlabel(spec.xlabel or "t [1/m]")
    fig.tight_layout()
    return [_save(fig, spec.output)]


def render_lindblad(spec: FigureSpec) -> list:
    fig, ax = _new_axes(spec)
    for path in spec.inputs:
        table = load_table(path)
        require_columns(table, ("t", "pop_pes", "pop_nes", "purity"), path)
        ax.plot(table["t"], table["pop_pes"], label=f"{path.stem}: PES population")
        ax.plot(table["t"], table["pop_nes"], label=f"{path.stem}: NES population")
        ax.plot(table["t"], table["purity"], linestyle="--", label=f"{path.stem}: purity")
    ax.set_xlabel(spec.xlabel or "t [1/m]")
    ax.set_ylabel(spec.ylabel or "population / purity")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    return [_save(fig, spec.output)]


RENDERERS = {
    "decay": render_decay,
    "heatmap": render_heatmap,
    "moments": render_moments,
    "lindblad": render_lindblad,
}


def render_figures(spec: FigureSpec) -> list:
    """Render the requested figure kind; returns the written image paths."""
    return RENDERERS[spec.kind](spec)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="lindrad-plots", description=__doc__)
    ap.add_argument("kind", choices=FIGURE_KINDS)
    ap.add_argument("inputs", nargs="+", help="simulator CSV/JSON table files")
    ap.add_argument("-o", "--output", required=True, help="output image path")
    ap.add_argument("--xlabel")
    ap.add_argument("--ylabel")
    ap.add_argument("--xscale", default="linear", choices=["linear", "log"])
    ap.add_argument("--yscale", default="linear", choices=["linear", "log"])
    ap.add_argument("--title")
    args = ap.parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=args.inputs,
            output=args.output,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            xscale=args.xscale,
            yscale=args.yscale,
            title=args.title,
        )
        written = render_figures(spec)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
