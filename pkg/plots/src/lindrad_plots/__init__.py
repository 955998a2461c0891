"""Post-processing figures for lindrad CSV/JSON outputs.

Reads the simulator's table files and renders publication-style figures:
gamma(t) decay comparisons, phase-space heatmaps, Fokker-Planck vs
Monte-Carlo moment overlays, and Lindblad population/purity traces.  Never
feeds anything back into the simulation.
"""

from .figures import FigureSpec, SchemaError, render_figures

__all__ = ["FigureSpec", "SchemaError", "render_figures"]
