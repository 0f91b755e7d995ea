"""Figure rendering for the iterations-vs-radius scaling sweep."""

from .render import PlotSpec, SchemaError, render_scaling_figure

__all__ = ["PlotSpec", "SchemaError", "render_scaling_figure"]
