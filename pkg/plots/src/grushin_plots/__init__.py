"""Figure rendering for grushin3d CSV exports."""

from .render import PlotJob, RenderError, render

__version__ = "0.1.0"

__all__ = ["PlotJob", "RenderError", "render", "__version__"]
