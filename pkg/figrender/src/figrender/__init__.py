"""Figure rendering for the simulator's CSV outputs.

Reads only files (CSVs plus their manifest); never imports or calls the
simulator. See cli.main for the command line.
"""

from .errors import ManifestError, RenderError, SchemaError
from .figures import FigureSpec, render

__all__ = ["FigureSpec", "ManifestError", "RenderError", "SchemaError",
           "render"]
