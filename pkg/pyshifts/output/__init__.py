"""Output generation layer.

Reports are written as JSON by the report repository; generators here derive
extra files from them.  The CSV generator requires the ``[output]`` optional
dependency group (pandas).
"""

from .interfaces import IOutputGenerator

__all__ = ["IOutputGenerator"]

try:
    from .csv_plot_generator import CsvPlotGenerator

    __all__ += ["CsvPlotGenerator"]
except ImportError:
    pass
