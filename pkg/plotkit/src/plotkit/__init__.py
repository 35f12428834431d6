"""Static figures from sweep CSVs.

Read-only companion to the simulator: it renders only values present in
the input CSV (no recomputation) and never calls into the simulation
package, so any tool that writes the same row schema can feed it.
"""

from .figures import FigureSpec, SchemaError, plot_phase, plot_trajectories
from .reader import read_sweep_csv

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "SchemaError",
    "plot_phase",
    "plot_trajectories",
    "read_sweep_csv",
]
