"""Greedy group-sparse recovery for compressive sensing."""
from . import formats, linalg, metrics, recovery, sensing, signals
from .errors import *  # noqa: F401,F403
from .linalg import least_squares, project_residue, residue_drop
from .recovery import (LampConfig, bomp, bomp_mmv, lamp_mmv, lamp_smv, ols,
                       omp, omp_mmv)
from .sensing import coherence, gen_sensing, normalize_columns

__version__ = "0.1.0"
