"""Circuits and classical checks for preparing quantum many-body scar states."""

import os as _os

# cap BLAS threads before numpy loads
_threads = _os.environ.get("SCARFORGE_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from . import circuits, dynamics, hamiltonians, metrics, mpscompile, qsim, refstates, scarprep, xiprep  # noqa: E402
from .errors import (  # noqa: E402
    CapacityError,
    CircuitParseError,
    ConvergenceError,
    DimensionError,
    GateError,
    ScarforgeError,
)

__version__ = "0.1.0"
