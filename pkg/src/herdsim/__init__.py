"""herdsim: agent-based market simulation, calibration and diagnostics."""

__version__ = "0.1.0"

from . import calibrate, errors, ingest, simcore, spectral, stats

__all__ = ["calibrate", "errors", "ingest", "simcore", "spectral", "stats", "__version__"]
