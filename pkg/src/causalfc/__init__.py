"""Causality verification of tabulated frequency responses."""
from .continuation import (
    CausalContinuation,
    ContinuationConfig,
    ReconstructionError,
    fit,
    reconstruction_error,
)
from .diagnostics import CausalityReport, assess, resolution_sweep, verdict
from .spectrum import RescaledResponse, SampledResponse, prepare

__version__ = "0.1.0"

__all__ = [
    "CausalContinuation",
    "CausalityReport",
    "ContinuationConfig",
    "ReconstructionError",
    "RescaledResponse",
    "SampledResponse",
    "assess",
    "fit",
    "prepare",
    "reconstruction_error",
    "resolution_sweep",
    "verdict",
]
