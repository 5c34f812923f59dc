"""Stochastic techno-economic simulator for nuclear-powered synfuel plants."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    FeedstockShortfall,
    FitError,
    InfeasibleDispatch,
    InfeasibleSite,
    SynfuelError,
)

__all__ = [
    "ConfigError",
    "FeedstockShortfall",
    "FitError",
    "InfeasibleDispatch",
    "InfeasibleSite",
    "SynfuelError",
    "__version__",
]
