"""Longitudinal analysis of influence networks whose actors live in historical eras."""

from eranet.model import (
    DEFAULT_HORIZON,
    Era,
    EraScheme,
    InfluenceEdge,
    InfluenceNetwork,
    Scholar,
    Violation,
    default_scheme,
    era_of_year,
    validate_network,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_HORIZON",
    "Era",
    "EraScheme",
    "InfluenceEdge",
    "InfluenceNetwork",
    "Scholar",
    "Violation",
    "default_scheme",
    "era_of_year",
    "validate_network",
    "__version__",
]
