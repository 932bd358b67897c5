"""Principal Robin eigenvalues on chains of mollified sector blocks."""

from ._robin_bands import (
    ConfigError,
    InvalidParameter,
    RobinError,
    SectorBlockParams,
    block_eigenvalue,
    block_trial_quotient,
    check_bands,
    disk_robin,
    halfline_quotient,
    interval_robin_neumann,
    interval_robin_robin,
    profile_values,
    sector_quotient,
    sweep,
    tent_profile,
)

__all__ = [
    "ConfigError",
    "InvalidParameter",
    "RobinError",
    "SectorBlockParams",
    "block_eigenvalue",
    "block_trial_quotient",
    "check_bands",
    "disk_robin",
    "halfline_quotient",
    "interval_robin_neumann",
    "interval_robin_robin",
    "profile_values",
    "sector_quotient",
    "sweep",
    "tent_profile",
]
