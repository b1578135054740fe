"""Lattice Schwinger model exact diagonalization in random charge sectors."""

from ._core import (
    Basis,
    ChargeSector,
    ConfigError,
    Hamiltonian,
    ModelParams,
    NumericalError,
    detect_jumps,
    entropies,
    enumerate_charge_sectors,
    krylov_dimensions,
    quench,
    sample_charge_sectors,
    sector_mean_r,
)

__all__ = [
    "Basis",
    "ChargeSector",
    "ConfigError",
    "Hamiltonian",
    "ModelParams",
    "NumericalError",
    "detect_jumps",
    "entropies",
    "enumerate_charge_sectors",
    "krylov_dimensions",
    "quench",
    "sample_charge_sectors",
    "sector_mean_r",
]
