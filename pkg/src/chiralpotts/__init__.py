"""Exact diagonalization of the periodic N-state superintegrable chiral Potts chain.

The package builds the Hamiltonian ``H = A0 + lam * A1``, the one-site
translation ``T`` and the Z_N charge, produces simultaneous (H, T)
eigenvectors by two independent routes and evaluates the two-point
functions ``rho_r(R) = <psi| Z_0^r Z_R^{dagger r} |psi>`` together with the
reflection residuals ``|rho_r(R)^* - rho_r(-R)|``.
"""

__version__ = "0.1.0"

from .exceptions import (
    CertificationError,
    ChainError,
    DiagonalizationError,
    DimensionBudgetError,
    SymmetryViolation,
)
from .operators import (
    BasisConfig,
    LocalOperator,
    ModelParams,
    build_x,
    build_z,
    embed_at_site,
    local_power,
)
from .model import (
    HamiltonianBundle,
    TranslationOperator,
    build_a0,
    build_a1,
    build_charge,
    build_hamiltonian,
    build_translation,
    chiral_potts_coefficient,
)
from .sectors import CyclicOrbit, MomentumSector, build_sector, enumerate_orbits, project_hamiltonian
from .spectra import (
    SimultaneousEigenvector,
    SpectrumReport,
    assemble_simultaneous,
    assemble_simultaneous_oracle,
    diagonalize_sector,
    select_ground_states,
)
from .correlations import CorrelationTable, correlation_table, negative_control, two_point

__all__ = [
    "BasisConfig",
    "CertificationError",
    "ChainError",
    "CorrelationTable",
    "CyclicOrbit",
    "DiagonalizationError",
    "DimensionBudgetError",
    "HamiltonianBundle",
    "LocalOperator",
    "ModelParams",
    "MomentumSector",
    "SimultaneousEigenvector",
    "SpectrumReport",
    "SymmetryViolation",
    "TranslationOperator",
    "assemble_simultaneous",
    "assemble_simultaneous_oracle",
    "build_a0",
    "build_a1",
    "build_charge",
    "build_hamiltonian",
    "build_sector",
    "build_translation",
    "build_x",
    "build_z",
    "chiral_potts_coefficient",
    "correlation_table",
    "diagonalize_sector",
    "embed_at_site",
    "enumerate_orbits",
    "local_power",
    "negative_control",
    "project_hamiltonian",
    "select_ground_states",
    "two_point",
]
