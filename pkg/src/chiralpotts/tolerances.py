"""Numerical tolerances shared by the library, the verification suite and the CLI."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

DROP_TOL = 1e-14
HERMITIAN_TOL = 1e-12
COMMUTATOR_TOL = 1e-12
COVARIANCE_TOL = 1e-14
LEAKAGE_TOL = 1e-12
ORTHONORMAL_TOL = 1e-13
EIGH_RESIDUAL_TOL = 1e-11
RESIDUAL_TOL = 1e-10
NORM_TOL = 1e-13
DEGENERACY_TOL = 1e-9
ROOT_SNAP_TOL = 1e-8
SPECTRUM_MATCH_TOL = 1e-9
SYMMETRY_TOL = 1e-10
MIDPOINT_TOL = 1e-10
LEMMA_TOL = 1e-10
NEGATIVE_CONTROL_THRESHOLD = 1e-3
ORACLE_DIM_LIMIT = 4096


@dataclass(frozen=True)
class Tolerances:
    """Overridable tolerance set; field names double as CLI ``--tol-KEY`` keys."""

    hermitian: float = HERMITIAN_TOL
    commutator: float = COMMUTATOR_TOL
    covariance: float = COVARIANCE_TOL
    leakage: float = LEAKAGE_TOL
    orthonormal: float = ORTHONORMAL_TOL
    residual: float = RESIDUAL_TOL
    degeneracy: float = DEGENERACY_TOL
    root_snap: float = ROOT_SNAP_TOL
    spectrum_match: float = SPECTRUM_MATCH_TOL
    symmetry: float = SYMMETRY_TOL
    midpoint: float = MIDPOINT_TOL
    lemma: float = LEMMA_TOL
    negative_control: float = NEGATIVE_CONTROL_THRESHOLD

    def with_overrides(self, overrides: dict[str, float]) -> "Tolerances":
        known = {f.name for f in dataclasses.fields(self)}
        for key, value in overrides.items():
            if key not in known:
                raise KeyError(f"unknown tolerance key {key!r}; expected one of {sorted(known)}")
            if not value > 0:
                raise ValueError(f"tolerance {key} must be positive, got {value}")
        return dataclasses.replace(self, **overrides)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)
