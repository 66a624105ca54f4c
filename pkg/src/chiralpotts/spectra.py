"""Simultaneous (H, T) eigenvectors by two independent routes.

``assemble_simultaneous`` diagonalizes each momentum block and lifts the
eigenvectors, so momentum holds by construction. ``assemble_simultaneous_oracle``
diagonalizes the dense H, clusters degenerate levels and diagonalizes the
restriction of T inside each cluster. Both routes then resolve the Z_N charge
inside each (E, k) group for labeling, fix the eigenvector phase and certify
the H and T residuals.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .exceptions import CertificationError, DiagonalizationError, SymmetryViolation
from .model import HamiltonianBundle, TranslationOperator, charge_permutation
from .operators import ModelParams
from .sectors import build_all_sectors, project_hamiltonian
from .tolerances import (
    DEGENERACY_TOL,
    EIGH_RESIDUAL_TOL,
    LEAKAGE_TOL,
    NORM_TOL,
    ORACLE_DIM_LIMIT,
    RESIDUAL_TOL,
    ROOT_SNAP_TOL,
)

PHASE_TIE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SimultaneousEigenvector:
    """Certified eigenvector of H and T.

    The full-space amplitudes are ``basis @ coefficients`` when the vector
    came from a momentum sector, or ``coefficients`` itself when ``basis`` is
    None.
    """

    energy: float
    momentum: int
    charge: int
    h_residual: float
    t_residual: float
    coefficients: np.ndarray = field(repr=False)
    basis: sp.csr_matrix | None = field(default=None, repr=False)

    @property
    def vector(self) -> np.ndarray:
        if self.basis is None:
            return self.coefficients
        return self.basis @ self.coefficients

    def tau(self, length: int) -> complex:
        return complex(np.exp(2j * np.pi * self.momentum / length))


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    params: ModelParams
    eigenvectors: tuple[SimultaneousEigenvector, ...]
    ground_energy: float
    ground_degeneracy: int
    route: str = "sector"

    @property
    def energies(self) -> np.ndarray:
        return np.array([ev.energy for ev in self.eigenvectors])

    @property
    def momenta(self) -> np.ndarray:
        return np.array([ev.momentum for ev in self.eigenvectors], dtype=int)

    def in_sector(self, k: int) -> list[SimultaneousEigenvector]:
        return [ev for ev in self.eigenvectors if ev.momentum == k % self.params.length]


def _fingerprint(m: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(m).tobytes()).hexdigest()[:16]


def diagonalize_sector(matrix: np.ndarray, tol: float = EIGH_RESIDUAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix.

    The input is symmetrized first. Every pair must satisfy
    ``|M v - e v| <= tol * |M|_2``.
    """
    m = np.asarray(matrix, dtype=complex)
    m = 0.5 * (m + m.conj().T)
    if m.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    try:
        w, v = scipy.linalg.eigh(m)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise DiagonalizationError(
            f"eigh failed on {m.shape} matrix (sha256 {_fingerprint(m)}): {exc}"
        ) from exc
    scale = float(np.max(np.abs(w)))
    residuals = np.linalg.norm(m @ v - v * w, axis=0)
    if residuals.max() > tol * scale:
        raise DiagonalizationError(
            f"eigenpair residual {residuals.max():.3e} exceeds {tol:g} * {scale:.3e} "
            f"on {m.shape} matrix (sha256 {_fingerprint(m)})"
        )
    return w, v


def cluster_levels(energies: np.ndarray, tol: float = DEGENERACY_TOL) -> list[slice]:
    """Split ascending energies into runs whose neighbours differ by at most ``tol * (1 + |E|)``."""
    bounds = [0]
    for i in range(1, len(energies)):
        if energies[i] - energies[i - 1] > tol * (1.0 + abs(energies[i - 1])):
            bounds.append(i)
    bounds.append(len(energies))
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


def _snap_to_root(eigenvalue: complex, order: int, tol: float, what: str) -> int:
    k = int(np.rint(np.angle(eigenvalue) * order / (2 * np.pi))) % order
    miss = abs(eigenvalue - np.exp(2j * np.pi * k / order))
    if miss > tol:
        raise SymmetryViolation(
            f"{what} eigenvalue {eigenvalue:.6g} is {miss:.3e} from the nearest {order}-th root of unity"
        )
    return k


def _resolve_unitary(w: np.ndarray, applied: np.ndarray, order: int, tol: float, what: str):
    """Rotate the orthonormal columns ``w`` into eigenvectors of a unitary U with ``U**order = 1``.

    ``applied`` holds ``U @ w``. The restriction ``w^dagger U w`` is normal, so
    its complex Schur form is diagonal and the Schur vectors are an
    orthonormal eigenbasis even inside degenerate blocks.
    """
    restricted = w.conj().T @ applied
    d = restricted.shape[0]
    unitarity = np.max(np.abs(restricted.conj().T @ restricted - np.eye(d))) if d else 0.0
    if unitarity > RESIDUAL_TOL:
        raise SymmetryViolation(f"restricted {what} is not unitary (defect {unitarity:.3e})")
    if d == 1:
        return w, [_snap_to_root(restricted[0, 0], order, tol, what)]
    t_form, z = scipy.linalg.schur(restricted, output="complex")
    labels = [_snap_to_root(t_form[i, i], order, tol, what) for i in range(d)]
    order_idx = np.argsort(labels, kind="stable")
    return w @ z[:, order_idx], [labels[i] for i in order_idx]


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Unit phase per column making the first largest-magnitude component real positive."""
    mags = np.abs(vectors)
    top = mags.max(axis=0)
    pivot = np.argmax(mags >= top * (1.0 - PHASE_TIE_TOL), axis=0)
    vals = vectors[pivot, np.arange(vectors.shape[1])]
    return np.conj(vals) / np.abs(vals)


class _Certifier:
    """Residual checks and charge resolution shared by both routes."""

    def __init__(self, bundle: HamiltonianBundle, t: TranslationOperator, tol: float, degeneracy_tol: float):
        self.params = bundle.params
        self.h = bundle.h
        self.t = t
        self.q_perm = charge_permutation(self.params)
        self.tol = tol
        self.degeneracy_tol = degeneracy_tol

    def apply_q(self, w: np.ndarray) -> np.ndarray:
        out = np.empty_like(w)
        out[self.q_perm] = w
        return out

    def resolve_charge(self, w: np.ndarray) -> tuple[np.ndarray, list[int]]:
        return _resolve_unitary(w, self.apply_q(w), self.params.n_states, ROOT_SNAP_TOL, "Q")

    def residuals(self, w: np.ndarray, energies: np.ndarray, momenta: np.ndarray):
        length = self.params.length
        h_res = np.linalg.norm(self.h @ w - w * energies, axis=0)
        tau = np.exp(2j * np.pi * momenta / length)
        t_res = np.linalg.norm(self.t.apply(w) - w * tau, axis=0)
        norms = np.linalg.norm(w, axis=0)
        bad = (h_res > self.tol * (1.0 + np.abs(energies))) | (t_res > self.tol)
        if np.any(bad) or np.any(np.abs(norms - 1.0) > NORM_TOL):
            i = int(np.argmax(bad | (np.abs(norms - 1.0) > NORM_TOL)))
            raise CertificationError(
                f"eigenvector failed certification: E={energies[i]:.12g} k={momenta[i]} "
                f"|Hv-Ev|={h_res[i]:.3e} |Tv-tau v|={t_res[i]:.3e} |v|={norms[i]:.15f}"
            )
        return h_res, t_res


def _sorted_report(params, evs: list[SimultaneousEigenvector], degeneracy_tol: float, route: str) -> SpectrumReport:
    evs = sorted(evs, key=lambda e: e.energy)
    ordered: list[SimultaneousEigenvector] = []
    energies = np.array([e.energy for e in evs])
    for level in cluster_levels(energies, degeneracy_tol):
        ordered.extend(sorted(evs[level], key=lambda e: (e.momentum, e.charge, e.energy)))
    ground = ordered[0].energy
    degeneracy = sum(1 for e in ordered if e.energy - ground <= degeneracy_tol * (1.0 + abs(ground)))
    return SpectrumReport(params, tuple(ordered), float(ground), degeneracy, route)


def assemble_simultaneous(
    params: ModelParams,
    bundle: HamiltonianBundle,
    t: TranslationOperator,
    tol: float = RESIDUAL_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
    leakage_tol: float = LEAKAGE_TOL,
) -> SpectrumReport:
    """Sector route: block-diagonalize H over momentum sectors and lift the eigenvectors."""
    cert = _Certifier(bundle, t, tol, degeneracy_tol)
    evs: list[SimultaneousEigenvector] = []
    for sector in build_all_sectors(params, t):
        if sector.dimension == 0:
            continue
        energies, coeffs = diagonalize_sector(project_hamiltonian(bundle.h, sector, leakage_tol))
        lifted = np.asarray(sector.embed(coeffs))
        charges = np.zeros(len(energies), dtype=int)
        for level in cluster_levels(energies, degeneracy_tol):
            w, labels = cert.resolve_charge(lifted[:, level])
            # lifted columns are basis @ coeffs with an isometric basis, so the
            # rotation applies to the coefficients unchanged
            rot = lifted[:, level].conj().T @ w
            coeffs[:, level] = coeffs[:, level] @ rot
            lifted[:, level] = w
            charges[level] = labels
        phases = _fix_phases(lifted)
        coeffs = coeffs * phases
        lifted = lifted * phases
        momenta = np.full(len(energies), sector.momentum)
        h_res, t_res = cert.residuals(lifted, energies, momenta)
        for i in range(len(energies)):
            evs.append(
                SimultaneousEigenvector(
                    energy=float(energies[i]),
                    momentum=sector.momentum,
                    charge=int(charges[i]),
                    h_residual=float(h_res[i]),
                    t_residual=float(t_res[i]),
                    coefficients=coeffs[:, i].copy(),
                    basis=sector.basis,
                )
            )
    return _sorted_report(params, evs, degeneracy_tol, "sector")


def assemble_simultaneous_oracle(
    params: ModelParams,
    bundle: HamiltonianBundle,
    t: TranslationOperator,
    tol: float = RESIDUAL_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
    dim_limit: int = ORACLE_DIM_LIMIT,
) -> SpectrumReport:
    """Dense route: diagonalize H, then T inside each degenerate cluster."""
    if params.dim > dim_limit:
        raise ValueError(f"dense oracle limited to N**L <= {dim_limit}, got {params.dim}")
    cert = _Certifier(bundle, t, tol, degeneracy_tol)
    energies, vectors = diagonalize_sector(bundle.h.toarray())
    length = params.length
    momenta = np.zeros(len(energies), dtype=int)
    charges = np.zeros(len(energies), dtype=int)
    for level in cluster_levels(energies, degeneracy_tol):
        w = vectors[:, level]
        w, ks = _resolve_unitary(w, t.apply(w), length, ROOT_SNAP_TOL, "T")
        ks = np.asarray(ks)
        for k in np.unique(ks):
            cols = np.flatnonzero(ks == k)
            w[:, cols], labels = cert.resolve_charge(w[:, cols])
            charges[level.start + cols] = labels
        vectors[:, level] = w
        momenta[level] = ks
    vectors = vectors * _fix_phases(vectors)
    h_res, t_res = cert.residuals(vectors, energies, momenta)
    evs = [
        SimultaneousEigenvector(
            energy=float(energies[i]),
            momentum=int(momenta[i]),
            charge=int(charges[i]),
            h_residual=float(h_res[i]),
            t_residual=float(t_res[i]),
            coefficients=vectors[:, i].copy(),
        )
        for i in range(len(energies))
    ]
    return _sorted_report(params, evs, degeneracy_tol, "oracle")


def select_ground_states(report: SpectrumReport, tol: float = DEGENERACY_TOL) -> list[SimultaneousEigenvector]:
    """Every eigenvector within the degeneracy tolerance of the minimum energy."""
    if not report.eigenvectors:
        raise ValueError("empty spectrum report")
    e0 = report.ground_energy
    return [ev for ev in report.eigenvectors if ev.energy - e0 <= tol * (1.0 + abs(e0))]


def compare_routes(primary: SpectrumReport, oracle: SpectrumReport, tol: float = DEGENERACY_TOL):
    """Max sorted-energy difference and whether per-level momentum multisets agree."""
    e1, e2 = primary.energies, oracle.energies
    if e1.shape != e2.shape:
        return float("inf"), False
    max_diff = float(np.max(np.abs(e1 - e2))) if e1.size else 0.0
    k1, k2 = primary.momenta, oracle.momenta
    same = all(sorted(k1[level]) == sorted(k2[level]) for level in cluster_levels(e1, tol))
    return max_diff, same
