"""Momentum sectors from cyclic orbits (necklaces) of product configurations.

For an orbit with representative ``|c>`` and period ``p`` the momentum-k
basis vector is

    v = p**-0.5 * sum_{m=0}^{p-1} exp(-2 pi i k m / L) T^m |c>,

which is nonzero only when ``k p = 0 (mod L)`` and satisfies
``T v = exp(2 pi i k / L) v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import SymmetryViolation
from .model import TranslationOperator, build_translation
from .operators import BasisConfig, ModelParams, is_hermitian
from .tolerances import HERMITIAN_TOL, LEAKAGE_TOL


@dataclass(frozen=True)
class CyclicOrbit:
    """Rotation orbit; ``members[m]`` is the flat index of ``T^m`` applied to the representative."""

    representative: BasisConfig
    period: int
    members: tuple[int, ...]

    def supports(self, k: int, length: int) -> bool:
        return (k * self.period) % length == 0


def _rotation_table(t: TranslationOperator) -> np.ndarray:
    # row m holds the permutation of T^m
    length, dim = t.params.length, t.permutation.size
    table = np.empty((length, dim), dtype=np.int64)
    table[0] = np.arange(dim)
    for m in range(1, length):
        table[m] = t.permutation[table[m - 1]]
    return table


def enumerate_orbits(params: ModelParams, t: TranslationOperator | None = None) -> list[CyclicOrbit]:
    """All rotation orbits, ordered by representative (the lexicographically minimal rotation)."""
    t = t or build_translation(params)
    table = _rotation_table(t)
    reps = table.min(axis=0)
    orbits = []
    for rep in np.flatnonzero(reps == np.arange(params.dim)):
        images = table[:, rep]
        period = int(np.flatnonzero(images[1:] == rep)[0] + 1) if np.any(images[1:] == rep) else params.length
        orbits.append(
            CyclicOrbit(
                representative=BasisConfig.from_index(int(rep), params),
                period=period,
                members=tuple(int(x) for x in images[:period]),
            )
        )
    return orbits


@dataclass(frozen=True, eq=False)
class MomentumSector:
    """Symmetry-adapted subspace with T eigenvalue ``exp(2 pi i k / L)``.

    ``basis`` is the sparse ``(N**L, dimension)`` embedding whose columns are
    the orthonormal orbit vectors, one per supporting orbit.
    """

    momentum: int
    orbits: tuple[CyclicOrbit, ...]
    basis: sp.csr_matrix
    params: ModelParams

    @property
    def dimension(self) -> int:
        return len(self.orbits)

    @property
    def eigenvalue(self) -> complex:
        return complex(np.exp(2j * np.pi * self.momentum / self.params.length))

    def embed(self, coefficients: np.ndarray) -> np.ndarray:
        """Lift sector coordinates (vector or column stack) to full-space amplitudes."""
        return self.basis @ coefficients


def build_sector(k: int, orbits: list[CyclicOrbit], params: ModelParams) -> MomentumSector:
    length = params.length
    if not 0 <= k < length:
        raise ValueError(f"momentum k must satisfy 0 <= k < {length}, got {k}")
    kept = tuple(o for o in orbits if o.supports(k, length))
    rows, cols, vals = [], [], []
    for col, orbit in enumerate(kept):
        p = orbit.period
        m = np.arange(p)
        rows.append(np.asarray(orbit.members, dtype=np.int64))
        cols.append(np.full(p, col, dtype=np.int64))
        vals.append(np.exp(-2j * np.pi * k * m / length) / np.sqrt(p))
    if kept:
        basis = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(params.dim, len(kept)),
        )
    else:
        basis = sp.csr_matrix((params.dim, 0), dtype=complex)
    return MomentumSector(k, kept, basis, params)


def build_all_sectors(params: ModelParams, t: TranslationOperator | None = None) -> list[MomentumSector]:
    orbits = enumerate_orbits(params, t)
    return [build_sector(k, orbits, params) for k in range(params.length)]


def sector_leakage(h: sp.spmatrix, sector: MomentumSector) -> tuple[np.ndarray, np.ndarray]:
    """Sector matrix ``V^dagger H V`` and per-column norms of ``(1 - P) H V``."""
    v = sector.basis
    hv = (h @ v).toarray()
    s = (v.conj().T @ hv)
    s = np.asarray(s)
    leak = np.linalg.norm(hv - v @ s, axis=0) if sector.dimension else np.zeros(0)
    return s, leak


def project_hamiltonian(h: sp.spmatrix, sector: MomentumSector, tol: float = LEAKAGE_TOL) -> np.ndarray:
    """Dense Hermitian block of H in the sector basis; aborts on leakage above ``tol``."""
    s, leak = sector_leakage(h, sector)
    if leak.size and leak.max() > tol:
        worst = int(np.argmax(leak))
        raise SymmetryViolation(
            f"H leaks out of momentum sector k={sector.momentum}: "
            f"|(1-P)Hv| = {leak[worst]:.3e} for orbit {sector.orbits[worst].representative.digits}"
        )
    if s.size and not is_hermitian(s, HERMITIAN_TOL):
        raise SymmetryViolation(f"sector matrix k={sector.momentum} is not Hermitian")
    return 0.5 * (s + s.conj().T)
