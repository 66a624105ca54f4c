"""Hamiltonian, translation and Z_N charge of the periodic chiral Potts chain.

    H  = A0 + lam * A1
    A0 = - sum_j sum_{r=1}^{N-1} c_r Z_j^r Z_{j+1}^{dagger r}
    A1 = - sum_j sum_{r=1}^{N-1} c_r X_j^r
    c_r = exp(i pi (2r - N) / (2N)) / sin(pi r / N)

Site indices are periodic. A0 is diagonal in the product basis and is built
from per-configuration phase sums; A1 and the charge are built from digit
arithmetic on flat indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .exceptions import SymmetryViolation
from .operators import ModelParams, digit_table, is_hermitian, place_values, prune, root_of_unity
from .tolerances import HERMITIAN_TOL


def chiral_potts_coefficient(r: int, n_states: int) -> complex:
    """Superintegrable coupling ``exp(i pi (2r - N)/(2N)) / sin(pi r / N)``."""
    if not 1 <= r <= n_states - 1:
        raise ValueError(f"r must satisfy 1 <= r <= N-1 = {n_states - 1}, got {r}")
    phase = np.exp(1j * np.pi * (2 * r - n_states) / (2 * n_states))
    return complex(phase / np.sin(np.pi * r / n_states))


def _bond_phase_sums(n_states: int) -> np.ndarray:
    # f[delta] = sum_r c_r omega^{r delta}; real because c_{N-r} = conj(c_r)
    f = np.zeros(n_states, dtype=complex)
    for r in range(1, n_states):
        f += chiral_potts_coefficient(r, n_states) * root_of_unity(r * np.arange(n_states), n_states)
    return f


def build_a0(params: ModelParams) -> sp.csr_matrix:
    digits = digit_table(params)
    delta = (digits - np.roll(digits, -1, axis=1)) % params.n_states
    diag = -_bond_phase_sums(params.n_states)[delta].sum(axis=1)
    return prune(sp.diags(diag, format="csr"))


def build_a1(params: ModelParams) -> sp.csr_matrix:
    """Transverse term; each column couples to the L*(N-1) single-digit shifts."""
    n, length, dim = params.n_states, params.length, params.dim
    digits = digit_table(params)
    place = place_values(params)
    cols = np.arange(dim, dtype=np.int64)
    rows, vals, col_list = [], [], []
    for r in range(1, n):
        coef = -chiral_potts_coefficient(r, n)
        for j in range(length):
            shifted = (digits[:, j] + r) % n
            rows.append(cols + (shifted - digits[:, j]) * place[j])
            col_list.append(cols)
            vals.append(np.full(dim, coef))
    m = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(col_list))),
        shape=(dim, dim),
    )
    return prune(m)


@dataclass(frozen=True, eq=False)
class HamiltonianBundle:
    params: ModelParams
    a0: sp.csr_matrix
    a1: sp.csr_matrix
    h: sp.csr_matrix
    hermitian_hint: bool = True


def build_hamiltonian(params: ModelParams, tol: float = HERMITIAN_TOL) -> HamiltonianBundle:
    a0 = build_a0(params)
    a1 = build_a1(params)
    h = prune(a0 + params.coupling * a1)
    for name, m in (("A0", a0), ("A1", a1), ("H", h)):
        if not is_hermitian(m, tol):
            raise SymmetryViolation(f"{name} is not Hermitian for {params}")
    return HamiltonianBundle(params, a0, a1, h)


def _permutation_matrix(perm: np.ndarray) -> sp.csr_matrix:
    # column c has its single 1 in row perm[c], so M|c> = |perm[c]>
    dim = perm.size
    return sp.csr_matrix((np.ones(dim, dtype=complex), (perm, np.arange(dim))), shape=(dim, dim))


def _apply_permutation(perm: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[perm] = v
    return out


@dataclass(frozen=True, eq=False)
class TranslationOperator:
    """One-site translation as a basis permutation, ``T|c> = |perm[c]>``.

    Digit contents move one site to the right: site j+1 receives the old
    site-j digit, so that ``T Z_j T^-1 = Z_{j+1}``.
    """

    permutation: np.ndarray
    params: ModelParams
    inverse: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.int64)
        perm.setflags(write=False)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        inv.setflags(write=False)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "inverse", inv)

    def power(self, m: int) -> np.ndarray:
        """Permutation array of ``T**m`` (any integer m, reduced mod L)."""
        m %= self.params.length
        perm = np.arange(self.permutation.size)
        for _ in range(m):
            perm = self.permutation[perm]
        return perm

    def apply(self, v: np.ndarray, m: int = 1) -> np.ndarray:
        """``T**m v`` for a vector or a stack of column vectors."""
        return _apply_permutation(self.power(m), v)

    def matrix(self, m: int = 1) -> sp.csr_matrix:
        return _permutation_matrix(self.power(m))


def build_translation(params: ModelParams) -> TranslationOperator:
    digits = digit_table(params)
    rotated = np.roll(digits, 1, axis=1)
    return TranslationOperator(rotated @ place_values(params), params)


def charge_permutation(params: ModelParams) -> np.ndarray:
    """``Q|c> = |c + (1, ..., 1) mod N>`` as a permutation array."""
    digits = digit_table(params)
    return ((digits + 1) % params.n_states) @ place_values(params)


def build_charge(params: ModelParams) -> sp.csr_matrix:
    """Global Z_N charge ``Q = prod_j X_j``."""
    return _permutation_matrix(charge_permutation(params))


def apply_charge(params: ModelParams, v: np.ndarray) -> np.ndarray:
    return _apply_permutation(charge_permutation(params), v)
