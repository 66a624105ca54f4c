"""Single-site Weyl (clock and shift) operators and their embedding in the chain.

Basis convention: a product configuration ``(a_0, ..., a_{L-1})`` has flat
index ``sum_j a_j * N**(L-1-j)``, i.e. site 0 is the most significant base-N
digit. With this ordering, embedding at site 0 is a leading Kronecker factor
and lexicographic order of digit strings coincides with index order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionBudgetError
from .tolerances import DROP_TOL

DEFAULT_DIM_BUDGET = 2**20
BUDGET_ENV_VAR = "CHAIN_DIM_BUDGET"


def dimension_budget() -> int:
    """Current cap on N**L; ``CHAIN_DIM_BUDGET`` overrides the default 2**20."""
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_DIM_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{BUDGET_ENV_VAR} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Chain parameters: number of spin states N, length L and real coupling lambda."""

    n_states: int
    length: int
    coupling: float = 0.5

    def __post_init__(self):
        if isinstance(self.n_states, bool) or not isinstance(self.n_states, (int, np.integer)):
            raise TypeError(f"n_states must be an integer, got {self.n_states!r}")
        if isinstance(self.length, bool) or not isinstance(self.length, (int, np.integer)):
            raise TypeError(f"length must be an integer, got {self.length!r}")
        if self.n_states < 2:
            raise ValueError(f"n_states must be >= 2, got {self.n_states}")
        if self.length < 2:
            raise ValueError(f"length must be >= 2, got {self.length}")
        if isinstance(self.coupling, (complex, np.complexfloating)):
            raise TypeError("coupling must be real")
        coupling = float(self.coupling)
        if not math.isfinite(coupling):
            raise ValueError(f"coupling must be finite, got {self.coupling}")
        object.__setattr__(self, "n_states", int(self.n_states))
        object.__setattr__(self, "length", int(self.length))
        object.__setattr__(self, "coupling", coupling)
        budget = dimension_budget()
        if self.n_states**self.length > budget:
            raise DimensionBudgetError(
                f"N**L = {self.n_states}**{self.length} = {self.n_states**self.length} "
                f"exceeds the dimension budget {budget}"
            )

    @property
    def dim(self) -> int:
        return self.n_states**self.length

    def with_coupling(self, coupling: float) -> "ModelParams":
        return ModelParams(self.n_states, self.length, coupling)


@dataclass(frozen=True)
class BasisConfig:
    """A product-basis configuration as digits plus its flat index."""

    digits: tuple[int, ...]
    index: int

    @classmethod
    def from_digits(cls, digits, n_states: int) -> "BasisConfig":
        digits = tuple(int(d) for d in digits)
        if any(d < 0 or d >= n_states for d in digits):
            raise ValueError(f"digits {digits} out of range for N={n_states}")
        index = 0
        for d in digits:
            index = index * n_states + d
        return cls(digits, index)

    @classmethod
    def from_index(cls, index: int, params: ModelParams) -> "BasisConfig":
        if not 0 <= index < params.dim:
            raise ValueError(f"index {index} out of range [0, {params.dim})")
        digits = []
        rest = int(index)
        for _ in range(params.length):
            rest, d = divmod(rest, params.n_states)
            digits.append(d)
        return cls(tuple(reversed(digits)), int(index))


@lru_cache(maxsize=32)
def _digit_table(n_states: int, length: int) -> np.ndarray:
    idx = np.arange(n_states**length, dtype=np.int64)
    place = n_states ** np.arange(length - 1, -1, -1, dtype=np.int64)
    table = (idx[:, None] // place[None, :]) % n_states
    table.setflags(write=False)
    return table


def digit_table(params: ModelParams) -> np.ndarray:
    """Read-only ``(N**L, L)`` array of configuration digits, row = flat index."""
    return _digit_table(params.n_states, params.length)


def place_values(params: ModelParams) -> np.ndarray:
    return params.n_states ** np.arange(params.length - 1, -1, -1, dtype=np.int64)


def root_of_unity(exponent, n_states: int):
    """``omega**exponent`` with ``omega = exp(2 pi i / N)``, exponent reduced mod N first."""
    return np.exp(2j * np.pi * (np.asarray(exponent) % n_states) / n_states)


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Dense N x N single-site operator.

    ``kind`` tags the Weyl generators ('Z' or 'X') so powers can be taken in
    closed form; any other operator has ``kind=None``.
    """

    matrix: np.ndarray
    kind: str | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"local operator must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "LocalOperator":
        return LocalOperator(self.matrix.conj().T)

    def __matmul__(self, other: "LocalOperator") -> "LocalOperator":
        return LocalOperator(self.matrix @ other.matrix)


def _check_n(n_states: int) -> None:
    if n_states < 2:
        raise ValueError(f"n_states must be >= 2, got {n_states}")


def build_z(n_states: int) -> LocalOperator:
    """Clock operator ``diag(1, omega, ..., omega**(N-1))``."""
    _check_n(n_states)
    return LocalOperator(np.diag(root_of_unity(np.arange(n_states), n_states)), kind="Z")


def build_x(n_states: int) -> LocalOperator:
    """Cyclic shift with ``X[a, b] = 1`` iff ``a = b + 1 (mod N)``."""
    _check_n(n_states)
    return LocalOperator(np.roll(np.eye(n_states), 1, axis=0), kind="X")


def local_power(op: LocalOperator, r: int) -> LocalOperator:
    """``op**r`` for ``0 <= r < N``; closed form for Z and X."""
    n = op.dim
    if not 0 <= r < n:
        raise ValueError(f"power r must satisfy 0 <= r < {n}, got {r}")
    if op.kind == "Z":
        return LocalOperator(np.diag(root_of_unity(r * np.arange(n), n)))
    if op.kind == "X":
        return LocalOperator(np.roll(np.eye(n), r, axis=0))
    return LocalOperator(np.linalg.matrix_power(op.matrix, r))


def prune(matrix, tol: float = DROP_TOL) -> sp.csr_matrix:
    """CSR copy of ``matrix`` with entries of magnitude below ``tol`` removed."""
    m = sp.csr_matrix(matrix, dtype=complex)
    m.data[np.abs(m.data) < tol] = 0
    m.eliminate_zeros()
    m.sort_indices()
    return m


def embed_at_site(op: LocalOperator, site: int, params: ModelParams) -> sp.csr_matrix:
    """``id^{site} (x) op (x) id^{L-1-site}`` as a sparse matrix on the chain."""
    if op.dim != params.n_states:
        raise ValueError(f"operator dimension {op.dim} does not match N={params.n_states}")
    if not 0 <= site < params.length:
        raise ValueError(f"site {site} out of range [0, {params.length})")
    n = params.n_states
    left = sp.identity(n**site, dtype=complex, format="csr")
    right = sp.identity(n ** (params.length - 1 - site), dtype=complex, format="csr")
    return prune(sp.kron(sp.kron(left, sp.csr_matrix(op.matrix)), right))


def max_abs(matrix) -> float:
    """Entrywise max-norm of a dense or sparse matrix."""
    if sp.issparse(matrix):
        data = matrix.tocoo().data
        return float(np.max(np.abs(data))) if data.size else 0.0
    arr = np.asarray(matrix)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def hermiticity_defect(matrix) -> float:
    return max_abs(matrix - matrix.conj().T)


def is_hermitian(matrix, tol: float) -> bool:
    """``||M - M^dagger||_max <= tol * (1 + ||M||_max)``."""
    return hermiticity_defect(matrix) <= tol * (1.0 + max_abs(matrix))
