"""Two-point functions ``rho_r(R) = <psi| Z_0^r Z_R^{dagger r} |psi>`` and their reflection residuals.

The operator is diagonal in the product basis, so every expectation value is
a weighted phase sum over ``|psi(c)|**2``; no operator matrix is formed. The
convention puts the dagger on the second site. Correlators written as
``<Z_0^r Z_R^r>`` elsewhere correspond to ``rho_{N-r}(R)`` here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .model import HamiltonianBundle, build_translation
from .operators import ModelParams, digit_table, root_of_unity
from .spectra import SimultaneousEigenvector, SpectrumReport, assemble_simultaneous
from .tolerances import NEGATIVE_CONTROL_THRESHOLD, SYMMETRY_TOL

NORMALIZATION_TOL = 1e-12


@lru_cache(maxsize=16)
def _phase_table(n_states: int, length: int) -> np.ndarray:
    # phases[c, r-1, R] = omega^{r (c_0 - c_R)}
    digits = digit_table(ModelParams(n_states, length))
    diff = digits[:, :1] - digits
    r = np.arange(1, n_states)
    table = root_of_unity(r[None, :, None] * diff[:, None, :], n_states)
    table.setflags(write=False)
    return table


def _probabilities(psi: np.ndarray, params: ModelParams) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.shape != (params.dim,):
        raise ValueError(f"state must have shape ({params.dim},), got {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"state is not normalized: |psi| = {norm:.15f}")
    probs = np.abs(psi) ** 2
    return probs / probs.sum()


def pair_expectation(psi: np.ndarray, r: int, i: int, j: int, params: ModelParams) -> complex:
    """``<psi| Z_i^r Z_j^{dagger r} |psi>`` for sites reduced mod L."""
    n, length = params.n_states, params.length
    if not 1 <= r <= n - 1:
        raise ValueError(f"r must satisfy 1 <= r <= {n - 1}, got {r}")
    digits = digit_table(params)
    probs = _probabilities(psi, params)
    return complex(probs @ root_of_unity(r * (digits[:, i % length] - digits[:, j % length]), n))


def two_point(psi: np.ndarray, r: int, R: int, params: ModelParams) -> complex:
    return pair_expectation(psi, r, 0, R, params)


def correlation_matrix(psi: np.ndarray, params: ModelParams) -> np.ndarray:
    """``rho[r-1, R]`` for all ``1 <= r <= N-1`` and ``0 <= R < L``."""
    probs = _probabilities(psi, params)
    table = _phase_table(params.n_states, params.length)
    return np.tensordot(probs, table, axes=(0, 0))


def reflection_residuals(rho: np.ndarray) -> np.ndarray:
    """``|rho_r(R)^* - rho_r(-R mod L)|`` elementwise."""
    length = rho.shape[1]
    reflected = rho[:, (-np.arange(length)) % length]
    return np.abs(rho.conj() - reflected)


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Two-point table for one eigenvector.

    Row ``r - 1`` of ``values`` and ``symmetry_residuals`` holds ``r``;
    ``midpoint_imag`` is ``|Im rho_r(L/2)|`` per r, or None for odd L.
    """

    params: ModelParams
    energy: float
    momentum: int
    charge: int
    index: int
    values: np.ndarray = field(repr=False)
    symmetry_residuals: np.ndarray = field(repr=False)
    midpoint_imag: np.ndarray | None = field(repr=False)

    def rho(self, r: int, R: int) -> complex:
        return complex(self.values[r - 1, R % self.params.length])

    @property
    def max_symmetry_residual(self) -> float:
        return float(self.symmetry_residuals.max())

    @property
    def max_midpoint_imag(self) -> float | None:
        if self.midpoint_imag is None:
            return None
        return float(self.midpoint_imag.max())

    def passes(self, tol: float = SYMMETRY_TOL, midpoint_tol: float = SYMMETRY_TOL) -> bool:
        ok = self.max_symmetry_residual <= tol
        if self.midpoint_imag is not None:
            ok = ok and self.max_midpoint_imag <= midpoint_tol
        return ok


def correlation_table(ev: SimultaneousEigenvector, params: ModelParams, index: int = -1) -> CorrelationTable:
    values = correlation_matrix(ev.vector, params)
    mid = np.abs(values[:, params.length // 2].imag) if params.length % 2 == 0 else None
    return CorrelationTable(
        params=params,
        energy=ev.energy,
        momentum=ev.momentum,
        charge=ev.charge,
        index=index,
        values=values,
        symmetry_residuals=reflection_residuals(values),
        midpoint_imag=mid,
    )


def max_symmetry_residual(psi: np.ndarray, params: ModelParams) -> float:
    return float(reflection_residuals(correlation_matrix(psi, params)).max())


@dataclass(frozen=True)
class NegativeControlReport:
    seed: int
    attempts: tuple[dict, ...]
    threshold: float
    control_residual: float
    passed: bool

    @property
    def max_residual(self) -> float:
        return max((a["max_residual"] for a in self.attempts), default=0.0)


def mix_momentum_eigenvectors(report: SpectrumReport, rng: np.random.Generator):
    """Random unit-norm combination of two eigenvectors with distinct momenta and equal charge.

    Correlators conserve the Z_N charge, so cross terms between different
    charges drop out; pairing equal charges keeps the interference that
    breaks the reflection identity.
    """
    length = report.params.length
    by_key: dict[tuple[int, int], list[int]] = {}
    for i, ev in enumerate(report.eigenvectors):
        by_key.setdefault((ev.momentum, ev.charge), []).append(i)
    candidates = [
        (k1, k2, q)
        for q in range(report.params.n_states)
        for k1 in range(length)
        for k2 in range(k1 + 1, length)
        if (k1, q) in by_key and (k2, q) in by_key
    ]
    if not candidates:
        raise ValueError("no pair of momentum sectors shares a charge")
    k1, k2, q = candidates[rng.integers(len(candidates))]
    i = by_key[(k1, q)][rng.integers(len(by_key[(k1, q)]))]
    j = by_key[(k2, q)][rng.integers(len(by_key[(k2, q)]))]
    weights = rng.normal(size=2) + 1j * rng.normal(size=2)
    weights /= np.linalg.norm(weights)
    psi = weights[0] * report.eigenvectors[i].vector + weights[1] * report.eigenvectors[j].vector
    psi = psi / np.linalg.norm(psi)
    return psi, {"momenta": [k1, k2], "charge": q, "indices": [i, j]}


def negative_control(
    params: ModelParams,
    bundle: HamiltonianBundle,
    seed: int = 0,
    retries: int = 5,
    threshold: float = NEGATIVE_CONTROL_THRESHOLD,
    report: SpectrumReport | None = None,
) -> NegativeControlReport:
    """Show the reflection identity fails off the translation eigenbasis.

    Draws seeded mixtures of two momentum eigenvectors until one exceeds
    ``threshold`` (at most ``retries`` draws). The ground state run through
    the same residual path is returned as ``control_residual``. For N=2, L=2
    every correlator is real and R = -R, so no draw can pass.
    """
    if report is None:
        report = assemble_simultaneous(params, bundle, build_translation(params))
    rng = np.random.default_rng(seed)
    attempts = []
    passed = False
    for attempt in range(retries):
        psi, meta = mix_momentum_eigenvectors(report, rng)
        residual = max_symmetry_residual(psi, params)
        attempts.append({"attempt": attempt, **meta, "max_residual": residual})
        if residual > threshold:
            passed = True
            break
    control = max_symmetry_residual(report.eigenvectors[0].vector, params)
    return NegativeControlReport(seed, tuple(attempts), threshold, control, passed)
