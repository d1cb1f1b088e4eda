"""Input states: Schmidt-form pure states, Bell encodings, Werner fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import I4, NORM_TOL, as_matrix, projector


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Schmidt coefficients ``lambdas`` of a ``k x k`` pure state.

    The coefficients are kept in the order given; nothing is sorted.
    """

    lambdas: tuple[float, ...]

    def __init__(self, lambdas: Sequence[float], tol: float = NORM_TOL):
        lam = tuple(float(x) for x in lambdas)
        if len(lam) < 1:
            raise ValueError("Schmidt spectrum needs at least one coefficient")
        if any(not np.isfinite(x) or x < 0 for x in lam):
            raise ValueError(f"Schmidt coefficients must be finite and non-negative: {lam}")
        if abs(sum(lam) - 1.0) > tol:
            raise ValueError(f"Schmidt coefficients sum to {sum(lam)!r}, expected 1")
        object.__setattr__(self, "lambdas", lam)

    @property
    def k(self) -> int:
        return len(self.lambdas)

    @classmethod
    def qubits(cls, lambda1: float) -> SchmidtSpectrum:
        """Two-qubit spectrum ``(lambda1, 1 - lambda1)``."""
        return cls((lambda1, 1.0 - lambda1))

    @classmethod
    def uniform(cls, k: int) -> SchmidtSpectrum:
        return cls([1.0 / k] * k)


def _bit(b) -> int:
    if isinstance(b, bool) or b not in (0, 1):
        raise ValueError(f"encoded bit must be 0 or 1, got {b!r}")
    return int(b)


def schmidt_state(s: SchmidtSpectrum) -> np.ndarray:
    """``sum_i sqrt(lambda_i) |i>|i>`` as a ``k**2`` vector."""
    k = s.k
    psi = np.zeros(k * k, dtype=complex)
    for i, lam in enumerate(s.lambdas):
        psi[i * k + i] = np.sqrt(lam)
    return psi


def bell_encode(bit: int) -> np.ndarray:
    """Bit 0 -> ``(|00> + |11>)/sqrt2``, bit 1 -> ``(|00> - |11>)/sqrt2``."""
    sign = 1.0 - 2.0 * _bit(bit)
    return np.array([1.0, 0.0, 0.0, sign], dtype=complex) / np.sqrt(2.0)


PHI_PLUS = bell_encode(0)
PHI_MINUS = bell_encode(1)


def coin_toss(rng: np.random.Generator) -> int:
    """Fair bit drawn from a caller-owned generator."""
    return int(rng.integers(0, 2))


def concurrence_pure(s: SchmidtSpectrum) -> float:
    """Concurrence ``2 sqrt(lambda_1 lambda_2)`` of a two-qubit Schmidt state."""
    if s.k != 2:
        raise ValueError(f"pure-state concurrence is defined here for k=2 only, got k={s.k}")
    l1, l2 = s.lambdas
    return 2.0 * np.sqrt(l1 * l2)


@dataclass(frozen=True)
class WernerFit:
    """Best fit ``p |Phi+><Phi+| + (1 - p)/4 I``.

    ``visibility`` is ``None`` when the residual exceeds the tolerance.
    """

    visibility: float | None
    residual: float
    best_p: float

    @property
    def is_werner(self) -> bool:
        return self.visibility is not None


def werner_matrix(p: float) -> np.ndarray:
    return p * projector(PHI_PLUS) + (1.0 - p) / 4.0 * I4


def werner_decompose(m, tol: float = 1e-10) -> WernerFit:
    """
    Fit a two-qubit matrix to the Werner family around ``|Phi+>``.

    The visibility follows from the fidelity ``F = <Phi+|m|Phi+>`` through
    ``F = p + (1 - p)/4``; the residual is the Frobenius distance to the
    fitted Werner matrix.
    """
    a = as_matrix(m)
    if a.shape != (4, 4):
        raise ValueError(f"Werner decomposition needs a 4x4 matrix, got {a.shape}")
    fidelity = float(np.real(PHI_PLUS.conj() @ a @ PHI_PLUS))
    p = (4.0 * fidelity - 1.0) / 3.0
    residual = float(np.linalg.norm(a - werner_matrix(p)))
    return WernerFit(p if residual <= tol else None, residual, p)
