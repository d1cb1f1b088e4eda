"""
Two-qubit entanglement diagnostics: witnesses, concurrence, PPT.

The PPT test is the reference decision for 2x2 systems. Witnesses only
certify entanglement when their expectation is negative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cloning import CloningParams, coefficient_set, local_state
from .linalg import (
    HERMITIAN_TOL,
    I4,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    LinalgError,
    as_matrix,
    hermitian_eigenvalues,
    is_hermitian,
    partial_transpose,
    psd_sqrt,
    require_density_matrix,
)
from .states import SchmidtSpectrum

BOUNDARY_TOL = 1e-10
SQRT3 = np.sqrt(3.0)

# sigma_x x sigma_x - sigma_y x sigma_y + sigma_z x sigma_z
THETA = np.kron(SIGMA_X, SIGMA_X) - np.kron(SIGMA_Y, SIGMA_Y) + np.kron(SIGMA_Z, SIGMA_Z)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


class WitnessKind(enum.Enum):
    W1 = "W1"
    W2 = "W2"


@dataclass(frozen=True)
class WitnessOperator:
    kind: WitnessKind
    matrix: np.ndarray


def witness(kind="W1") -> WitnessOperator:
    """``W1 = (I - THETA)/(2 sqrt3)`` or ``W2 = (I - THETA)/2``."""
    kind = WitnessKind(kind.value if isinstance(kind, WitnessKind) else kind)
    scale = 2.0 * SQRT3 if kind is WitnessKind.W1 else 2.0
    return WitnessOperator(kind, (I4 - THETA) / scale)


W1 = witness("W1")
W2 = witness("W2")


def witness_value(w: WitnessOperator, rho) -> float:
    """Expectation ``Tr(W rho)``; negative values certify entanglement."""
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise LinalgError(f"witness needs a 4x4 state, got {m.shape}")
    if not is_hermitian(m):
        raise LinalgError("state is not Hermitian")
    return float(np.real(np.trace(w.matrix @ m)))


def witness_closed_form(s: SchmidtSpectrum, p: CloningParams) -> float:
    """``(-2/sqrt3)(Q sqrt(l1 l2) - R)`` for the non-local output under W1."""
    cs = coefficient_set(p)
    l1, l2 = s.lambdas
    return -2.0 / SQRT3 * (cs.Q * np.sqrt(l1 * l2) - cs.R)


@dataclass(frozen=True)
class LocalWitnessReport:
    value: float
    closed_form: float
    printed_value: float
    note: str


def local_witness_report(p: CloningParams, lambdas=(0.5, 0.5)) -> LocalWitnessReport:
    """W1 on the local output, next to the constant ``1/(3 sqrt3)`` quoted for it.

    The evaluated value is ``2 d**2 / sqrt3`` for any Schmidt spectrum; the
    two coincide only at ``d**2 = 1/6``.
    """
    if p.k != 2:
        raise ValueError("local witness report is defined for k=2")
    value = witness_value(W1, local_state(SchmidtSpectrum(lambdas), p))
    closed = 2.0 * p.d**2 / SQRT3
    printed = 1.0 / (3.0 * SQRT3)
    note = (
        f"Tr(W1 rho_local) = 2d^2/sqrt3 = {closed:.12g}; "
        f"the quoted 1/(3 sqrt3) = {printed:.12g} holds only at d^2 = 1/6"
    )
    return LocalWitnessReport(value, closed, printed, note)


def local_separability_margin(s: SchmidtSpectrum, p: CloningParams) -> float:
    """
    ``c**2 sqrt(l1 l2) - d**2``: the smallest partial-transpose eigenvalue
    of the local output's inner block.

    The local output is separable iff this is non-negative. It is not
    separable everywhere: a product input (``l1 = 0``) with ``d > 0`` or a
    Bell input with ``c**2 < 1/2`` both give an entangled original/clone pair.
    W1 cannot see this, since its value on the local output is never negative.
    """
    if p.k != 2 or s.k != 2:
        raise ValueError("local separability margin is defined for k=2")
    l1, l2 = s.lambdas
    return p.c**2 * np.sqrt(l1 * l2) - p.d**2


@dataclass(frozen=True)
class ThresholdReport:
    c: float
    critical_concurrence: float
    in_validity_range: bool


def critical_concurrence(c: float) -> ThresholdReport:
    """Minimum input concurrence ``(1 + c**2)/(4 c**2)`` for an entangled non-local output."""
    c = float(c)
    if not (0.0 < c <= 1.0):
        raise ValueError(f"c must lie in (0, 1], got {c!r}")
    return ThresholdReport(c, (1.0 + c * c) / (4.0 * c * c), c > 1.0 / SQRT3)


def is_x_state(rho, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(rho)
    mask = np.ones((4, 4), dtype=bool)
    for i in range(4):
        mask[i, i] = False
        mask[i, 3 - i] = False
    return bool(np.max(np.abs(m[mask])) <= tol)


def concurrence_x_state(rho) -> float:
    m = np.asarray(rho)
    r00, r11, r22, r33 = (m[i, i].real for i in range(4))
    a = abs(m[0, 3]) - np.sqrt(max(r11 * r22, 0.0))
    b = abs(m[1, 2]) - np.sqrt(max(r00 * r33, 0.0))
    return float(2.0 * max(0.0, a, b))


def concurrence_spectral(rho) -> float:
    """
    Wootters concurrence from Hermitian decompositions only.

    Uses the eigenvalues of ``sqrt(rho) rho_tilde sqrt(rho)``, whose square
    roots are the usual ``R``-matrix singular values.
    """
    m = as_matrix(rho)
    root = psd_sqrt(m)
    tilde = SIGMA_YY @ m.conj() @ SIGMA_YY
    h = root @ tilde @ root
    h = (h + h.conj().T) / 2
    mu = np.sqrt(np.clip(hermitian_eigenvalues(h), 0.0, None))[::-1]
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def concurrence_mixed(rho) -> float:
    m = require_density_matrix(rho, 4)
    if is_x_state(m):
        return concurrence_x_state(m)
    return concurrence_spectral(m)


def min_pt_eigenvalue(rho) -> float:
    m = require_density_matrix(rho, 4)
    return float(hermitian_eigenvalues(partial_transpose(m, [2, 2], 1))[0])


def ppt_entangled(rho, tol: float = BOUNDARY_TOL) -> bool:
    """True iff the partial transpose on the second qubit has an eigenvalue below ``-tol``."""
    return min_pt_eigenvalue(rho) < -tol


class Verdict(enum.Enum):
    ENTANGLED = "entangled"
    SEPARABLE = "separable"
    BOUNDARY = "boundary"


def classify(rho, w: WitnessOperator = W1, tol: float = BOUNDARY_TOL) -> Verdict:
    """PPT verdict, with states on either decision surface reported as boundary."""
    lo = min_pt_eigenvalue(rho)
    if abs(witness_value(w, rho)) <= tol or abs(lo) <= tol:
        return Verdict.BOUNDARY
    return Verdict.ENTANGLED if lo < -tol else Verdict.SEPARABLE
