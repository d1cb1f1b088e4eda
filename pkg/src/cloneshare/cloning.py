"""
Symmetric cloning of both halves of a Schmidt-form state.

Global state layout
-------------------
After cloning, the six tensor factors are ordered ``(1, 3, 2, 4, x1, x2)``:
original and clone of wing one, original and clone of wing two, then the two
machine ancillas. ``POSITION`` maps a qubit label to its tensor index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .linalg import NORM_TOL, partial_trace, projector, reduce_pure
from .states import SchmidtSpectrum, schmidt_state

POSITION = {1: 0, 3: 1, 2: 2, 4: 3}
ANCILLA_POSITIONS = (4, 5)
MAX_ORACLE_K = 3


class NamedPair(enum.Enum):
    LOCAL_13 = (1, 3)
    LOCAL_24 = (2, 4)
    NONLOCAL_14 = (1, 4)
    NONLOCAL_23 = (2, 3)

    @property
    def is_local(self) -> bool:
        return self in (NamedPair.LOCAL_13, NamedPair.LOCAL_24)

    @property
    def positions(self) -> tuple[int, int]:
        a, b = self.value
        return POSITION[a], POSITION[b]

    @classmethod
    def parse(cls, pair) -> NamedPair:
        if isinstance(pair, cls):
            return pair
        key = tuple(int(x) for x in pair)
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown qubit pair {pair!r}; expected one of (1,3),(2,4),(1,4),(2,3)")


@dataclass(frozen=True)
class CloningParams:
    """Cloning amplitudes ``c``, ``d`` for a ``k``-level system.

    Unitarity requires ``c**2 + 2*(k-1)*d**2 == 1``.
    """

    c: float
    d: float
    k: int = 2

    def __post_init__(self):
        c, d, k = float(self.c), float(self.d), self.k
        if isinstance(k, bool) or int(k) != k or k < 2:
            raise ValueError(f"k must be an integer >= 2, got {k!r}")
        if not (np.isfinite(c) and np.isfinite(d)):
            raise ValueError("cloning parameters must be finite")
        if c <= 0 or c > 1:
            raise ValueError(f"c must lie in (0, 1], got {c!r}")
        if d < 0:
            raise ValueError(f"d must be non-negative, got {d!r}")
        norm = c * c + 2 * (k - 1) * d * d
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"c^2 + 2(k-1)d^2 = {norm!r}, expected 1")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "k", int(k))

    @classmethod
    def from_c(cls, c: float, k: int = 2) -> CloningParams:
        d2 = (1.0 - c * c) / (2 * (k - 1))
        return cls(c, np.sqrt(max(d2, 0.0)), k)

    @classmethod
    def from_c_squared(cls, c2: float, k: int = 2) -> CloningParams:
        return cls(np.sqrt(c2), np.sqrt((1.0 - c2) / (2 * (k - 1))), k)

    @classmethod
    def universal(cls) -> CloningParams:
        """Qubit UQCM: ``c**2 = 2/3``, ``d**2 = 1/6``."""
        return cls(np.sqrt(2.0 / 3.0), np.sqrt(1.0 / 6.0), 2)

    @classmethod
    def wootters_zurek(cls, k: int = 2) -> CloningParams:
        return cls(1.0, 0.0, k)


@dataclass(frozen=True)
class CoefficientSet:
    P: float
    Q: float
    R: float
    S: float


def coefficient_set(p: CloningParams) -> CoefficientSet:
    """
    Coefficients of the non-local reduced state.

    ``Q`` is written as the square of the single-wing coherence factor
    ``2cd + (k-2)d**2``. Expanded, that is ``d**2 (4c**2 + 4cd(k-2) + (k-2)**2 d**2)``,
    which matches the ``(k-2) d**2`` form quoted in the literature for
    ``k <= 3`` only; the brute-force reduction agrees with the squared form
    for every ``k``.
    """
    c, d, k = p.c, p.d, p.k
    base = c * c + (k - 1) * d * d
    return CoefficientSet(
        P=base**2,
        Q=(2 * c * d + (k - 2) * d * d) ** 2,
        R=d * d * base,
        S=d**4,
    )


def printed_q(p: CloningParams) -> float:
    """The ``Q`` coefficient in its literature form ``d^2(4c^2 + 4cd(k-2) + (k-2)d^2)``."""
    c, d, k = p.c, p.d, p.k
    return d * d * (4 * c * c + 4 * c * d * (k - 2) + (k - 2) * d * d)


def clone_isometry(p: CloningParams) -> np.ndarray:
    """
    The ``k -> k**3`` isometry of one cloning machine.

    Output index order is (original, clone, ancilla); the ancilla states
    ``|X_j>`` are the computational basis of a ``k``-level space.
    """
    k = p.k
    v = np.zeros((k, k, k, k), dtype=complex)  # [orig, clone, anc, input]
    for i in range(k):
        v[i, i, i, i] = p.c
        for j in range(k):
            if j != i:
                v[i, j, j, i] += p.d
                v[j, i, j, i] += p.d
    return v.reshape(k**3, k)


def clone_both(psi, p: CloningParams) -> np.ndarray:
    """
    Clone both halves of a ``k x k`` bipartite vector.

    Returns the ``k**6`` vector in the ``(1, 3, 2, 4, x1, x2)`` layout.
    """
    k = p.k
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != k * k:
        raise ValueError(f"input state has dimension {psi.shape[0]}, expected {k * k} for k={k}")
    v = clone_isometry(p)
    out = np.kron(v, v) @ psi
    # kron order is (1, 3, x1, 2, 4, x2)
    return out.reshape([k] * 6).transpose(0, 1, 3, 4, 2, 5).reshape(-1)


def global_output_state(s: SchmidtSpectrum, p: CloningParams) -> np.ndarray:
    if s.k != p.k:
        raise ValueError(f"spectrum has k={s.k} but cloning parameters have k={p.k}")
    return clone_both(schmidt_state(s), p)


def local_state(s: SchmidtSpectrum, p: CloningParams) -> np.ndarray:
    k = s.k
    rho = np.zeros((k * k, k * k), dtype=complex)
    for i, lam in enumerate(s.lambdas):
        rho[i * k + i, i * k + i] += p.c**2 * lam
        for j in range(k):
            if j == i:
                continue
            sym = np.zeros(k * k)
            sym[i * k + j] = 1.0
            sym[j * k + i] = 1.0
            rho += p.d**2 * lam * np.outer(sym, sym)
    return rho


def nonlocal_state(
    s: SchmidtSpectrum, p: CloningParams, coefficients: CoefficientSet | None = None
) -> np.ndarray:
    k = s.k
    cs = coefficients or coefficient_set(p)
    lam = np.asarray(s.lambdas)
    rho = np.zeros((k * k, k * k), dtype=complex)
    for i in range(k):
        ii = i * k + i
        rho[ii, ii] += cs.P * lam[i]
        for j in range(k):
            if j == i:
                continue
            rho[ii, j * k + j] += cs.Q * np.sqrt(lam[i] * lam[j])
            rho[i * k + j, i * k + j] += cs.R * lam[i]
            rho[j * k + i, j * k + i] += cs.R * lam[i]
            # S term: every |j,l> with both j, l != i
            for m in range(k):
                if m != i:
                    rho[j * k + m, j * k + m] += cs.S * lam[i]
    return rho


def reduced_state(
    s: SchmidtSpectrum,
    p: CloningParams,
    pair,
    coefficients: CoefficientSet | None = None,
) -> np.ndarray:
    """Closed-form two-party state for one of the four named qubit pairs."""
    if s.k != p.k:
        raise ValueError(f"spectrum has k={s.k} but cloning parameters have k={p.k}")
    pair = NamedPair.parse(pair)
    if pair.is_local:
        return local_state(s, p)
    return nonlocal_state(s, p, coefficients)


def brute_force_reduced(psi_out, k: int, pair) -> np.ndarray:
    """Trace the ancillas and the complementary qubits out of a global output vector."""
    pair = NamedPair.parse(pair)
    rho = projector(psi_out)
    return partial_trace(rho, [k] * 6, pair.positions)


@dataclass(frozen=True)
class OracleCheck:
    passed: bool
    max_residual: float

    def __bool__(self) -> bool:
        return self.passed


def verify_reduced_against_global(
    s: SchmidtSpectrum,
    p: CloningParams,
    pair,
    tol: float = 1e-10,
    coefficients: CoefficientSet | None = None,
) -> OracleCheck:
    """Compare the closed form against the ancilla-traced global state (k <= 3)."""
    if p.k > MAX_ORACLE_K:
        raise ValueError(f"brute-force oracle supports k <= {MAX_ORACLE_K}, got k={p.k}")
    expected = brute_force_reduced(global_output_state(s, p), p.k, pair)
    got = reduced_state(s, p, pair, coefficients)
    residual = float(np.max(np.abs(expected - got)))
    return OracleCheck(residual <= tol, residual)


def reduced_from_pure(psi_out, k: int, pair) -> np.ndarray:
    """Same as :func:`brute_force_reduced` without forming the global projector."""
    return reduce_pure(psi_out, [k] * 6, NamedPair.parse(pair).positions)


def perturbed(cs: CoefficientSet, field_name: str = "Q", delta: float = 1e-3) -> CoefficientSet:
    return replace(cs, **{field_name: getattr(cs, field_name) + delta})
