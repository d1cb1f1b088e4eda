"""
Dense complex linear algebra for small density-operator calculations.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Tensor factors
are numbered left to right ``0..n-1``; ``partial_trace`` and friends use that
numbering for ``dims`` and ``keep``.

The Hermitian eigensolver is a cyclic complex Jacobi iteration. It is only
meant for the 2- to 64-dimensional matrices used in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class LinalgError(ValueError):
    """Raised when an operand has the wrong shape or structure."""


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix contains NaN or Inf entries")
    return a


def as_state(v, tol: float = NORM_TOL) -> np.ndarray:
    """Coerce ``v`` to a unit-norm complex vector."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(a)):
        raise LinalgError("state contains NaN or Inf amplitudes")
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > tol:
        raise LinalgError(f"state norm is {norm!r}, expected 1")
    return a


def projector(v) -> np.ndarray:
    """Return ``|v><v|``."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(a, a.conj())


def dagger(m) -> np.ndarray:
    return np.asarray(m).conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square matrices."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def _check_dims(dim: int, dims: Sequence[int]) -> list[int]:
    dims = [int(x) for x in dims]
    if not dims or any(x < 1 for x in dims):
        raise LinalgError(f"invalid subsystem dimensions {dims}")
    if prod(dims) != dim:
        raise LinalgError(
            f"subsystem dimensions {dims} multiply to {prod(dims)}, "
            f"but the matrix has dimension {dim}"
        )
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """
    Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Square matrix on the tensor product of spaces with dimensions ``dims``.
    dims : sequence of int
        Subsystem dimensions, left to right.
    keep : iterable of int
        Indices of subsystems to keep. The result is ordered by ascending
        index regardless of the order given here. An empty ``keep`` returns
        the 1x1 matrix holding the full trace.

    Returns
    -------
    numpy.ndarray
        The reduced matrix.

    Examples
    --------
    >>> bell = projector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    >>> np.allclose(partial_trace(bell, [2, 2], [0]), np.eye(2) / 2)
    True
    """
    a = as_matrix(m)
    dims = _check_dims(a.shape[0], dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise LinalgError(f"keep indices {keep} out of range for {n} subsystems")
    drop = [i for i in range(n) if i not in keep]

    t = a.reshape(dims + dims)
    # move kept row axes, kept column axes, then the traced pairs to the end
    order = keep + [n + k for k in keep] + drop + [n + k for k in drop]
    t = t.transpose(order)
    dk = prod(dims[k] for k in keep)
    dd = prod(dims[k] for k in drop)
    t = t.reshape(dk, dk, dd, dd)
    return np.trace(t, axis1=2, axis2=3)


def reduce_pure(v, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of the pure state ``v`` without forming ``|v><v|``."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    dims = _check_dims(a.shape[0], dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise LinalgError(f"keep indices {keep} out of range for {n} subsystems")
    drop = [i for i in range(n) if i not in keep]
    t = a.reshape(dims).transpose(keep + drop).reshape(prod(dims[k] for k in keep), -1)
    return t @ t.conj().T


def partial_transpose(m, dims: Sequence[int], sys: int) -> np.ndarray:
    """Transpose the tensor factor ``sys`` of ``m``."""
    a = as_matrix(m)
    dims = _check_dims(a.shape[0], dims)
    n = len(dims)
    if not 0 <= sys < n:
        raise LinalgError(f"subsystem {sys} out of range for {n} subsystems")
    axes = list(range(2 * n))
    axes[sys], axes[n + sys] = axes[n + sys], axes[sys]
    return a.reshape(dims + dims).transpose(axes).reshape(a.shape)


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eigh(
    m, tol: float = HERMITIAN_TOL, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the real Jacobi rotation that zeroes it.

    Returns
    -------
    values : numpy.ndarray
        Eigenvalues in ascending order (real).
    vectors : numpy.ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = as_matrix(m).copy()
    if not is_hermitian(a, tol):
        raise LinalgError("matrix is not Hermitian")
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    scale = max(float(np.max(np.abs(a), initial=0.0)), 1.0)
    threshold = 1e-15 * scale
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = 0.5 * np.arctan2(2 * mag, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                up = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = a[:, [p, q]] @ up
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = up.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[q, p] = 0.0
                a[p, q] = 0.0
                vc = v[:, [p, q]] @ up
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    else:
        raise LinalgError("Jacobi iteration did not converge")

    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def hermitian_eigenvalues(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    return hermitian_eigh(m, tol)[0]


def hermitian_function(m, func, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix by spectral synthesis."""
    values, vectors = hermitian_eigh(m, tol)
    return (vectors * func(values)) @ vectors.conj().T


def psd_sqrt(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Square root of a positive semidefinite matrix; tiny negative eigenvalues are clipped."""
    return hermitian_function(m, lambda x: np.sqrt(np.clip(x, 0.0, None)), tol)


@dataclass(frozen=True)
class DensityCheck:
    """Outcome of :func:`is_density_matrix`; truthy iff every test passed."""

    ok: bool
    hermitian: bool
    trace: complex
    min_eigenvalue: float | None
    problems: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok


def is_density_matrix(m, tol: float = HERMITIAN_TOL) -> DensityCheck:
    a = as_matrix(m)
    problems = []
    herm = is_hermitian(a, tol)
    tr = complex(np.trace(a))
    if not herm:
        problems.append("not Hermitian")
    if abs(tr - 1.0) > tol:
        problems.append(f"trace {tr:.6g} != 1")
    min_eig = None
    if herm:
        min_eig = float(hermitian_eigenvalues(a, tol)[0])
        if min_eig < -tol:
            problems.append(f"negative eigenvalue {min_eig:.3g}")
    return DensityCheck(not problems, herm, tr, min_eig, tuple(problems))


def require_density_matrix(m, dim: int | None = None, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(m)
    if dim is not None and a.shape[0] != dim:
        raise LinalgError(f"expected a {dim}x{dim} density matrix, got {a.shape}")
    check = is_density_matrix(a, tol)
    if not check:
        raise LinalgError("not a density matrix: " + "; ".join(check.problems))
    return a
