"""Small dense complex linear algebra for one- and two-qubit operators.

Matrices are plain ``numpy`` complex arrays. Two-qubit operators always use
the ordering ``kron(op_A, op_B)``: subsystem A is the high-order factor.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
NEGATIVE_EIG_TOL = 1e-10

SUBSYSTEMS = ("A", "B")


class NotHermitianError(ValueError):
    """Raised when a matrix that must be Hermitian is not, within tolerance."""


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a 2-D complex array (accepts anything with ``__array__``)."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry ``[i*b.rows + k, j*b.cols + l] = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def hermiticity_residual(m) -> float:
    """Largest ``|m[i, j] - conj(m[j, i])|``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix is not square: {m.shape}")
    return float(np.max(np.abs(m - m.conj().T)))


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduce a 4x4 two-qubit operator to the qubit named by ``keep``.

    Parameters
    ----------
    rho : array_like
        4x4 operator on A (x) B, with A the high-order factor.
    keep : {"A", "B"}
        Subsystem to keep; the other one is traced out.

    Returns
    -------
    numpy.ndarray
        The 2x2 reduced operator.
    """
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"partial_trace needs a 4x4 matrix, got {rho.shape}")
    t = rho.reshape(2, 2, 2, 2)  # indices: a, b, a', b'
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"unknown subsystem {keep!r}; expected 'A' or 'B'")


def hermitian_eigenvalues(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in descending order.

    Raises
    ------
    NotHermitianError
        If ``m`` deviates from its adjoint by more than ``tol`` in any entry.
    """
    m = as_matrix(m)
    resid = hermiticity_residual(m)
    if resid > tol:
        raise NotHermitianError(f"matrix is not Hermitian (residual {resid:.3e} > {tol:.1e})")
    # symmetrize so LAPACK sees an exactly Hermitian input
    h = 0.5 * (m + m.conj().T)
    return np.linalg.eigvalsh(h)[::-1].copy()


def entropy_from_eigenvalues(evals, tol: float = NEGATIVE_EIG_TOL) -> float:
    """Shannon entropy in bits of a spectrum, with ``0 log 0 = 0``."""
    evals = np.asarray(evals, dtype=float)
    if evals.size and evals.min() < -tol:
        raise ValueError(f"eigenvalue {evals.min():.3e} is negative beyond tolerance {tol:.1e}")
    p = np.clip(evals, 0.0, 1.0)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy ``-Tr rho log2 rho`` in bits."""
    return entropy_from_eigenvalues(hermitian_eigenvalues(rho))
