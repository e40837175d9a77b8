"""Dense complex-matrix kernel for 2x2 and 4x4 operators.

Matrices are plain ``numpy`` complex arrays. Products, adjoints and Kronecker
products are thin wrappers; the Hermitian eigensolver is a cyclic complex
Jacobi iteration so results are deterministic and independent of the LAPACK
build underneath numpy.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
MAX_SWEEPS = 60

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


class MatrixError(ValueError):
    """Raised for shape mismatches and invalid matrix inputs."""


class ConvergenceError(RuntimeError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise MatrixError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MatrixError("matrix has non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise MatrixError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``out[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def _jacobi_hermitian(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if off == 0.0 or np.sqrt(off) <= 1e-17 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                if g <= 1e-19 * (abs(app) + abs(aqq)):
                    # below rounding of the diagonal; rotation would be a no-op
                    a[p, q] = a[q, p] = 0.0
                    continue
                phase = apq / g
                theta = (aqq - app) / (2.0 * g)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # unitary acting on columns p, q: [[c, s*phase], [-s*conj(phase), c]]
                sp = s * phase
                sq = s * np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sq * col_q
                a[:, q] = sp * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sp * row_q
                a[q, :] = sq * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sq * vq
                v[:, q] = sp * vp + c * vq
    else:
        raise ConvergenceError(f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps")
    return np.real(np.diag(a)).copy(), v


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in descending order; ties keep their original index
        order.
    eigenvectors : ndarray
        Unitary matrix whose columns match ``eigenvalues``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise MatrixError(f"eigensolver needs a square matrix, got {a.shape}")
    err = hermiticity_error(a)
    if err > HERMITIAN_TOL:
        raise MatrixError(f"matrix is not Hermitian (max |A - A^H| = {err:.3e})")
    a = 0.5 * (a + a.conj().T)
    w, v = _jacobi_hermitian(a)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvals_hermitian(a) -> np.ndarray:
    return eig_hermitian(a)[0]


def clamp_psd_eigenvalues(w: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Zero eigenvalues in ``[-tol, 0)``; anything more negative is an error."""
    if w.size and w.min() < -tol:
        raise MatrixError(f"matrix is not positive semidefinite (eigenvalue {w.min():.3e})")
    return np.where(w < 0.0, 0.0, w)


def sqrt_psd(a) -> np.ndarray:
    """Hermitian PSD square root ``B`` with ``B @ B == a``."""
    w, v = eig_hermitian(a)
    w = clamp_psd_eigenvalues(w)
    b = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (b + b.conj().T)
