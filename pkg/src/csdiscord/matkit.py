"""Small dense complex matrix kernel (n <= 4).

Matrices are plain ``numpy`` complex128 arrays.  The eigensolver is a cyclic
complex Jacobi iteration, which is unconditionally stable and more than fast
enough at these sizes.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotHermitian

HERMITIAN_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-14


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


SIGMA0 = _frozen([[1, 0], [0, 1]])
SIGMA_X = _frozen([[0, 1], [1, 0]])
SIGMA_Y = _frozen([[0, -1j], [1j, 0]])
SIGMA_Z = _frozen([[1, 0], [0, -1]])
PAULI = (SIGMA0, SIGMA_X, SIGMA_Y, SIGMA_Z)
HADAMARD = _frozen(np.array([[1, 1], [1, -1]]) / np.sqrt(2.0))


class EigenDecomp(NamedTuple):
    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # orthonormal columns


def as_matrix(a, rows=None, cols=None) -> np.ndarray:
    """Coerce ``a`` to a finite complex128 matrix, optionally checking its shape."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if (rows is not None and m.shape[0] != rows) or (cols is not None and m.shape[1] != cols):
        raise ValueError(f"expected shape ({rows}, {cols}), got {m.shape}")
    if m.shape[0] > 4 or m.shape[1] > 4:
        raise ValueError("matkit only handles matrices up to 4x4")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices: block (i, j) of the result is a[i, j] * b."""
    a = as_matrix(a, 2, 2)
    b = as_matrix(b, 2, 2)
    out = np.empty((4, 4), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = a[i, j] * b
    return out


def hermiticity_residual(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def _off_norm(a):
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return np.sqrt(np.sum(np.abs(off) ** 2))


def hermitian_eigen(a, max_sweeps=JACOBI_MAX_SWEEPS, rel_tol=JACOBI_REL_TOL) -> EigenDecomp:
    """Eigendecomposition of a small Hermitian matrix by cyclic complex Jacobi sweeps.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real Givens rotation that zeroes it.  Iteration stops once the
    off-diagonal Frobenius norm drops below ``rel_tol`` times the total norm.

    Raises NotHermitian if ``a`` is not Hermitian to 1e-10 and NoConvergence
    if ``max_sweeps`` sweeps are not enough.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("hermitian_eigen needs a square matrix")
    if hermiticity_residual(a) > HERMITIAN_TOL:
        raise NotHermitian(f"matrix is not Hermitian (residual {hermiticity_residual(a):.3e})")

    w = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    threshold = rel_tol * np.linalg.norm(w)

    for _ in range(max_sweeps):
        if _off_norm(w) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = np.exp(1j * np.angle(apq))
                app = w[p, p].real
                aqq = w[q, q].real
                theta = 0.5 * np.arctan2(2.0 * r, aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(n, dtype=np.complex128)
                # phase removal diag(1, conj(phase)) followed by a real rotation
                rot[p, p] = c
                rot[p, q] = s
                rot[q, p] = -s * np.conj(phase)
                rot[q, q] = c * np.conj(phase)
                w = dagger(rot) @ w @ rot
                w[p, q] = w[q, p] = 0.0
                v = v @ rot
    else:
        if _off_norm(w) > threshold:
            raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    evals = np.real(np.diag(w)).copy()
    order = np.argsort(evals, kind="stable")
    return EigenDecomp(evals[order], v[:, order])


def herm_exp(a, s) -> np.ndarray:
    """Return exp(s * a) for Hermitian ``a`` via its eigendecomposition."""
    vals, vecs = hermitian_eigen(a)
    out = (vecs * np.exp(s * vals)) @ dagger(vecs)
    return 0.5 * (out + dagger(out))
