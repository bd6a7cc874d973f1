"""Small dense complex linear algebra.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``; the helpers
here only add validation and the handful of kernels the solvers need.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import NoConvergence, NotHermitian, Singular, SpecError

CMatrix = NDArray[np.complex128]

DEFAULT_HERMITIAN_TOL = 1e-12
MAX_EIGEN_DIM = 64
MAX_SWEEPS = 100


def as_cmatrix(a: ArrayLike) -> CMatrix:
    """Coerce *a* to a finite 2-D complex array (scalars and vectors are promoted)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise SpecError(f"expected a matrix, got array of shape {m.shape}")
    if m.size == 0:
        raise SpecError("empty matrix")
    if not np.all(np.isfinite(m)):
        raise SpecError("matrix contains NaN or Inf entries")
    return m


def max_norm(a: ArrayLike) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _fix_phase(row: NDArray[np.complex128]) -> NDArray[np.complex128]:
    mags = np.abs(row)
    # first entry within roundoff of the maximum wins ties, e.g. (1, -1)/sqrt(2)
    k = int(np.flatnonzero(mags >= mags.max() * (1.0 - 1e-9))[0])
    return row * (np.conj(row[k]) / mags[k])


def hermitian_eigen(
    h: ArrayLike, tol: float = DEFAULT_HERMITIAN_TOL
) -> tuple[NDArray[np.float64], CMatrix]:
    """Diagonalize a Hermitian matrix with the cyclic Jacobi method.

    Parameters
    ----------
    h:
        Square Hermitian matrix, at most 64 x 64.
    tol:
        Absolute tolerance on ``max|H - H^dagger|``.

    Returns
    -------
    eigenvalues, U
        Ascending eigenvalues and a unitary ``U`` with ``U @ H @ U^dagger``
        diagonal. Row ``i`` of ``U`` holds the i-th normal mode expressed in
        the original basis (``A_i = sum_n U[i, n] a_n``), rephased so its
        largest-magnitude entry is real and positive.
    """
    a = as_cmatrix(h)
    n = a.shape[0]
    if a.shape[1] != n:
        raise SpecError(f"hermitian_eigen needs a square matrix, got {a.shape}")
    if n > MAX_EIGEN_DIM:
        raise SpecError(f"matrix dimension {n} exceeds {MAX_EIGEN_DIM}")
    if max_norm(a - a.conj().T) > tol:
        raise NotHermitian(f"max asymmetry {max_norm(a - a.conj().T):.3e} > tol {tol:.1e}")

    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    target = 1e-15 * scale

    for _ in range(MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(tau) + np.sqrt(1.0 + tau * tau))
                if tau < 0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    u = v[:, order].conj().T
    u = np.array([_fix_phase(row) for row in u])
    return w[order], u


def lu_solve(a: ArrayLike, b: ArrayLike) -> CMatrix:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    ``b`` may be a vector or an ``n x k`` block; the result has the shape of
    ``b`` as given. Raises ``Singular`` when a pivot drops below
    ``1e-14 * max|A|``.
    """
    a = as_cmatrix(a).copy()
    b_in = np.asarray(b)
    rhs = as_cmatrix(b).copy()
    n = a.shape[0]
    if a.shape[1] != n:
        raise SpecError(f"lu_solve needs a square matrix, got {a.shape}")
    if rhs.shape[0] != n:
        raise SpecError(f"rhs has {rhs.shape[0]} rows, matrix has {n}")

    floor = 1e-14 * max_norm(a)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) <= floor:
            raise Singular(f"pivot {abs(a[piv, k]):.3e} at column {k} below {floor:.3e}")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            rhs[[k, piv]] = rhs[[piv, k]]
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(factors, a[k, k:])
        rhs[k + 1 :] -= np.outer(factors, rhs[k])

    x = np.zeros_like(rhs)
    for k in range(n - 1, -1, -1):
        x[k] = (rhs[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x.reshape(b_in.shape) if b_in.ndim == 1 else x


def kron(a: ArrayLike, b: ArrayLike) -> CMatrix:
    """Kronecker product, ``(A (x) B)[i*p + k, j*q + l] = A[i, j] * B[k, l]``."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))
