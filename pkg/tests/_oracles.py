"""Independent oracles for the test suite.

These deliberately avoid the library's own computational paths: eigenvalues
come from a cyclic Jacobi rotation solver, matrix exponentials from a
truncated Taylor series accumulated in extended precision, and norms in the
limit-definition checks from LAPACK's SVD.
"""

import math

import numpy as np


def jacobi_eigvals(H, tol: float = 1e-14, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Returns the spectrum in ascending order.
    """
    A = np.array(H, dtype=float, copy=True)
    n = A.shape[0]
    if np.abs(A - A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
        raise ValueError("oracle expects a symmetric matrix")
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * np.sum(np.tril(A, -1) ** 2))
        if off <= tol * max(1.0, float(np.abs(np.diag(A)).max())):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = A[p, p], A[q, q]
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
    return np.sort(np.diag(A))


def hermitian_lambda_max(H) -> float:
    """Largest eigenvalue of a (possibly complex) Hermitian matrix.

    Complex input is embedded into the real symmetric matrix
    [[Re H, -Im H], [Im H, Re H]], whose spectrum is that of H doubled.
    """
    H = np.asarray(H)
    if np.iscomplexobj(H):
        X, Y = H.real, H.imag
        He = np.block([[X, -Y], [Y, X]])
        return float(jacobi_eigvals(He)[-1])
    return float(jacobi_eigvals(H)[-1])


def sigma_max(A) -> float:
    """Largest singular value via the Jacobi eigensolver on A*A."""
    A = np.asarray(A)
    H = A.conj().T @ A
    lam = hermitian_lambda_max(H)
    return math.sqrt(max(lam, 0.0))


def taylor_expm(A, t: float = 1.0, terms: int = 60) -> np.ndarray:
    """Truncated Taylor series for e^{tA}, accumulated in extended precision."""
    A = np.asarray(A)
    complex_ = np.iscomplexobj(A)
    dtype = np.clongdouble if complex_ else np.longdouble
    X = A.astype(dtype) * dtype(t)
    n = A.shape[0]
    total = np.eye(n, dtype=dtype)
    term = np.eye(n, dtype=dtype)
    for k in range(1, terms + 1):
        term = term @ X / dtype(k)
        total = total + term
    return total.astype(np.complex128 if complex_ else np.float64)


def log_norm_limit(A, h: float = 1e-7) -> float:
    """Finite-difference value of the defining limit (||I + hA||_2 - 1)/h."""
    A = np.asarray(A)
    n = A.shape[0]
    return float((np.linalg.norm(np.eye(n) + h * A, 2) - 1.0) / h)


def pair_average_eigs(n: int) -> np.ndarray:
    """Closed-form spectrum cos(k pi/(n+1)), k = 1..n, of tridiag(1/2, 0, 1/2)."""
    return np.cos(np.arange(1, n + 1) * np.pi / (n + 1))


def unit_upper_shear_sigma_max(t: float) -> float:
    """Closed-form largest singular value of [[1, t], [0, 1]]."""
    return math.sqrt((2.0 + t * t + math.sqrt(4.0 * t * t + t**4)) / 2.0)
