"""Core numerical kernels: spectral norm, extreme Hermitian eigenvalue,
logarithmic norms, and the matrix exponential.

All operations accept real or complex matrices.  Norm computations use
shifted power iteration by default (only extreme eigenvalues are ever
needed); when the iteration stalls on a clustered spectrum it escalates
to a dense LAPACK solve, reported as method "direct-small".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NormReport",
    "spectral_norm",
    "lambda_max_hermitian",
    "log_norm_2",
    "log_norm_D",
    "log_norm_inf",
    "expm",
    "norm_expm",
]

#: Methods a NormReport may carry.
METHODS = ("power-iteration", "direct-small", "pade-expm")


@dataclass(frozen=True)
class NormReport:
    """Result of a norm or eigenvalue computation.

    ``converged`` implies ``residual`` is at or below the tolerance the
    computation was configured with.
    """

    value: float
    method: str
    iterations: int
    residual: float
    converged: bool


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    return A


def _gershgorin_lower(H: np.ndarray) -> float:
    """Lower bound on the spectrum of a Hermitian matrix from row discs."""
    d = np.real(np.diag(H))
    radius = np.sum(np.abs(H), axis=1) - np.abs(np.diag(H))
    return float(np.min(d - radius))


def _start_vector(n: int, complex_: bool, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    if complex_:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


class _StallDetector:
    """Flags power iterations whose residual decay cannot reach tolerance.

    Every ``window`` iterations the geometric decay rate is estimated; if the
    projected iterations to tolerance exceed the remaining budget the caller
    should switch to a direct solve instead of burning the full cap.
    """

    def __init__(self, window: int = 32, warmup: int = 96):
        self.window = window
        self.warmup = warmup
        self._last = None

    def stalled(self, it: int, resid: float, tol: float, max_iter: int) -> bool:
        if it < self.warmup or it % self.window:
            return False
        if self._last is None:
            self._last = resid
            return False
        prev, self._last = self._last, resid
        if prev <= 0.0:
            return False
        q = (resid / prev) ** (1.0 / self.window)
        if q >= 0.99999:
            return True
        needed = math.log(max(tol, 1e-300) / resid) / math.log(q)
        return needed > (max_iter - it)


def lambda_max_hermitian(
    H,
    tol: float = 1e-10,
    max_iter: int | None = None,
    escalate: bool = True,
    seed: int = 0,
) -> NormReport:
    """Largest eigenvalue of a Hermitian matrix.

    The input must satisfy ||H - H*||_max <= 1e-12 * ||H||_max.  The value is
    accurate to ``tol * max(1, ||H||_max)`` absolute.  A Gershgorin shift
    makes the target eigenvalue the one of largest modulus before power
    iteration; on stall the computation falls back to a dense eigensolve
    (``escalate=False`` disables the fallback and reports converged=False).
    """
    H = _as_matrix(H)
    n, nc = H.shape
    if n != nc:
        raise ValueError("matrix must be square")
    scale = float(np.abs(H).max())
    herm_err = float(np.abs(H - H.conj().T).max())
    if herm_err > 1e-12 * scale:
        raise ValueError(
            f"matrix is not Hermitian: asymmetry {herm_err:.3e} exceeds 1e-12 * {scale:.3e}"
        )
    Hs = 0.5 * (H + H.conj().T)
    tol_abs = tol * max(1.0, scale)
    if max_iter is None:
        max_iter = 50 * n

    if n == 1:
        return NormReport(float(np.real(Hs[0, 0])), "direct-small", 0, 0.0, True)
    if n == 2:
        a = float(np.real(Hs[0, 0]))
        d = float(np.real(Hs[1, 1]))
        b = abs(Hs[0, 1])
        lam = 0.5 * (a + d) + math.hypot(0.5 * (a - d), b)
        return NormReport(lam, "direct-small", 0, 0.0, True)

    if scale == 0.0:
        return NormReport(0.0, "power-iteration", 0, 0.0, True)

    shift = max(0.0, -_gershgorin_lower(Hs))
    M = Hs + shift * np.eye(n, dtype=Hs.dtype)
    if float(np.abs(M).max()) == 0.0:
        # H is exactly -shift * I
        return NormReport(-shift, "power-iteration", 0, 0.0, True)
    v = _start_vector(n, np.iscomplexobj(Hs), seed)
    detector = _StallDetector()
    rho = 0.0
    resid = np.inf
    it = 0
    while it < max_iter:
        it += 1
        w = M @ v
        rho = float(np.real(np.vdot(v, w)))
        resid = float(np.linalg.norm(w - rho * v))
        # rho > 0 rules out the fixed point at an exact null vector: the
        # shifted matrix is nonzero positive semidefinite, so its top
        # eigenvalue is positive
        if resid <= tol_abs and rho > 0.0:
            return NormReport(rho - shift, "power-iteration", it, resid, True)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # exact null vector of the shifted matrix: says nothing about
            # the top of the spectrum, so fall through to the direct solve
            break
        v = w / nw
        if escalate and detector.stalled(it, resid, tol_abs, max_iter):
            break
    if not escalate:
        return NormReport(rho - shift, "power-iteration", it, resid, False)

    evals, evecs = np.linalg.eigh(Hs)
    lam = float(evals[-1])
    u = evecs[:, -1]
    resid = float(np.linalg.norm(Hs @ u - lam * u))
    return NormReport(lam, "direct-small", it, resid, resid <= tol_abs)


def _sigma_max_power(
    X,
    v0: np.ndarray | None = None,
    tol: float = 1e-10,
    max_iter: int | None = None,
    escalate: bool = True,
    seed: int = 0,
):
    """Largest singular value of X by power iteration on X*X.

    Returns (report, right_singular_vector_or_None).  The iteration works
    with two matrix-vector products per step so X*X is never formed; the
    optional ``v0`` warm start makes repeated calls on nearby matrices cheap.
    """
    X = _as_matrix(X)
    nrows, ncols = X.shape
    if max_iter is None:
        max_iter = 50 * ncols
    if float(np.abs(X).max()) == 0.0:
        return NormReport(0.0, "power-iteration", 0, 0.0, True), None

    if v0 is not None and v0.shape == (ncols,):
        v = v0.astype(X.dtype, copy=True)
        nv = np.linalg.norm(v)
        v = v / nv if nv > 0 else _start_vector(ncols, np.iscomplexobj(X), seed)
    else:
        v = _start_vector(ncols, np.iscomplexobj(X), seed)

    Xh = X.conj().T
    detector = _StallDetector()
    lam = 0.0
    resid = np.inf
    it = 0
    while it < max_iter:
        it += 1
        z = X @ v
        lam = float(np.real(np.vdot(z, z)))  # Rayleigh quotient of X*X
        w = Xh @ z
        resid = float(np.linalg.norm(w - lam * v))
        # lam > 0 rules out the fixed point at an exact null vector of the
        # nonzero matrix X (a warm start may supply one)
        if resid <= tol * max(lam, 1e-300) and lam > 0.0:
            return NormReport(math.sqrt(lam), "power-iteration", it, resid, True), v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # v sits in the null space; restart cannot help a warm start,
            # so fall through to the direct solve
            break
        v = w / nw
        if escalate and detector.stalled(it, resid, tol * max(lam, 1e-300), max_iter):
            break
    if not escalate:
        return NormReport(math.sqrt(max(lam, 0.0)), "power-iteration", it, resid, False), v

    sigma = float(np.linalg.svd(X, compute_uv=False)[0])
    return NormReport(sigma, "direct-small", it, 0.0, True), None


def spectral_norm(
    A,
    tol: float = 1e-10,
    max_iter: int | None = None,
    escalate: bool = True,
    seed: int = 0,
) -> NormReport:
    """Largest singular value of A to relative tolerance ``tol``.

    Square or rectangular, real or complex input.  Computed as
    sqrt(lambda_max(A*A)) by power iteration with a direct SVD fallback.
    """
    report, _ = _sigma_max_power(A, None, tol, max_iter, escalate, seed)
    return report


def log_norm_2(
    A,
    tol: float = 1e-10,
    max_iter: int | None = None,
    escalate: bool = True,
) -> NormReport:
    """Logarithmic spectral norm: largest eigenvalue of the Hermitian part."""
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    return lambda_max_hermitian(0.5 * (A + A.conj().T), tol, max_iter, escalate)


def _diag_vector(D) -> np.ndarray:
    """Accept a diagonal given as a vector or as a full diagonal matrix."""
    D = np.asarray(D)
    if D.ndim == 1:
        return D
    if D.ndim == 2:
        if np.count_nonzero(D - np.diag(np.diag(D))):
            raise ValueError("scaling matrix has off-diagonal entries")
        return np.diag(D).copy()
    raise ValueError(f"expected a diagonal (vector or matrix), got shape {D.shape}")


def log_norm_D(
    A,
    D,
    tol: float = 1e-10,
    max_iter: int | None = None,
    escalate: bool = True,
) -> NormReport:
    """Logarithmic norm in the scaled inner product induced by diagonal D > 0.

    Equals the logarithmic spectral norm of D^{-1/2} A D^{1/2}.
    """
    A = _as_matrix(A)
    d = _diag_vector(D)
    if d.shape[0] != A.shape[0] or A.shape[0] != A.shape[1]:
        raise ValueError("dimension mismatch between matrix and scaling diagonal")
    if np.any(d <= 0):
        raise ValueError("scaling diagonal must be strictly positive")
    rt = np.sqrt(d)
    T = (A * rt[None, :]) / rt[:, None]
    return log_norm_2(T, tol, max_iter, escalate)


def log_norm_inf(A) -> float:
    """Logarithmic maximum norm: max_i (Re a_ii + sum_{j != i} |a_ij|)."""
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    diag = np.real(np.diag(A))
    offsum = np.sum(np.abs(A), axis=1) - np.abs(np.diag(A))
    return float(np.max(diag + offsum))


# Coefficients of the degree-13 diagonal Pade approximant to exp.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)


def expm(A, t: float = 1.0) -> np.ndarray:
    """Matrix exponential e^{tA} by scaling and squaring with Pade order 13.

    The squaring count is chosen so the scaled matrix has 1-norm at most 1.
    Raises OverflowError when the result grows beyond the representable
    range, identifying the size of the scaled problem.
    """
    A = _as_matrix(A)
    n, nc = A.shape
    if n != nc:
        raise ValueError("matrix must be square")
    if not (np.isfinite(t) and t >= 0):
        raise ValueError(f"t must be finite and nonnegative, got {t}")
    X = t * A.astype(np.complex128 if np.iscomplexobj(A) else np.float64)
    norm1 = float(np.abs(X).sum(axis=0).max())
    if norm1 == 0.0:
        return np.eye(n, dtype=X.dtype)
    squarings = 0 if norm1 <= 1.0 else int(math.ceil(math.log2(norm1)))
    Xs = X / (2.0**squarings)

    ident = np.eye(n, dtype=X.dtype)
    b = _PADE13
    X2 = Xs @ Xs
    X4 = X2 @ X2
    X6 = X4 @ X2
    U = Xs @ (X6 @ (b[13] * X6 + b[11] * X4 + b[9] * X2) + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * ident)
    V = X6 @ (b[12] * X6 + b[10] * X4 + b[8] * X2) + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * ident
    R = np.linalg.solve(V - U, V + U)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            R = R @ R
            if not np.all(np.isfinite(R)):
                raise OverflowError(
                    f"matrix exponential overflowed during squaring: ||tA||_1 = {norm1:.6g}"
                )
    if not np.all(np.isfinite(R)):
        raise OverflowError(f"matrix exponential overflowed: ||tA||_1 = {norm1:.6g}")
    return R


def norm_expm(A, t: float, D=None, tol: float = 1e-10) -> float:
    """Spectral norm (or D-scaled spectral norm) of e^{tA}.

    The diagonal similarity is applied to the computed exponential, not
    inside the exponential argument; the two agree in exact arithmetic and
    this choice reuses a single expm evaluation per t.
    """
    E = expm(A, t)
    if D is not None:
        d = _diag_vector(D)
        if np.any(d <= 0):
            raise ValueError("scaling diagonal must be strictly positive")
        rt = np.sqrt(d)
        E = (E * rt[None, :]) / rt[:, None]
    return spectral_norm(E, tol=tol).value
