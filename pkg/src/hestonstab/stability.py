"""Numerical verification of the stability bounds for the semi-discrete
Heston operators and of the contractivity certificate chain.

The chain runs: advection log-norm bounds; a block-Toeplitz symbol bound;
similarity reduction of the diffusion part to block form; a sequence of
sufficient symbol conditions on the unit circle that collapse to a single
tridiagonal family indexed by a real parameter y; and finally per-row
weighted inequalities that certify the family, split into the cases
|y| >= 1/2 (a quartic polynomial inequality) and |y| < 1/2 (diagonal
weights with closed-form row coefficients).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .grid import GridSpec, HestonParams, scaling_diagonal
from .linalg import (
    expm,
    lambda_max_hermitian,
    log_norm_2,
    log_norm_D,
    log_norm_inf,
    spectral_norm,
)
from .operators import OperatorSet, build_operators, forward_shift, transformed_operators

__all__ = [
    "BoundCheck",
    "CertificateRow",
    "DEFAULT_Y_SAMPLES",
    "check_advection_bounds",
    "check_exp_bound",
    "check_diffusion_contractivity",
    "symbol_matrix",
    "symbol_matrix_hat",
    "check_block_toeplitz_symbol_bound",
    "diffusion_block_reduction",
    "check_symbol_conditions",
    "certificate_case_large_y",
    "certificate_case_small_y",
    "quartic_value",
    "cubic_value",
    "format_certificate_report",
]

#: Default sample set for the real parameter of the tridiagonal family.
DEFAULT_Y_SAMPLES = (
    0.0,
    0.1,
    -0.1,
    0.25,
    -0.25,
    0.49,
    -0.49,
    0.5,
    -0.5,
    0.6,
    -0.6,
    1.0,
    -1.0,
    5.0,
    -5.0,
)

#: Default number of unit-circle samples (roots of unity).
DEFAULT_ZETA_SAMPLES = 64


@dataclass(frozen=True)
class BoundCheck:
    """One inequality check: does lhs <= rhs hold up to tol?"""

    name: str
    lhs: float
    rhs: float
    tol: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tol


@dataclass(frozen=True)
class CertificateRow:
    """Per-row data of the certificate for the tridiagonal family.

    nu is the grid coordinate ratio s_i / ds for row i; alpha, beta_mag and
    gamma_mag are the magnitudes of the row's tridiagonal entries (alpha is
    the real diagonal).  For the small-y case, eps is the diagonal weight
    ratio of the row (defined from row 2 on) and a, b are the row
    coefficients bounding the weighted row sum by a + b * 2y^2; a_bracket is
    the same coefficient evaluated from its defining bracket rather than the
    closed form.  theta = 4y^2 is populated in the large-y case.
    """

    i: int
    nu: float
    alpha: float
    beta_mag: float
    gamma_mag: float
    y: float
    eps: Optional[float] = None
    a: Optional[float] = None
    a_bracket: Optional[float] = None
    b: Optional[float] = None
    theta: Optional[float] = None
    zeta: Optional[complex] = None


def check_advection_bounds(ops: OperatorSet, params: HestonParams, tol: float = 1e-8):
    """Log-norm bounds for the two advection blocks.

    Returns checks mu2[adv_s] <= r/2 and mu2[adv_v] <= kappa/2.  The computed
    log norms are also compared against their sharp closed forms
    (r/2)cos(pi/(m1+1)) and (kappa/2)cos(pi/(m2+1)); disagreement beyond 1e-8
    raises, since those values are exact for these operators.
    """
    m1, m2 = ops.grid.m1, ops.grid.m2
    mu_s = log_norm_2(ops.adv_s).value
    mu_v = log_norm_2(ops.adv_v).value
    sharp_s = 0.5 * params.r * math.cos(math.pi / (m1 + 1))
    sharp_v = 0.5 * params.kappa * math.cos(math.pi / (m2 + 1))
    if abs(mu_s - sharp_s) > 1e-8 * max(1.0, params.r):
        raise ArithmeticError(
            f"price advection log norm {mu_s!r} deviates from sharp value {sharp_s!r}"
        )
    if abs(mu_v - sharp_v) > 1e-8 * max(1.0, params.kappa):
        raise ArithmeticError(
            f"variance advection log norm {mu_v!r} deviates from sharp value {sharp_v!r}"
        )
    return (
        BoundCheck("advection_s_log_norm", mu_s, 0.5 * params.r, tol),
        BoundCheck("advection_v_log_norm", mu_v, 0.5 * params.kappa, tol),
    )


def check_exp_bound(A, omega: float, K: float, t_samples: Sequence[float], tol: float = 1e-8):
    """Check ||e^{tA}||_2 <= K e^{t omega} at each sampled t >= 0."""
    checks = []
    for t in t_samples:
        if t < 0:
            raise ValueError(f"t samples must be nonnegative, got {t}")
        lhs = spectral_norm(expm(A, t)).value
        rhs = K * math.exp(t * omega)
        checks.append(BoundCheck(f"exp_bound[t={t:g}]", lhs, rhs, tol))
    return checks


def check_diffusion_contractivity(
    ops: OperatorSet,
    grid: GridSpec,
    t_samples: Sequence[float],
    tol: float = 1e-8,
):
    """Contractivity of the diffusion part in the scaled norm.

    Returns (log-norm check, per-t scaled-norm checks, per-t spectral-norm
    checks): mu_D[diffusion] <= 0 with tolerance tol * max-entry scale, then
    ||e^{t diffusion}||_D <= 1 and
    ||e^{t diffusion}||_2 <= sqrt(s_m1 v_m2 / (s_1 v_1)) at each t.
    """
    d = scaling_diagonal(grid)
    rt = np.sqrt(d)
    A = ops.diffusion
    scale = float(np.abs(A).max())
    mu_check = BoundCheck("diffusion_log_norm_D", log_norm_D(A, d).value, 0.0, tol * scale)

    ratio = math.sqrt(
        grid.s_points[-1] * grid.v_points[-1] / (grid.s_points[0] * grid.v_points[0])
    )
    scaled_checks = []
    spectral_checks = []
    for t in t_samples:
        if t < 0:
            raise ValueError(f"t samples must be nonnegative, got {t}")
        E = expm(A, t)
        normD = spectral_norm((E * rt[None, :]) / rt[:, None]).value
        norm2 = spectral_norm(E).value
        scaled_checks.append(BoundCheck(f"diffusion_normD[t={t:g}]", normD, 1.0, tol))
        spectral_checks.append(
            BoundCheck(f"diffusion_norm2[t={t:g}]", norm2, ratio, tol * max(1.0, ratio))
        )
    return mu_check, scaled_checks, spectral_checks


def _check_unit_modulus(zeta: complex) -> complex:
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise ValueError(f"zeta must have unit modulus, got |zeta| = {abs(zeta)!r}")
    return zeta


def symbol_matrix(B0, B1, zeta: complex) -> np.ndarray:
    """Symbol B0 + zeta B1 + zeta^{-1} B1^T of the block tridiagonal form."""
    zeta = _check_unit_modulus(zeta)
    B0 = np.asarray(B0, dtype=float)
    B1 = np.asarray(B1, dtype=float)
    if B0.shape != B1.shape or B0.shape[0] != B0.shape[1]:
        raise ValueError("B0 and B1 must be square matrices of equal dimension")
    return B0 + zeta * B1 + (1.0 / zeta) * B1.T


def symbol_matrix_hat(B0, B1, zeta: complex) -> np.ndarray:
    """One-sided companion symbol B0 + 2 zeta B1 (same Hermitian part)."""
    zeta = _check_unit_modulus(zeta)
    B0 = np.asarray(B0, dtype=float)
    B1 = np.asarray(B1, dtype=float)
    if B0.shape != B1.shape or B0.shape[0] != B0.shape[1]:
        raise ValueError("B0 and B1 must be square matrices of equal dimension")
    return B0 + 2.0 * zeta * B1


def check_block_toeplitz_symbol_bound(
    B0,
    B1,
    n_blocks: int,
    zeta_samples: int = DEFAULT_ZETA_SAMPLES,
    tol: float = 1e-9,
) -> BoundCheck:
    """Log-norm of a block tridiagonal Toeplitz matrix vs its symbol maximum.

    Assembles B = I (x) B0 + E (x) B1 + E^T (x) B1^T with n_blocks blocks and
    checks mu2[B] <= max_k mu2[B0 + 2 zeta_k B1] over the sampled roots of
    unity.  The check tolerance adds the sampling slack 2 ||B1||_2 times the
    maximal chord distance to a sample, since the sampled maximum can fall
    below the true maximum over the circle by at most that much.
    """
    if n_blocks < 2:
        raise ValueError(f"need at least 2 blocks, got {n_blocks}")
    if zeta_samples < 8:
        raise ValueError(f"need at least 8 unit-circle samples, got {zeta_samples}")
    B0 = np.asarray(B0, dtype=float)
    B1 = np.asarray(B1, dtype=float)
    E = forward_shift(n_blocks)
    ident = np.eye(n_blocks)
    B = np.kron(ident, B0) + np.kron(E, B1) + np.kron(E.T, B1.T)
    lhs = log_norm_2(B).value
    rhs = -np.inf
    for k in range(zeta_samples):
        zeta = cmath.exp(2j * math.pi * k / zeta_samples)
        rhs = max(rhs, log_norm_2(symbol_matrix_hat(B0, B1, zeta)).value)
    slack = 2.0 * spectral_norm(B1).value * 2.0 * math.sin(math.pi / (2 * zeta_samples))
    scale = max(1.0, float(np.abs(B0).max()), float(np.abs(B1).max()))
    return BoundCheck("block_toeplitz_symbol_bound", lhs, rhs, slack + tol * scale)


def diffusion_block_reduction(params: HestonParams, grid: GridSpec):
    """Similarity reduction of the diffusion part to block tridiagonal form.

    Returns (B, B0, B1) where B is the diffusion operator transformed by the
    diagonal similarity that removes the variance scaling and symmetrizes
    the price scaling, B0 = (1/2)(diff_sym - 2 sv^2 I) is the diagonal
    block, and B1 = (1/2)(rho sv adv_sym + sv^2 I) the off-diagonal block,
    with sv = sigma / dv.  The block assembly
    I (x) B0 + E (x) B1 + E^T (x) B1^T must reproduce B elementwise to
    roundoff; a mismatch raises, signalling an assembly bug.
    """
    t_ops = transformed_operators(grid)
    sv = params.sigma / grid.dv
    ident1 = np.eye(grid.m1)
    B0 = 0.5 * (t_ops.diff_sym - 2.0 * sv**2 * ident1)
    B1 = 0.5 * (params.rho * sv * t_ops.adv_sym + sv**2 * ident1)

    diffusion = build_operators(params, grid).diffusion
    rt_s = np.sqrt(grid.s_points)
    left = np.kron(1.0 / grid.v_points, 1.0 / rt_s)
    right = np.kron(np.ones(grid.m2), rt_s)
    B = diffusion * right[None, :] * left[:, None]

    E = forward_shift(grid.m2)
    blocks = np.kron(np.eye(grid.m2), B0) + np.kron(E, B1) + np.kron(E.T, B1.T)
    scale = max(1.0, float(np.abs(B).max()))
    mismatch = float(np.abs(B - blocks).max())
    if mismatch > 1e-10 * scale:
        raise ValueError(
            f"block assembly disagrees with similarity formula by {mismatch:.3e}"
        )
    return B, B0, B1


def _lambda_max_real_spectrum(T: np.ndarray, name: str) -> float:
    """Largest eigenvalue of a matrix whose spectrum is real.

    The certificate matrices are diagonally similar to Hermitian ones, so
    their eigenvalues are real up to roundoff; a significant imaginary part
    indicates the wrong matrix was passed.
    """
    evals = np.linalg.eigvals(T)
    scale = max(1.0, float(np.abs(evals).max()))
    if float(np.abs(evals.imag).max()) > 1e-8 * scale:
        raise ValueError(f"{name}: spectrum is not real; wrong matrix?")
    return float(evals.real.max())


def check_symbol_conditions(
    params: HestonParams,
    grid: GridSpec,
    zeta_samples: int = DEFAULT_ZETA_SAMPLES,
    y_samples: Sequence[float] = DEFAULT_Y_SAMPLES,
    tol: float = 1e-8,
):
    """Evaluate the chain of sufficient symbol conditions on one grid.

    For each sampled unit-modulus zeta two equivalent conditions are checked:
    the Hermitian form built from the symmetrized scaled operators
    (lambda_max <= 2 sv^2 (1 - Re zeta)) and its diagonal-similarity
    transform in terms of the 1-D convection/diffusion operators
    (lambda_max <= sv^2 (1 - Re zeta)).  Their margins must agree up to the
    factor 2 from the similarity; a violation raises.  For each sampled y the
    collapsed condition lambda_max[diff_1d + (1/2 + 2iy) adv_1d] <= 2 y^2 is
    checked.  Returns the full list of BoundChecks.
    """
    if zeta_samples < 8:
        raise ValueError(f"need at least 8 unit-circle samples, got {zeta_samples}")
    t_ops = transformed_operators(grid)
    sv = params.sigma / grid.dv
    sym_part = 0.5 * (t_ops.diff_sym + t_ops.diff_sym.T)
    conv_part = t_ops.diff_1d + 0.5 * t_ops.adv_1d
    scale = max(1.0, float(np.abs(t_ops.diff_sym).max()))

    checks = []
    for k in range(zeta_samples):
        zeta = cmath.exp(2j * math.pi * k / zeta_samples)
        im, re = zeta.imag, zeta.real
        herm = sym_part + 2j * im * params.rho * sv * t_ops.adv_sym
        lhs_a = lambda_max_hermitian(herm).value
        rhs_a = 2.0 * sv**2 * (1.0 - re)
        check_a = BoundCheck(f"scaled_symbol_cond[zeta={k}/{zeta_samples}]", lhs_a, rhs_a, tol * scale)

        T = conv_part + 1j * im * params.rho * sv * t_ops.adv_1d
        lhs_b = _lambda_max_real_spectrum(T, "convection-form symbol condition")
        rhs_b = sv**2 * (1.0 - re)
        check_b = BoundCheck(
            f"convection_symbol_cond[zeta={k}/{zeta_samples}]", lhs_b, rhs_b, tol * scale
        )
        if abs(check_a.margin - 2.0 * check_b.margin) > 1e-6 * scale:
            raise ArithmeticError(
                "similarity-equivalent symbol conditions disagree: "
                f"margins {check_a.margin!r} vs {check_b.margin!r}"
            )
        checks.extend((check_a, check_b))

    for y in y_samples:
        T = t_ops.diff_1d + (0.5 + 2j * y) * t_ops.adv_1d
        lhs = _lambda_max_real_spectrum(T, "tridiagonal family")
        checks.append(BoundCheck(f"tridiag_family_cond[y={y:g}]", lhs, 2.0 * y**2, tol * scale))
    return checks


def _family_entries(grid: GridSpec, y: float):
    """Row data (nu, alpha, |beta|, |gamma|) of the tridiagonal family.

    Row i has diagonal -nu_i^2, sub-diagonal (1/2) nu_i (nu_i - 1/2 - 2iy)
    and super-diagonal (1/2) nu_i (nu_i + 1/2 + 2iy); the first row has no
    sub-diagonal and the last row no super-diagonal.
    """
    nu = grid.s_points / grid.ds
    m1 = grid.m1
    alpha = -(nu**2)
    beta_mag = 0.5 * nu * np.hypot(nu - 0.5, 2.0 * y)
    gamma_mag = 0.5 * nu * np.hypot(nu + 0.5, 2.0 * y)
    beta_mag[0] = 0.0
    gamma_mag[m1 - 1] = 0.0
    return nu, alpha, beta_mag, gamma_mag


def quartic_value(nu: float, theta: float) -> float:
    """Quartic 4 th(th-1) nu^4 + th^2 (4 th - 1) nu^2 + th^4.

    Nonnegative for all nu whenever theta >= 1; equivalent to the unweighted
    row inequality of the tridiagonal family in the large-y case.
    """
    return 4.0 * theta * (theta - 1.0) * nu**4 + theta**2 * (4.0 * theta - 1.0) * nu**2 + theta**4


def cubic_value(nu: float) -> float:
    """Cubic nu^3 - (3/4) nu^2 - (3/2) nu - 9/16.

    Nonnegative for nu >= 2; equivalent to the weighted row condition
    2 a + b <= 1 in the small-y case.
    """
    return nu**3 - 0.75 * nu**2 - 1.5 * nu - 0.5625


def certificate_case_large_y(grid: GridSpec, y: float, tol: float = 1e-8):
    """Row certificate for the tridiagonal family when |y| >= 1/2.

    Each unweighted row sum alpha_i + |beta_i| + |gamma_i| is bounded by
    2 y^2; with theta = 4 y^2 >= 1 the generic row inequality is equivalent
    to quartic_value(nu_i, theta) >= 0, which holds identically.  Returns
    the per-row data and the overall check that the logarithmic maximum norm
    of the family matrix is at most 2 y^2.
    """
    if abs(y) < 0.5:
        raise ValueError(f"this certificate covers |y| >= 1/2, got y = {y}")
    nu, alpha, beta_mag, gamma_mag = _family_entries(grid, y)
    theta = 4.0 * y**2
    rows = [
        CertificateRow(
            i=i + 1,
            nu=float(nu[i]),
            alpha=float(alpha[i]),
            beta_mag=float(beta_mag[i]),
            gamma_mag=float(gamma_mag[i]),
            y=y,
            theta=theta,
        )
        for i in range(grid.m1)
    ]
    t_ops = transformed_operators(grid)
    family = t_ops.diff_1d + (0.5 + 2j * y) * t_ops.adv_1d
    check = BoundCheck("family_log_norm_inf[large_y]", log_norm_inf(family), 2.0 * y**2, tol)
    return rows, check


def _small_y_weights(nu_ld: np.ndarray):
    """Diagonal weight ratios eps_j = (nu_j - 1/2)(nu_j + 1/2) / nu_j^2.

    Indexed like the grid rows; eps[0] is unused (the weights enter only
    from the second row on).  Computed in extended precision because the
    bracket expressions below suffer heavy cancellation.
    """
    eps = (nu_ld - 0.5) * (nu_ld + 0.5) / nu_ld**2
    return eps


def certificate_case_small_y(grid: GridSpec, y: float, tol: float = 1e-8):
    """Row certificate for the tridiagonal family when |y| < 1/2.

    A diagonal similarity with weights whose consecutive ratios are eps_j
    turns the row sums into alpha_i + eps_i |beta_i| + |gamma_i| / eps_{i+1}.
    For interior rows this is bounded by a_i + b_i * 2 y^2 where a_i and
    b_i come from the estimate |x + 2iy| <= x + 2 y^2 / x; the weighted
    bound stays below 2 y^2 exactly when a_i <= 0 and 2 a_i + b_i <= 1,
    which for these weights reduces to cubic_value(nu_i) >= 0.  The closed
    form for a_i is cross-checked against its defining bracket to 1e-12
    (both evaluated in extended precision); a mismatch raises.  Boundary
    rows are handled with their one-sided expressions.  Returns the per-row
    data and the overall check that the weighted row maximum is at most
    2 y^2.
    """
    if abs(y) >= 0.5:
        raise ValueError(f"this certificate covers |y| < 1/2, got y = {y}")
    nu64, alpha, beta_mag, gamma_mag = _family_entries(grid, y)
    nu = nu64.astype(np.longdouble)
    eps = _small_y_weights(nu)
    m1 = grid.m1

    rows = []
    weighted = np.empty(m1)
    for i in range(m1):
        k = i + 1  # 1-based row index
        nui = nu[i]
        if k == 1:
            a_br = 0.5 * nui * (-2.0 * nui + (nui + 0.5) / eps[1])
            b = 0.5 * nui * (1.0 / (eps[1] * (nui + 0.5)))
            a = float(a_br)
            w = alpha[i] + gamma_mag[i] / float(eps[1])
            eps_i = None
        elif k == m1:
            a_br = 0.5 * nui * (-2.0 * nui + eps[i] * (nui - 0.5))
            b = 0.5 * nui * (eps[i] / (nui - 0.5))
            a = float(a_br)
            w = alpha[i] + float(eps[i]) * beta_mag[i]
            eps_i = float(eps[i])
        else:
            a_br = 0.5 * nui * (-2.0 * nui + eps[i] * (nui - 0.5) + (nui + 0.5) / eps[i + 1])
            b = 0.5 * nui * (eps[i] / (nui - 0.5) + 1.0 / (eps[i + 1] * (nui + 0.5)))
            a_closed = float(-(nui - 0.75) / (8.0 * nui * (nui + 1.5)))
            if abs(float(a_br) - a_closed) > 1e-12:
                raise ArithmeticError(
                    f"row {k}: weight coefficient closed form {a_closed!r} "
                    f"disagrees with bracket {float(a_br)!r}"
                )
            a = a_closed
            w = alpha[i] + float(eps[i]) * beta_mag[i] + gamma_mag[i] / float(eps[i + 1])
            eps_i = float(eps[i])
        weighted[i] = w
        rows.append(
            CertificateRow(
                i=k,
                nu=float(nu64[i]),
                alpha=float(alpha[i]),
                beta_mag=float(beta_mag[i]),
                gamma_mag=float(gamma_mag[i]),
                y=y,
                eps=eps_i,
                a=a,
                a_bracket=float(a_br),
                b=float(b),
            )
        )
    check = BoundCheck(
        "family_weighted_row_bound[small_y]", float(weighted.max()), 2.0 * y**2, tol
    )
    return rows, check


def format_certificate_report(rows: Sequence[CertificateRow], checks: Sequence[BoundCheck]) -> str:
    """Plain-text report: one line per certificate row, one per check."""
    lines = []
    for r in rows:
        parts = [
            f"row i={r.i}",
            f"nu={r.nu:.12g}",
            f"alpha={r.alpha:.12g}",
            f"beta_mag={r.beta_mag:.12g}",
            f"gamma_mag={r.gamma_mag:.12g}",
            f"y={r.y:g}",
        ]
        if r.eps is not None:
            parts.append(f"eps={r.eps:.12g}")
        if r.a is not None:
            parts.append(f"a={r.a:.12g}")
        if r.b is not None:
            parts.append(f"b={r.b:.12g}")
        if r.theta is not None:
            parts.append(f"theta={r.theta:g}")
        if r.zeta is not None:
            parts.append(f"zeta={r.zeta}")
        lines.append(" ".join(parts))
    for c in checks:
        lines.append(
            f"check name={c.name} lhs={c.lhs:.12g} rhs={c.rhs:.12g} "
            f"margin={c.margin:.12g} holds={str(c.holds).lower()}"
        )
    return "\n".join(lines) + "\n"
