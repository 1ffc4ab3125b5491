"""Finite-difference stencils and the Kronecker-assembled Heston operators.

The five PDE terms (price advection, variance advection, price diffusion,
mixed derivative, variance diffusion) map to five m x m matrices built as
Kronecker products of 1-D stencils with the grid scaling diagonals.  All
matrices are assembled through explicit Kronecker products so the product
formulas stay the single source of truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import GridSpec, HestonParams

__all__ = [
    "StencilSet",
    "OperatorSet",
    "TransformedOperators",
    "tridiag",
    "pair_average",
    "forward_shift",
    "build_stencils",
    "build_operators",
    "commutator_check",
    "transformed_operators",
    "dump_matrix",
]


def tridiag(n: int, lower: float, diag: float, upper: float) -> np.ndarray:
    """Dense n x n tridiagonal matrix with constant bands."""
    T = np.zeros((n, n))
    np.fill_diagonal(T, diag)
    idx = np.arange(n - 1)
    T[idx + 1, idx] = lower
    T[idx, idx + 1] = upper
    return T


def pair_average(n: int) -> np.ndarray:
    """Symmetric neighbor-average matrix tridiag(1/2, 0, 1/2).

    Its eigenvalues are cos(k*pi/(n+1)), k = 1..n, all inside [-1, 1].
    """
    return tridiag(n, 0.5, 0.0, 0.5)


def forward_shift(n: int) -> np.ndarray:
    """Forward shift matrix: ones on the first superdiagonal."""
    return np.eye(n, k=1)


@dataclass(frozen=True)
class StencilSet:
    """Central-difference stencil matrices for one grid.

    d1_s, d2_s are the m1 x m1 first/second-difference matrices in the price
    direction (scaled by 1/(2 ds) and 1/ds^2); d1_v, d2_v are their m2 x m2
    variance-direction analogues; shift_v is the m2 x m2 forward shift.
    """

    d1_s: np.ndarray
    d2_s: np.ndarray
    d1_v: np.ndarray
    d2_v: np.ndarray
    shift_v: np.ndarray


def build_stencils(grid: GridSpec) -> StencilSet:
    """Assemble the 1-D central difference stencils for ``grid``."""
    m1, m2 = grid.m1, grid.m2
    return StencilSet(
        d1_s=tridiag(m1, -1.0, 0.0, 1.0) / (2.0 * grid.ds),
        d2_s=tridiag(m1, 1.0, -2.0, 1.0) / grid.ds**2,
        d1_v=tridiag(m2, -1.0, 0.0, 1.0) / (2.0 * grid.dv),
        d2_v=tridiag(m2, 1.0, -2.0, 1.0) / grid.dv**2,
        shift_v=forward_shift(m2),
    )


@dataclass(frozen=True)
class OperatorSet:
    """The five semi-discrete Heston operator blocks and their sums.

    adv_s discretizes r*s*u_s, adv_v discretizes kappa*(eta - v)*u_v,
    diff_ss discretizes (1/2)*s^2*v*u_ss, mixed_sv discretizes
    rho*sigma*s*v*u_sv, diff_vv discretizes (1/2)*sigma^2*v*u_vv.
    ``full`` is their sum minus the r*I reaction term; ``diffusion`` is
    diff_ss + mixed_sv + diff_vv (the part covered by the contractivity
    result).
    """

    grid: GridSpec
    adv_s: np.ndarray
    adv_v: np.ndarray
    diff_ss: np.ndarray
    mixed_sv: np.ndarray
    diff_vv: np.ndarray
    full: np.ndarray
    diffusion: np.ndarray


def build_operators(params: HestonParams, grid: GridSpec) -> OperatorSet:
    """Assemble the m x m operator blocks for ``params`` on ``grid``."""
    st = build_stencils(grid)
    Ds = np.diag(grid.s_points)
    Dv = np.diag(grid.v_points)
    I1 = np.eye(grid.m1)
    I2 = np.eye(grid.m2)

    adv_s = params.r * np.kron(I2, Ds @ st.d1_s)
    adv_v = params.kappa * np.kron((params.eta * I2 - Dv) @ st.d1_v, I1)
    diff_ss = 0.5 * np.kron(Dv, Ds @ Ds @ st.d2_s)
    mixed_sv = params.rho * params.sigma * np.kron(Dv @ st.d1_v, Ds @ st.d1_s)
    diff_vv = 0.5 * params.sigma**2 * np.kron(Dv @ st.d2_v, I1)

    diffusion = diff_ss + mixed_sv + diff_vv
    full = adv_s + adv_v + diffusion - params.r * np.eye(grid.m)
    return OperatorSet(
        grid=grid,
        adv_s=adv_s,
        adv_v=adv_v,
        diff_ss=diff_ss,
        mixed_sv=mixed_sv,
        diff_vv=diff_vv,
        full=full,
        diffusion=diffusion,
    )


def commutator_check(grid: GridSpec) -> float:
    """Residual of the identity (1/2)(d2_s @ Ds - Ds @ d2_s) = d1_s.

    Returns the max-entry norm of the difference.  For any grid the residual
    stays below 1e-13 * max(1, 1/ds^2); it is exactly zero when the grid
    coordinates are small integers.
    """
    st = build_stencils(grid)
    Ds = np.diag(grid.s_points)
    resid = 0.5 * (st.d2_s @ Ds - Ds @ st.d2_s) - st.d1_s
    return float(np.abs(resid).max())


class TransformedOperators(NamedTuple):
    """Price-direction operators used by the contractivity analysis.

    adv_sym  = Ds^{1/2} d1_s Ds^{1/2}   (antisymmetric)
    diff_sym = Ds^{3/2} d2_s Ds^{1/2}
    adv_1d   = Ds d1_s                  (discrete s*u_s)
    diff_1d  = (1/2) Ds^2 d2_s          (discrete (1/2)*s^2*u_ss)
    """

    adv_sym: np.ndarray
    diff_sym: np.ndarray
    adv_1d: np.ndarray
    diff_1d: np.ndarray


def transformed_operators(grid: GridSpec) -> TransformedOperators:
    """Build the scaled 1-D operators and verify their exchange identities.

    Raises ValueError if the antisymmetry of adv_sym or the identity
    (1/2)(diff_sym + diff_sym^T) = Ds^{-1/2} (2 diff_1d + adv_1d) Ds^{1/2}
    fails beyond roundoff, which would signal an assembly bug.
    """
    st = build_stencils(grid)
    s = grid.s_points
    rt = np.sqrt(s)

    adv_sym = rt[:, None] * st.d1_s * rt[None, :]
    diff_sym = (s * rt)[:, None] * st.d2_s * rt[None, :]
    adv_1d = s[:, None] * st.d1_s
    diff_1d = 0.5 * (s * s)[:, None] * st.d2_s

    scale = max(1.0, float(np.abs(diff_sym).max()))
    if np.abs(adv_sym + adv_sym.T).max() > 1e-12 * scale:
        raise ValueError("scaled first-difference matrix is not antisymmetric")
    sym_part = 0.5 * (diff_sym + diff_sym.T)
    other = (1.0 / rt)[:, None] * (2.0 * diff_1d + adv_1d) * rt[None, :]
    if np.abs(sym_part - other).max() > 1e-11 * scale:
        raise ValueError("symmetric-part identity violated; assembly bug")
    return TransformedOperators(adv_sym, diff_sym, adv_1d, diff_1d)


def dump_matrix(M: np.ndarray, path) -> None:
    """Write a dense matrix as whitespace-separated text, one row per line.

    Entries carry 17 significant digits so float64 values round-trip.
    """
    M = np.atleast_2d(np.asarray(M))
    with open(path, "w") as fh:
        for row in M:
            fh.write(" ".join(f"{x:.17g}" for x in row))
            fh.write("\n")
