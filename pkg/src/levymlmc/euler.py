"""Coupled two-level Euler schemes and their error process.

Both levels consume the same simulated increments.  The fine scheme updates
at every fine node; the coarse scheme updates at coarse nodes and is
extended to the fine mesh by the interpolation rule

    X_coarse(node) = X_coarse(block start)
                     + f(X_coarse(block start)) * (Y(node) - Y(block start)),

so the two-level error U = X_coarse - X_fine lives on the fine mesh.  The
module also evaluates the pathwise diagnostic decomposition

    U(coarse node t) = sum over fine cells up to t of
                       [f(X_fine + U) - f(X_fine)] dY  -  Z(t),
    Z(t) = sum over fine cells of G(X_coarse(block start), Y - Y(block
           start)) dY,        G(x, y) = f(x + y f(x)) - f(x),

which holds exactly (up to roundoff) for every realization and is the
module's central correctness check.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .coeffs import Coefficient
from .paths import FineGridPath


@dataclass(frozen=True)
class CoupledEulerResult:
    """Both schemes, the error on the fine mesh and the diagnostic Z."""

    x_coarse: np.ndarray   # (n*m + 1,) coarse scheme at all fine nodes
    x_fine: np.ndarray     # (n*m + 1,) fine scheme at all fine nodes
    u_err: np.ndarray      # (n*m + 1,) coarse - fine
    z_diag: np.ndarray     # (n + 1,) diagnostic Z at coarse nodes
    u_nm: float            # sharp normalization rate
    u_terminal_normalized: float  # u_nm * U at t = 1


def euler_fine(coeff: Coefficient, path: FineGridPath, x0: float) -> np.ndarray:
    """Fine-level scheme at all fine nodes."""
    return _kernels.euler_path_batch(coeff, x0, path.y_incr[None, :])[0]


def euler_coarse_interp(coeff: Coefficient, path: FineGridPath, x0: float) -> np.ndarray:
    """Coarse-level scheme extended to the fine mesh by interpolation."""
    _, xc, _ = _kernels.coupled_nodes_batch(coeff, x0, path.y_incr[None, :], path.grid.m)
    return xc[0]


def compute_z_diag(coeff: Coefficient, path: FineGridPath, x_coarse: np.ndarray) -> np.ndarray:
    """Diagnostic Z at the coarse nodes, as an exact sum over fine cells of
    G(coarse value at block start, running in-block Y gap) times the cell
    increment."""
    n, m = path.grid.n, path.grid.m
    y = path.y_at_nodes
    dy = path.y_incr
    block_start_y = np.repeat(y[: n * m : m], m)
    block_start_x = np.repeat(x_coarse[: n * m : m], m)
    gap = y[: n * m] - block_start_y
    terms = coeff.g(block_start_x, gap) * dy
    z = np.zeros(n + 1)
    np.cumsum(terms.reshape(n, m).sum(axis=1), out=z[1:])
    return z


def multilevel_error(coeff: Coefficient, path: FineGridPath, x0: float) -> CoupledEulerResult:
    """Coupled schemes, two-level error and diagnostic Z on one path."""
    xf, xc, u = _kernels.coupled_nodes_batch(coeff, x0, path.y_incr[None, :], path.grid.m)
    xf, xc, u = xf[0], xc[0], u[0]
    z = compute_z_diag(coeff, path, xc)
    u_nm = path.case.u_nm
    return CoupledEulerResult(
        x_coarse=xc,
        x_fine=xf,
        u_err=u,
        z_diag=z,
        u_nm=u_nm,
        u_terminal_normalized=u_nm * u[-1],
    )


def decomposition_residual(
    coeff: Coefficient, path: FineGridPath, result: CoupledEulerResult
) -> float:
    """Max deviation of the pathwise decomposition identity over the coarse
    nodes, relative to the error's pathwise scale."""
    n, m = path.grid.n, path.grid.m
    dy = path.y_incr
    xf = result.x_fine[: n * m]
    u = result.u_err[: n * m]
    terms = (coeff.f(xf + u) - coeff.f(xf)) * dy
    lhs = result.u_err[:: m][: n + 1]
    rhs = np.zeros(n + 1)
    np.cumsum(terms.reshape(n, m).sum(axis=1), out=rhs[1:])
    rhs -= result.z_diag
    scale = max(float(np.max(np.abs(lhs))), 1e-300)
    return float(np.max(np.abs(lhs - rhs))) / scale


def gronwall_bound(coeff: Coefficient, path: FineGridPath, result: CoupledEulerResult) -> np.ndarray:
    """Pathwise bound on |U| at the fine nodes from the Lipschitz constant:

        |U(next)| <= |U|(1 + L |dY|) + L |f(coarse block value)| |in-block
                     Y gap| |dY|,

    which discretely dominates the error recursion."""
    n, m = path.grid.n, path.grid.m
    lip = coeff.lipschitz_const
    y = path.y_at_nodes
    dy = path.y_incr
    block_x = np.repeat(result.x_coarse[: n * m : m], m)
    gap = np.abs(y[: n * m] - np.repeat(y[: n * m : m], m))
    forcing = lip * np.abs(coeff.f(block_x)) * gap * np.abs(dy)
    growth = 1.0 + lip * np.abs(dy)
    bound = np.zeros(n * m + 1)
    for j in range(n * m):
        bound[j + 1] = bound[j] * growth[j] + forcing[j]
    return bound
