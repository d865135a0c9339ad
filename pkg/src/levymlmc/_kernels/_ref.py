"""Pure-numpy recursion kernels.

Reference implementation of the hot loops: plain Euler stepping, coupled
two-level stepping and the linear error recursion, all vectorized across a
batch of paths with an explicit loop over time cells.  The compiled backend
in ``_core`` implements the same contracts; this module is the fallback and
the semantics authority.
"""

import numpy as np


def euler_path_batch(coeff, x0, dy):
    """X_{j+1} = X_j + f(X_j) * dY_j for a (batch, cells) increment array.

    Returns X at all nodes, shape (batch, cells + 1).
    """
    dy = np.ascontiguousarray(dy, dtype=float)
    b, ncells = dy.shape
    x = np.empty((b, ncells + 1))
    x[:, 0] = x0
    for j in range(ncells):
        xj = x[:, j]
        x[:, j + 1] = xj + coeff.f(xj) * dy[:, j]
    return x


def coupled_nodes_batch(coeff, x0, dy, m):
    """Coupled coarse/fine Euler schemes on a shared increment array.

    The fine scheme updates at every cell; the coarse scheme updates at
    block boundaries (every m cells) and is filled in between by the
    interpolation rule  X(node) = X(block start) + f(X(block start)) *
    (Y(node) - Y(block start)).  Returns (x_fine, x_coarse, u) at all fine
    nodes, with u the coarse-minus-fine error.
    """
    dy = np.ascontiguousarray(dy, dtype=float)
    b, ncells = dy.shape
    if ncells % m != 0:
        raise ValueError("cell count must be a multiple of m")
    x_fine = np.empty((b, ncells + 1))
    x_coarse = np.empty((b, ncells + 1))
    x_fine[:, 0] = x0
    x_coarse[:, 0] = x0
    fc = None
    for j in range(ncells):
        if j % m == 0:
            fc = coeff.f(x_coarse[:, j])
        xf = x_fine[:, j]
        x_fine[:, j + 1] = xf + coeff.f(xf) * dy[:, j]
        # in-block accumulation of fc * dy telescopes to the interpolation
        # rule and makes the constant-coefficient null error exact
        x_coarse[:, j + 1] = x_coarse[:, j] + fc * dy[:, j]
    return x_fine, x_coarse, x_coarse - x_fine


def coupled_terminal_batch(coeff, x0, dy, m):
    """Terminal values only of the coupled schemes: (x_fine_1, x_coarse_1,
    u_1), each shape (batch,)."""
    dy = np.ascontiguousarray(dy, dtype=float)
    b, ncells = dy.shape
    if ncells % m != 0:
        raise ValueError("cell count must be a multiple of m")
    xf = np.full(b, float(x0))
    xc = np.full(b, float(x0))
    fc = None
    for j in range(ncells):
        if j % m == 0:
            fc = coeff.f(xc)
        xf = xf + coeff.f(xf) * dy[:, j]
        xc = xc + fc * dy[:, j]
    return xf, xc, xc - xf


def linear_error_recursion(a, b):
    """U_{j+1} = U_j + a_j * U_j + b_j with U_0 = 0.

    Solves the discretized linear error equation dU = f'(X) U dY - dZ with
    a = f'(X) dY and b = -dZ.  Returns U at all nodes, (batch, cells + 1).
    """
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("coefficient arrays must have equal shapes")
    nbatch, ncells = a.shape
    u = np.empty((nbatch, ncells + 1))
    u[:, 0] = 0.0
    for j in range(ncells):
        uj = u[:, j]
        u[:, j + 1] = uj + a[:, j] * uj + b[:, j]
    return u
