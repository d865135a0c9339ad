"""Diffusion-free SDE coefficients f for dX = f(X-) dY.

The catalogue mirrors what the experiments need: a constant (kills the
two-level error exactly), the identity (pathwise-exact algebraic identities),
and a C-infinity compactly supported bump (the well-behaved choice for the
asymptotic experiments).  All catalogue kinds carry the first three
derivatives; Custom carries whatever the caller provides.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# Kind codes shared with the compiled kernels.
KIND_CONSTANT = 0
KIND_LINEAR = 1
KIND_SMOOTH_BUMP = 2
KIND_CUSTOM = 3

_KIND_NAMES = {
    KIND_CONSTANT: "constant",
    KIND_LINEAR: "linear",
    KIND_SMOOTH_BUMP: "smooth_bump",
    KIND_CUSTOM: "custom",
}


@dataclass(frozen=True)
class Coefficient:
    """Evaluable coefficient with derivatives and a Lipschitz constant.

    ``params`` is the (p0, p1, p2) triple handed to the compiled kernels;
    only the catalogue kinds are kernel-eligible, Custom always runs on the
    numpy backend.
    """

    kind: int
    f: Callable[[np.ndarray], np.ndarray]
    fp: Callable[[np.ndarray], np.ndarray]
    fpp: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fppp: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lipschitz_const: float = 0.0
    params: tuple = field(default=(0.0, 0.0, 0.0))

    @property
    def kind_name(self) -> str:
        return _KIND_NAMES[self.kind]

    @property
    def kernel_eligible(self) -> bool:
        return self.kind != KIND_CUSTOM

    def g(self, x, y):
        """Interpolation gap G(x, y) = f(x + y f(x)) - f(x)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.f(x + y * self.f(x)) - self.f(x)

    def ffp(self, x):
        """Product f * f'."""
        return self.f(x) * self.fp(x)


def constant(c: float) -> Coefficient:
    return Coefficient(
        kind=KIND_CONSTANT,
        f=lambda x: np.full_like(np.asarray(x, dtype=float), c),
        fp=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        fpp=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        fppp=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lipschitz_const=0.0,
        params=(float(c), 0.0, 0.0),
    )


def linear() -> Coefficient:
    """f(x) = x.  Globally Lipschitz but not compactly supported; reserved
    for the pathwise-exact identities, not the asymptotic experiments."""
    return Coefficient(
        kind=KIND_LINEAR,
        f=lambda x: np.asarray(x, dtype=float) + 0.0,
        fp=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        fpp=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        fppp=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lipschitz_const=1.0,
        params=(0.0, 0.0, 0.0),
    )


def _bump_pieces(z):
    # phi(z) = exp(1 - 1/(1-z^2)) on |z|<1, 0 outside; returns phi and the
    # log-derivative factors g', g'', g''' of g(z) = 1 - 1/(1-z^2).
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1.0
    w = np.where(inside, 1.0 - z * z, 1.0)
    phi = np.where(inside, np.exp(1.0 - 1.0 / w), 0.0)
    g1 = np.where(inside, -2.0 * z / w**2, 0.0)
    g2 = np.where(inside, -2.0 * (1.0 + 3.0 * z * z) / w**3, 0.0)
    g3 = np.where(inside, -24.0 * z * (1.0 + z * z) / w**4, 0.0)
    return phi, g1, g2, g3


def smooth_bump(center: float, width: float, height: float) -> Coefficient:
    """Compactly supported C-infinity bump of the given height on
    (center - width, center + width), peaking at the center."""
    if width <= 0:
        raise ValueError("width must be positive")

    def f(x):
        z = (np.asarray(x, dtype=float) - center) / width
        phi, _, _, _ = _bump_pieces(z)
        return height * phi

    def fp(x):
        z = (np.asarray(x, dtype=float) - center) / width
        phi, g1, _, _ = _bump_pieces(z)
        return height * phi * g1 / width

    def fpp(x):
        z = (np.asarray(x, dtype=float) - center) / width
        phi, g1, g2, _ = _bump_pieces(z)
        return height * phi * (g2 + g1 * g1) / width**2

    def fppp(x):
        z = (np.asarray(x, dtype=float) - center) / width
        phi, g1, g2, g3 = _bump_pieces(z)
        return height * phi * (g3 + 3.0 * g1 * g2 + g1**3) / width**3

    # max |phi'(z)| over |z|<1, found once on a fine grid (phi' is smooth
    # and vanishes at the endpoints, so a grid max is accurate enough for a
    # Gronwall-style bound).
    zg = np.linspace(-0.999, 0.999, 20001)
    phi, g1, _, _ = _bump_pieces(zg)
    lip = abs(height) * float(np.max(np.abs(phi * g1))) / width

    return Coefficient(
        kind=KIND_SMOOTH_BUMP,
        f=f,
        fp=fp,
        fpp=fpp,
        fppp=fppp,
        lipschitz_const=lip,
        params=(float(center), float(width), float(height)),
    )


def custom(
    f: Callable,
    fp: Callable,
    fpp: Optional[Callable] = None,
    fppp: Optional[Callable] = None,
    lipschitz_const: float = 0.0,
) -> Coefficient:
    return Coefficient(
        kind=KIND_CUSTOM,
        f=f,
        fp=fp,
        fpp=fpp,
        fppp=fppp,
        lipschitz_const=lipschitz_const,
    )
