"""Two-grid time indexing and the regime table mapping a model to its sharp
normalization rate, truncation cutoff and per-cell jump intensity.

The five regimes, keyed by the small-jump activity index alpha, symmetry and
the effective drift d = b - integral of x over |x| <= 1:

    C1  alpha < 1, d != 0          u = nm/(m-1)                 beta = (log n)^2 / n
    C2  alpha < 1, symmetric, b=0  u = [mn/((m-1)log n)]^(1/a)  beta = (log n / n)^(1/a)
    C3  alpha = 1, asymmetric      u = mn/((m-1)(log n)^2)      beta = log n / n
    C4  alpha = 1, symmetric       u = mn/((m-1)log n)          beta = log n / n
    C5  alpha > 1                  u = [mn/((m-1)log n)]^(1/a)  beta = log n / n^(1/(2a))
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .measure import LevyModel

CASES = ("C1", "C2", "C3", "C4", "C5")


class RegimeError(ValueError):
    """The (alpha, symmetry, drift) configuration falls outside the five
    supported regimes."""


@dataclass(frozen=True)
class GridSpec:
    """Coarse grid of n steps on [0, 1] and its m-fold refinement.

    Node times are kept as integer indices over the denominator n*m and
    converted to float only at use sites, so t_i^(m+1) == t_(i+1)^1 is an
    integer identity rather than a rounding accident.  m = 1 is the
    degenerate single-level grid (coarse == fine), accepted so the coupled
    schemes can be exercised against brute-force references.
    """

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.m < 1:
            raise ValueError("m must be a positive integer")

    @property
    def n_cells(self) -> int:
        return self.n * self.m

    @property
    def dt(self) -> float:
        return 1.0 / (self.n * self.m)

    def node_index(self, i: int, k: int) -> int:
        """Flat index of t_i^k, i in 1..n, k in 1..m+1."""
        if not (1 <= i <= self.n and 1 <= k <= self.m + 1):
            raise ValueError("grid indices out of range")
        return self.m * (i - 1) + (k - 1)

    def node_time(self, i: int, k: int) -> float:
        return self.node_index(i, k) / self.n_cells

    def node_fraction(self, i: int, k: int) -> Fraction:
        return Fraction(self.node_index(i, k), self.n_cells)

    def node_times(self) -> np.ndarray:
        """All fine-grid node times 0, 1/(nm), ..., 1."""
        return np.arange(self.n_cells + 1, dtype=float) / self.n_cells

    def eta_coarse(self, t: float) -> float:
        """Last coarse node at or before t."""
        return math.floor(self.n * t) / self.n

    def eta_fine(self, t: float) -> float:
        """Last fine node at or before t."""
        return math.floor(self.n_cells * t) / self.n_cells


@dataclass(frozen=True)
class CaseParams:
    """Regime identifier with its rate, cutoff and jump intensity for one
    (n, m) pair."""

    case_id: str
    alpha: float
    u_nm: float
    beta_n: float
    lambda_nm: float
    d_const: float
    theta_plus: float
    theta_minus: float

    @property
    def theta(self) -> float:
        return self.theta_plus + self.theta_minus

    @property
    def theta_prime(self) -> float:
        return self.theta_plus - self.theta_minus


def classify_case(model: LevyModel, alpha: float, symmetric: bool, b_zero: bool) -> str:
    """Regime of a model under its declared activity index, symmetry and
    zero-drift flags."""
    if not 0 < alpha < 2:
        raise RegimeError("alpha must lie in (0, 2)")
    if symmetric != model.symmetric:
        raise RegimeError("symmetry flag contradicts the model density")
    if b_zero != (model.drift_b == 0.0):
        raise RegimeError("zero-drift flag contradicts the model drift")
    if alpha > 1.0:
        return "C5"
    if alpha == 1.0:
        return "C4" if symmetric else "C3"
    d = model.d_zero()
    if d != 0.0 and abs(d) > 1e-14:
        return "C1"
    if symmetric and b_zero:
        return "C2"
    raise RegimeError(
        "alpha < 1 with d = 0 but asymmetric F (or b != 0) is outside the supported regimes"
    )


def rate_and_cutoff(case: str, n: int, m: int, alpha: float):
    """Sharp rate u_{n,m} and truncation cutoff beta_n for the regime.

    beta_n is clamped to 1 (with a warning) when the formula exceeds 1 at
    small n: the tail estimates behind the rates only hold for cutoffs in
    (0, 1], and such runs are pre-asymptotic anyway.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    if n < 3:
        raise ValueError("need n >= 3 so that log n > 1")
    if m < 2:
        raise ValueError("rate table requires a refinement factor m >= 2")
    ln = math.log(n)
    if case == "C1":
        u = n * m / (m - 1.0)
        beta = ln**2 / n
    elif case == "C2":
        u = (m * n / ((m - 1.0) * ln)) ** (1.0 / alpha)
        beta = (ln / n) ** (1.0 / alpha)
    elif case == "C3":
        u = m * n / ((m - 1.0) * ln**2)
        beta = ln / n
    elif case == "C4":
        u = m * n / ((m - 1.0) * ln)
        beta = ln / n
    else:
        u = (m * n / ((m - 1.0) * ln)) ** (1.0 / alpha)
        beta = ln / n ** (1.0 / (2.0 * alpha))
    if beta > 1.0:
        warnings.warn(
            f"cutoff formula gives beta_n = {beta:.4g} > 1 at n = {n}; clamping to 1",
            stacklevel=2,
        )
        beta = 1.0
    return u, beta


def make_case_params(model: LevyModel, case: str, n: int, m: int, alpha: float) -> CaseParams:
    """Assemble the full parameter set for one regime at one (n, m)."""
    u, beta = rate_and_cutoff(case, n, m, alpha)
    lam = model.theta(beta) / (n * m)
    theta_plus = theta_minus = 0.0
    if hasattr(model, "theta_plus_const"):
        theta_plus = model.theta_plus_const
        theta_minus = model.theta_minus_const
    else:
        # H2 constants estimated from the tails at the working cutoff
        theta_plus = beta**alpha * model.tail_plus(beta)
        theta_minus = beta**alpha * model.tail_minus(beta)
    d_const = model.d_zero() if alpha < 1.0 else float("nan")
    return CaseParams(
        case_id=case,
        alpha=alpha,
        u_nm=u,
        beta_n=beta,
        lambda_nm=lam,
        d_const=d_const,
        theta_plus=theta_plus,
        theta_minus=theta_minus,
    )
