"""Pure-jump Levy measures and their truncated moment functionals.

A model is a triplet (b, 0, F) with an evaluable jump density, a jump bound
p (density forced to zero beyond |x| > p) and closed-form or quadrature
implementations of the tail masses and truncated moments that drive every
rate constant in the two-level error analysis:

    theta+/-(beta)   mass of F beyond +-beta
    c(beta)          second moment of the small jumps |x| <= beta
    d+/-(beta)       first absolute moments of the big jumps
    rho+/-(beta)     alpha-moments of the big jumps
    d(beta)          effective drift b' - d'(beta) of the compensated
                     small-jump + drift part

Stable-like models are calibrated so beta^alpha * theta+/-(beta) equals the
theta+/- constants exactly, which turns every asymptotic ratio into a closed
form usable as a test oracle.  General densities go through adaptive
Gauss-Kronrod quadrature on a log axis (the integrands have an
|x|^(-1-alpha) blow-up at the origin).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
_TABLE_KNOTS = 4096


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _quad(fn, lo, hi, points=None):
    if hi <= lo:
        return 0.0
    kwargs = {"epsabs": QUAD_EPSABS, "epsrel": QUAD_EPSREL, "limit": 200}
    if points is not None and np.isfinite(hi):
        kwargs["points"] = [p for p in points if lo < p < hi]
    val, err = integrate.quad(fn, lo, hi, **kwargs)
    if not np.isfinite(val) or err > max(QUAD_EPSABS * 10, 1e-6 * abs(val) + 1e-12):
        raise QuadratureError(
            f"quadrature on ({lo}, {hi}) achieved error {err:.3e} for value {val:.6e}"
        )
    return val


def _log_quad(weighted_density, lo, hi):
    """Integrate ``weighted_density(x)`` over (lo, hi] on a log axis.

    ``lo`` may be 0 (mapped to -inf) and ``hi`` may be inf; the substitution
    x = e^u removes power singularities at the origin.
    """
    if hi <= lo:
        return 0.0
    a = -np.inf if lo == 0.0 else math.log(lo)
    b = np.inf if np.isinf(hi) else math.log(hi)

    def g(u):
        # Near the ends of the log axis the separate factors of a convergent
        # weighted moment overflow/underflow even though their product is
        # far below double precision; repair those points to zero.
        # (Divergent weight/density combinations are rejected upstream.)
        if abs(u) > 600.0:
            return 0.0
        x = math.exp(u)
        val = float(weighted_density(x)) * x
        return val if math.isfinite(val) else 0.0

    return _quad(g, a, b)


class LevyModel:
    """Base pure-jump model; subclasses fix the density and may override the
    quadrature-backed moments with closed forms."""

    def __init__(self, drift_b: float = 0.0, jump_bound_p: float = 1.0):
        if jump_bound_p <= 0:
            raise ValueError("jump bound p must be positive")
        self.drift_b = float(drift_b)
        self.jump_bound_p = float(jump_bound_p)
        self._tables = {}

    # -- density ----------------------------------------------------------
    def density(self, x):
        raise NotImplementedError

    def _density_pos(self, x):
        return self.density(x)

    def _density_neg(self, x):
        # density at -x for x > 0
        return self.density(-x)

    @property
    def symmetric(self) -> bool:
        xs = np.geomspace(1e-6, self.jump_bound_p if np.isfinite(self.jump_bound_p) else 1e3, 64)
        return bool(np.allclose(self.density(xs), self.density(-xs), rtol=1e-12, atol=0.0))

    # -- tail masses and truncated moments ---------------------------------
    def tail_plus(self, beta: float) -> float:
        if beta >= self.jump_bound_p:
            return 0.0
        return _log_quad(self._density_pos, beta, self.jump_bound_p)

    def tail_minus(self, beta: float) -> float:
        if beta >= self.jump_bound_p:
            return 0.0
        return _log_quad(self._density_neg, beta, self.jump_bound_p)

    def theta(self, beta: float) -> float:
        return self.tail_plus(beta) + self.tail_minus(beta)

    def moment_plus(self, lo: float, hi: float, expo: float) -> float:
        """integral of x^expo F(dx) over lo < x <= hi (positive side)."""
        hi = min(hi, self.jump_bound_p)
        return _log_quad(lambda x: x**expo * self._density_pos(x), lo, hi)

    def moment_minus(self, lo: float, hi: float, expo: float) -> float:
        """integral of |x|^expo F(dx) over -hi <= x < -lo (negative side)."""
        hi = min(hi, self.jump_bound_p)
        return _log_quad(lambda x: x**expo * self._density_neg(x), lo, hi)

    def xlog_plus(self, lo: float, hi: float) -> float:
        """integral of x log(x) F(dx) over lo < x <= hi."""
        hi = min(hi, self.jump_bound_p)
        return _log_quad(lambda x: x * math.log(x) * self._density_pos(x), lo, hi)

    def xlog_minus(self, lo: float, hi: float) -> float:
        """integral of |x| log|x| F(dx) over -hi <= x < -lo."""
        hi = min(hi, self.jump_bound_p)
        return _log_quad(lambda x: x * math.log(x) * self._density_neg(x), lo, hi)

    # -- derived quantities -------------------------------------------------
    def small_jump_variance(self, beta: float) -> float:
        """c(beta): variance rate of the compensated jumps below beta."""
        b = min(beta, self.jump_bound_p)
        return self.moment_plus(0.0, b, 2.0) + self.moment_minus(0.0, b, 2.0)

    def b_prime(self) -> float:
        if self.jump_bound_p <= 1.0:
            return self.drift_b
        return (
            self.drift_b
            + self.moment_plus(1.0, self.jump_bound_p, 1.0)
            - self.moment_minus(1.0, self.jump_bound_p, 1.0)
        )

    def d_prime(self, beta: float) -> float:
        return (
            self.moment_plus(beta, self.jump_bound_p, 1.0)
            - self.moment_minus(beta, self.jump_bound_p, 1.0)
        )

    def drift_d(self, beta: float) -> float:
        """d(beta) = b' - d'(beta): drift of the small-jump part of the path."""
        return self.b_prime() - self.d_prime(beta)

    def d_zero(self) -> float:
        """d = b - integral of x over |x| <= 1; finite only when the first
        absolute moment near zero is (first moments of small jumps exist)."""
        return self.drift_b - (self.moment_plus(0.0, 1.0, 1.0) - self.moment_minus(0.0, 1.0, 1.0))

    # -- sampling -----------------------------------------------------------
    def _band_table(self, side: str):
        """Monotone inverse of the one-sided tail function on a log-spaced
        knot grid; built once per side and cached."""
        key = ("table", side)
        if key not in self._tables:
            if not np.isfinite(self.jump_bound_p):
                raise ValueError("sampling requires a finite jump bound")
            p = self.jump_bound_p
            knots = np.geomspace(1e-8 * p, p, _TABLE_KNOTS)
            dens = self._density_pos if side == "plus" else self._density_neg
            # 16-point Gauss-Legendre on each geometric panel, then a
            # cumulative sum from the top gives the tail at every knot.
            gl_x, gl_w = np.polynomial.legendre.leggauss(16)
            a, b = knots[:-1], knots[1:]
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            xs = mid[:, None] + half[:, None] * gl_x[None, :]
            panel = (half[:, None] * gl_w[None, :] * dens(xs)).sum(axis=1)
            tail = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])
            # strictly decreasing tail required for a monotone inverse
            keep = np.concatenate([[True], np.diff(tail[::-1]) > 0])[::-1]
            t, x = tail[keep][::-1], knots[keep][::-1]
            self._tables[key] = (PchipInterpolator(t, x), t[0], t[-1])
        return self._tables[key]

    def sample_band(self, lo: float, hi: float, rng: np.random.Generator, size=None):
        """Draw from F conditioned on lo < |x| <= hi."""
        hi = min(hi, self.jump_bound_p)
        if not lo < hi:
            raise ValueError("empty band")
        if lo < 1e-8 * self.jump_bound_p:
            raise ValueError("cutoff below the tabulated inverse-tail range")
        tp_lo, tp_hi = _tail_from_table(self, "plus", lo), _tail_from_table(self, "plus", hi)
        tm_lo, tm_hi = _tail_from_table(self, "minus", lo), _tail_from_table(self, "minus", hi)
        mass_p, mass_m = tp_lo - tp_hi, tm_lo - tm_hi
        total = mass_p + mass_m
        if total <= 0:
            raise ValueError("band has zero mass")
        n = 1 if size is None else int(size)
        pick_pos = rng.random(n) < mass_p / total
        v = rng.random(n)
        out = np.empty(n)
        inv_p = self._band_table("plus")[0]
        inv_m = self._band_table("minus")[0]
        if pick_pos.any():
            out[pick_pos] = inv_p(tp_hi + v[pick_pos] * mass_p)
        if (~pick_pos).any():
            out[~pick_pos] = -inv_m(tm_hi + v[~pick_pos] * mass_m)
        return float(out[0]) if size is None else out

    def sample_tail(self, beta: float, rng: np.random.Generator, size=None):
        return self.sample_band(beta, self.jump_bound_p, rng, size=size)


def _tail_from_table(model: LevyModel, side: str, x: float) -> float:
    """One-sided tail evaluated consistently with the sampling table."""
    if x >= model.jump_bound_p:
        return 0.0
    return model.tail_plus(x) if side == "plus" else model.tail_minus(x)


class TwoSidedStable(LevyModel):
    """Density alpha*theta+ * x^(-1-alpha) on (0, p] and the mirror with
    theta- on [-p, 0); calibrated so beta^alpha * theta+/-(beta) ->
    theta+/- exactly as beta -> 0 and every truncated moment has a closed
    form."""

    def __init__(self, alpha, theta_plus, theta_minus, drift_b=0.0, jump_bound_p=1.0):
        if not 0 < alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")
        if theta_plus < 0 or theta_minus < 0 or theta_plus + theta_minus == 0:
            raise ValueError("theta+ and theta- must be nonnegative with a positive sum")
        if not np.isfinite(jump_bound_p):
            raise ValueError("stable-like model requires a finite jump bound")
        super().__init__(drift_b=drift_b, jump_bound_p=jump_bound_p)
        self.alpha = float(alpha)
        self.theta_plus_const = float(theta_plus)
        self.theta_minus_const = float(theta_minus)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        absx = np.abs(x)
        with np.errstate(divide="ignore", over="ignore"):
            mag = np.where(absx > 0, absx ** (-1.0 - a), np.inf)
        coef = np.where(x > 0, a * self.theta_plus_const, a * self.theta_minus_const)
        return np.where((absx > 0) & (absx <= self.jump_bound_p), coef * mag, 0.0)

    @property
    def symmetric(self) -> bool:
        return self.theta_plus_const == self.theta_minus_const

    def _one_side_moment(self, const, lo, hi, expo):
        # integral of x^expo * alpha*const*x^(-1-alpha) over (lo, hi & p]
        hi = min(hi, self.jump_bound_p)
        if lo >= hi or const == 0.0:
            return 0.0
        a = self.alpha
        if lo == 0.0 and expo <= a:
            return math.inf
        if expo == a:
            return a * const * math.log(hi / lo)
        q = expo - a
        lo_term = 0.0 if lo == 0.0 else lo**q
        return a * const * (hi**q - lo_term) / q

    def tail_plus(self, beta):
        if beta >= self.jump_bound_p:
            return 0.0
        a = self.alpha
        return self.theta_plus_const * (beta**-a - self.jump_bound_p**-a)

    def tail_minus(self, beta):
        if beta >= self.jump_bound_p:
            return 0.0
        a = self.alpha
        return self.theta_minus_const * (beta**-a - self.jump_bound_p**-a)

    def moment_plus(self, lo, hi, expo):
        return self._one_side_moment(self.theta_plus_const, lo, hi, expo)

    def moment_minus(self, lo, hi, expo):
        return self._one_side_moment(self.theta_minus_const, lo, hi, expo)

    def _one_side_xlog(self, const, lo, hi):
        # integral of x log(x) * alpha*const*x^(-1-alpha) over (lo, hi & p]
        hi = min(hi, self.jump_bound_p)
        if lo >= hi or const == 0.0:
            return 0.0
        a = self.alpha

        if a == 1.0:
            return const * 0.5 * (math.log(hi) ** 2 - math.log(lo) ** 2)

        # antiderivative of x^(-a) log x: x^(1-a) ((1-a) log x - 1)/(1-a)^2
        def anti(x):
            return x ** (1.0 - a) * ((1.0 - a) * math.log(x) - 1.0) / (1.0 - a) ** 2

        return a * const * (anti(hi) - anti(lo))

    def xlog_plus(self, lo, hi):
        return self._one_side_xlog(self.theta_plus_const, lo, hi)

    def xlog_minus(self, lo, hi):
        return self._one_side_xlog(self.theta_minus_const, lo, hi)

    def sample_band(self, lo, hi, rng, size=None):
        hi = min(hi, self.jump_bound_p)
        if not lo < hi:
            raise ValueError("empty band")
        a = self.alpha
        span = lo**-a - hi**-a
        mass_p = self.theta_plus_const * span
        mass_m = self.theta_minus_const * span
        total = mass_p + mass_m
        if total <= 0:
            raise ValueError("band has zero mass")
        n = 1 if size is None else int(size)
        pick_pos = rng.random(n) < mass_p / total
        v = rng.random(n)
        mag = (lo**-a - v * span) ** (-1.0 / a)
        out = np.where(pick_pos, mag, -mag)
        return float(out[0]) if size is None else out


class CGMY(LevyModel):
    """Tempered-stable density C e^{-M x} x^{-1-Y} for x > 0 and
    C e^{G x} |x|^{-1-Y} for x < 0, truncated at the jump bound.  An
    infinite jump bound is accepted for tail/moment evaluation (where the
    exponential tempering keeps everything finite) but not for sampling."""

    def __init__(self, c, g, m, y, drift_b=0.0, jump_bound_p=1.0):
        if min(c, g, m) <= 0 or not 0 < y < 2:
            raise ValueError("need C, G, M > 0 and 0 < Y < 2")
        super().__init__(drift_b=drift_b, jump_bound_p=jump_bound_p)
        self.c = float(c)
        self.g = float(g)
        self.m = float(m)
        self.y = float(y)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        absx = np.abs(x)
        with np.errstate(divide="ignore", over="ignore"):
            pos = self.c * np.exp(-self.m * x) * np.where(absx > 0, absx ** (-1 - self.y), np.inf)
            neg = self.c * np.exp(self.g * x) * np.where(absx > 0, absx ** (-1 - self.y), np.inf)
        out = np.where(x > 0, pos, neg)
        return np.where((absx > 0) & (absx <= self.jump_bound_p), out, 0.0)

    @property
    def symmetric(self) -> bool:
        return self.g == self.m


class CustomModel(LevyModel):
    """Arbitrary user density; everything runs through quadrature and the
    tabulated inverse tail."""

    def __init__(self, density, drift_b=0.0, jump_bound_p=1.0, symmetric=None):
        super().__init__(drift_b=drift_b, jump_bound_p=jump_bound_p)
        self._density = density
        self._symmetric = symmetric

    def density(self, x):
        x = np.asarray(x, dtype=float)
        val = np.asarray(self._density(x), dtype=float)
        return np.where(np.abs(x) <= self.jump_bound_p, val, 0.0)

    @property
    def symmetric(self) -> bool:
        if self._symmetric is not None:
            return self._symmetric
        return super().symmetric


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailStats:
    """All truncated functionals of F at one cutoff beta."""

    beta: float
    theta_plus: float
    theta_minus: float
    theta: float
    c_beta: float
    d_plus: float
    d_minus: float
    delta: float
    d_prime: float
    rho_plus: float
    rho_minus: float
    rho: float
    b_prime: float
    d_beta: float
    s_beta: float


def tail_theta(model: LevyModel, beta: float, side: str = "both") -> float:
    """Mass of F beyond the cutoff: +beta, -beta or both."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if side == "plus":
        return model.tail_plus(beta)
    if side == "minus":
        return model.tail_minus(beta)
    if side == "both":
        return model.theta(beta)
    raise ValueError(f"unknown side {side!r}")


def s_scale(beta: float, alpha: float) -> float:
    """Scale of the big-jump first moments: 1, log(1/beta) or beta^(1-alpha)
    according to alpha <, =, > 1."""
    if alpha < 1.0:
        return 1.0
    if alpha == 1.0:
        return math.log(1.0 / beta)
    return beta ** (1.0 - alpha)


def tail_stats(model: LevyModel, beta: float, alpha: float) -> TailStats:
    """Every truncated functional of F at cutoff beta, with |x|^alpha used
    for the rho moments."""
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    p = model.jump_bound_p
    tp = model.tail_plus(beta)
    tm = model.tail_minus(beta)
    dp = model.moment_plus(beta, p, 1.0)
    dm = model.moment_minus(beta, p, 1.0)
    rp = model.moment_plus(beta, p, alpha)
    rm = model.moment_minus(beta, p, alpha)
    bp = model.b_prime()
    return TailStats(
        beta=beta,
        theta_plus=tp,
        theta_minus=tm,
        theta=tp + tm,
        c_beta=model.small_jump_variance(beta),
        d_plus=dp,
        d_minus=dm,
        delta=dp + dm,
        d_prime=dp - dm,
        rho_plus=rp,
        rho_minus=rm,
        rho=rp + rm,
        b_prime=bp,
        d_beta=bp - (dp - dm),
        s_beta=s_scale(beta, alpha),
    )


def xlog_integral(model: LevyModel, beta: float, b_cut: float) -> float:
    """integral of x log|x| F(dx) over beta < |x| <= b_cut.

    Dividing by log(1/beta)^2 exposes the -theta'/2 small-cutoff limit for
    alpha = 1 models.
    """
    if not 0 < beta < b_cut:
        raise ValueError("need 0 < beta < b_cut")
    return model.xlog_plus(beta, b_cut) - model.xlog_minus(beta, b_cut)


_FUBINI_VARIANTS = ("abs_pos", "abs_neg", "xlog_pos", "xlog_neg")


def fubini_check(model: LevyModel, a: float, b: float, gamma: float, variant: str = "abs_pos"):
    """Evaluate both sides of the tail-function/moment exchange identities.

    On the positive side, for 0 <= a < b <= 1 and gamma > 0:

        integral_{a<x<=b} x^gamma F(dx)
            = gamma * integral_0^b y^(gamma-1) (theta+(y v a) - theta+(b)) dy

    and the x log x analogue replaces gamma*y^(gamma-1) by (1 + log y).
    Negative-side variants mirror with theta-.  Both sides are computed by
    independent quadrature routes (density vs tail function).
    """
    if not (0 <= a < b <= 1):
        raise ValueError("need 0 <= a < b <= 1")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if variant not in _FUBINI_VARIANTS:
        raise ValueError(f"variant must be one of {_FUBINI_VARIANTS}")

    pos = variant.endswith("pos")
    tail = model.tail_plus if pos else model.tail_minus
    dens = model._density_pos if pos else model._density_neg
    tail_b = tail(b)

    if variant.startswith("abs"):
        lhs = _log_quad(lambda x: x**gamma * dens(x), a, b)
        rhs = gamma * _quad(
            lambda y: y ** (gamma - 1.0) * (tail(max(y, a)) - tail_b), 0.0, b, points=[a]
        )
    else:
        # x log x against F; the right side integrand has a log singularity
        # at 0 and a kink at a, both integrable.
        lhs = _log_quad(lambda x: x * math.log(x) * dens(x), a, b)
        rhs = _quad(
            lambda y: (1.0 + math.log(y)) * (tail(max(y, a)) - tail_b), 0.0, b, points=[a]
        )
    return lhs, rhs


def truncated_jump_sampler(model: LevyModel, beta: float, rng: np.random.Generator, size=None):
    """Draw from F restricted to |x| > beta and normalized."""
    if beta >= model.jump_bound_p:
        raise ValueError("no mass beyond beta: theta(beta) = 0")
    if beta <= 0:
        raise ValueError("beta must be positive")
    return model.sample_tail(beta, rng, size=size)


def levy_cf_exponent(model: LevyModel, u: float) -> complex:
    """Characteristic exponent psi(u) of the model, by quadrature:
    psi(u) = i u b + integral (e^{iux} - 1 - iux 1_{|x|<=1}) F(dx)."""
    p = model.jump_bound_p

    def re_part(x, dens):
        return (math.cos(u * x) - 1.0) * dens(x)

    def im_part(x, dens, sign):
        comp = x if x <= 1.0 else 0.0
        return (math.sin(sign * u * x) - sign * u * comp) * dens(x)

    re = _log_quad(lambda x: re_part(x, model._density_pos), 0.0, p) + _log_quad(
        lambda x: re_part(x, model._density_neg), 0.0, p
    )
    im = _log_quad(lambda x: im_part(x, model._density_pos, 1.0), 0.0, p) + _log_quad(
        lambda x: im_part(x, model._density_neg, -1.0), 0.0, p
    )
    return complex(re, im + u * model.drift_b)
