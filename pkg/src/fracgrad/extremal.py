"""Closed-form extremal families and the analytic quantities they attain.

Power cutoffs realize the sup-norm sharp constant in the supercritical
regime, the logarithmic cutoff drives the critical-threshold blowup, and
the profile h(beta) = (beta p + n)/(alpha + beta)^p selects the optimal
cutoff exponent.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import (
    SUPERCRITICAL,
    ball_volume,
    classify_regime,
    kernel_constants,
    morrey_constant,
    sphere_area,
)
from .errors import DomainError, RegimeError


@dataclass(frozen=True)
class PowerCutoff:
    """f(x) = |x - center|^beta restricted to the ball B(center, radius)."""

    center: tuple
    radius: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.radius <= 0:
            raise DomainError(f"radius must be positive, got {self.radius}")

    def evaluate(self, *coords):
        c = self.center
        r = np.sqrt(sum((x - c[j]) ** 2 for j, x in enumerate(coords)))
        inside = r < self.radius
        if self.beta < 0 and np.any(inside & (r == 0)):
            raise DomainError("power cutoff with beta < 0 sampled at its center")
        with np.errstate(divide="ignore"):
            vals = np.where(inside, r, 1.0) ** self.beta
        return np.where(inside, vals, 0.0)


@dataclass(frozen=True)
class LogCutoff:
    """u_r(x) = |x|^(1-s) on the annulus r < |x| < 1, normalized by its gradient mass."""

    inner_radius: float
    order: float

    def __post_init__(self):
        if not 0.0 < self.inner_radius < 1.0:
            raise DomainError(f"inner radius must lie in (0, 1), got {self.inner_radius}")
        if not 0.0 < self.order < 1.0:
            raise DomainError(f"order must lie in (0, 1), got {self.order}")


def power_cutoff_lp_norm(n, p, beta, r0):
    """Exact L^p norm of the power cutoff: closed form of the radial integral."""
    if beta * p + n <= 0:
        raise DomainError(f"requires beta*p + n > 0, got {beta * p + n}")
    omega = sphere_area(n)
    return (omega / n) ** (1.0 / p) * (n / (beta * p + n)) ** (1.0 / p) * r0 ** (
        beta + n / p
    )


def power_cutoff_potential_center(n, alpha, beta, r0):
    """Exact unnormalized potential of the power cutoff at its own center."""
    if alpha + beta <= 0:
        raise DomainError(f"requires alpha + beta > 0, got {alpha + beta}")
    return sphere_area(n) * r0 ** (alpha + beta) / (alpha + beta)


def _check_super(n, p, alpha):
    if p <= 1.0:
        raise RegimeError(f"p must exceed 1, got {p}")
    if classify_regime(alpha, p, n) != SUPERCRITICAL:
        raise RegimeError(f"requires alpha*p > n, got alpha*p = {alpha * p}, n = {n}")


def h_profile(n, p, alpha, beta):
    """(beta p + n) / (alpha + beta)^p on beta > -n/p."""
    _check_super(n, p, alpha)
    if beta <= -n / p:
        raise DomainError(f"beta must exceed -n/p = {-n / p}, got {beta}")
    return (beta * p + n) / (alpha + beta) ** p


def h_argmax(n, p, alpha):
    """The profile maximizer beta = -(n - alpha)/(p - 1)."""
    _check_super(n, p, alpha)
    return -(n - alpha) / (p - 1.0)


def h_sup(n, p, alpha):
    """Maximum of the profile: ((alpha p - n)/(p - 1))^(1-p)."""
    _check_super(n, p, alpha)
    return ((alpha * p - n) / (p - 1.0)) ** (1.0 - p)


def extremal_ratio(n, p, alpha, r0=1.0):
    """Potential-to-norm ratio of the optimal power cutoff, from closed forms only.

    Equals the supercritical sharp constant; independent of r0 by homogeneity.
    """
    _check_super(n, p, alpha)
    beta = h_argmax(n, p, alpha)
    pot = power_cutoff_potential_center(n, alpha, beta, r0)
    norm = power_cutoff_lp_norm(n, p, beta, r0)
    vol = ball_volume(n, r0)
    return pot / (vol ** ((alpha * p - n) / (n * p)) * norm)


def log_cutoff_eval(n, s, r, x):
    """Pointwise values of the logarithmic cutoff at radii |x| (array-friendly)."""
    lc = LogCutoff(inner_radius=r, order=s)
    rho = np.abs(np.asarray(x, dtype=np.float64)) if n == 1 else np.linalg.norm(
        np.atleast_2d(np.asarray(x, dtype=np.float64)), axis=-1
    )
    denom = (1.0 - s) * sphere_area(n) * math.log(1.0 / lc.inner_radius)
    vals = np.where((rho > r) & (rho < 1.0), rho ** (1.0 - s) / denom, 0.0)
    return vals if vals.shape else float(vals)


def log_cutoff_grad_norm(n, s, r):
    """|grad u_r| in L^p at the critical exponent p = n/s."""
    lc = LogCutoff(inner_radius=r, order=s)
    p = n / s
    return (sphere_area(n) * math.log(1.0 / lc.inner_radius)) ** ((1.0 - p) / p)


def blowup_exponent(n, s, kappa, eps=0.0):
    """Exponent of r in the closed-form lower bound: n - omega (kappa kappa_{-s} (1-eps))^(n/(n-s)).

    Negative exponent means the bound diverges as r -> 0, positive means it
    vanishes, zero is the flat threshold.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    if kappa <= 0.0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    kms = kernel_constants(n, s).kappa_minus_s
    omega = sphere_area(n)
    return n - omega * (kappa * kms * (1.0 - eps)) ** (n / (n - s))


def moser_blowup_lower_bound(n, s, kappa, r, eps=0.01):
    """r^(n - omega (kappa kappa_{-s} (1-eps))^(n/(n-s))), the simplified lower bound."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    return r ** blowup_exponent(n, s, kappa, eps)


@dataclass(frozen=True)
class GradientCutoffFamily:
    """Closed forms of the supercritical '-' extremal family at one (n, p, s)."""

    beta: float
    grad_norm: float
    center_value: float
    ratio: float


def gradient_cutoff_family(n, p, s, r0=1.0):
    """Supercritical '-' extremal: beta is forced to -(n-s)/(p-1).

    grad_norm is the L^p norm of the gradient (a power cutoff of exponent
    beta), center_value is kappa_{-s} omega r0^(beta+s)/(beta+s), and ratio
    is the assembled sharpness quotient, equal to the '-' sup-norm constant.
    """
    _check_super(n, p, s)
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    beta = -(n - s) / (p - 1.0)
    if beta + s <= 0 or beta * p + n <= 0:
        raise RegimeError(f"degenerate cutoff exponent beta = {beta}")
    grad_norm = power_cutoff_lp_norm(n, p, beta, r0)
    kms = kernel_constants(n, s).kappa_minus_s
    center_value = kms * sphere_area(n) * r0 ** (beta + s) / (beta + s)
    vol = ball_volume(n, r0)
    ratio = center_value / (vol ** ((s * p - n) / (n * p)) * grad_norm)
    return GradientCutoffFamily(
        beta=beta, grad_norm=grad_norm, center_value=center_value, ratio=ratio
    )
