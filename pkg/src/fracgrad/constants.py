"""Special functions and every closed-form sharp constant used by the toolkit.

All Gamma-ratio constants are assembled in the log domain from a Lanczos
log-gamma, so ratios stay finite while individual factors approach poles
(e.g. as the sub/critical regime boundary is approached).  Each constant is
available both as a raw value and as a (log-value, sign) pair.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, RegimeError

# Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set).  Relative
# error of gamma() is below 1e-14 on [0.1, 30].
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_LOG_2 = math.log(2.0)

# Relative tolerance of the regime split |alpha*p - n| <= tol * n.
REGIME_TOL = 1e-12

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


def _is_nonpositive_integer(x):
    return x <= 0.0 and x == math.floor(x)


def _lanczos_lgamma_pos(x):
    # valid for x >= 0.5
    acc = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[k] / (x - 1.0 + k)
    t = x + _LANCZOS_G - 0.5
    return _LOG_SQRT_2PI + (x - 0.5) * math.log(t) - t + math.log(acc)


def lgamma_signed(x):
    """Return (log|Gamma(x)|, sign of Gamma(x)).

    Raises DomainError at the poles x = 0, -1, -2, ...
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma argument must be finite, got {x}")
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma pole at x = {x}")
    if x >= 0.5:
        return _lanczos_lgamma_pos(x), 1.0
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    sinpix = math.sin(math.pi * x)
    logval = _LOG_PI - math.log(abs(sinpix)) - _lanczos_lgamma_pos(1.0 - x)
    return logval, math.copysign(1.0, sinpix)


def gamma(x):
    """Gamma function via Lanczos approximation with reflection for x < 0.5."""
    logval, sign = lgamma_signed(x)
    return sign * math.exp(logval)


def lgamma(x):
    """log Gamma(x) for x where Gamma(x) > 0."""
    logval, sign = lgamma_signed(x)
    if sign < 0:
        raise DomainError(f"Gamma({x}) is negative; use lgamma_signed")
    return logval


class _Log:
    """Accumulator for products/quotients of possibly-signed factors in log space."""

    __slots__ = ("log", "sign")

    def __init__(self):
        self.log = 0.0
        self.sign = 1.0

    def mul_gamma(self, x, power=1.0):
        lv, sg = lgamma_signed(x)
        self.log += power * lv
        if power % 2 != 0 and sg < 0:
            self.sign = -self.sign
        return self

    def mul_pow(self, base, exponent):
        if base <= 0:
            raise DomainError(f"log-domain power needs positive base, got {base}")
        self.log += exponent * math.log(base)
        return self

    def value(self):
        return self.sign * math.exp(self.log)

    def pair(self):
        return self.log, self.sign


def sphere_area(n):
    """Surface area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {n}")
    n = int(n)
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


def ball_volume(n, radius=1.0):
    """Volume of the n-ball of the given radius."""
    return sphere_area(n) * float(radius) ** n / n


def classify_regime(order, p, n):
    """Sub/critical/super classification of order*p versus n.

    The critical band is |order*p - n| <= REGIME_TOL * n.
    """
    prod = float(order) * float(p)
    if abs(prod - n) <= REGIME_TOL * n:
        return CRITICAL
    return SUBCRITICAL if prod < n else SUPERCRITICAL


@dataclass(frozen=True)
class FracParams:
    """Validated parameter bundle (n, s, p, alpha, kappa).

    s, alpha and kappa are optional; validation applies to the fields that
    are present.
    """

    n: int
    p: float = 2.0
    s: float | None = None
    alpha: float | None = None
    kappa: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n}")
        if self.p < 1.0:
            raise DomainError(f"p must satisfy p >= 1, got {self.p}")
        if self.s is not None and not 0.0 < self.s < 1.0:
            raise DomainError(f"s must lie in (0, 1), got {self.s}")
        if self.alpha is not None and not 0.0 < self.alpha < self.n:
            raise DomainError(f"alpha must lie in (0, n), got {self.alpha}")
        if self.kappa is not None and not 0.0 < self.kappa <= self.n:
            raise DomainError(f"kappa must lie in (0, n], got {self.kappa}")

    def s_regime(self):
        if self.s is None:
            raise DomainError("s not set")
        return classify_regime(self.s, self.p, self.n)

    def alpha_regime(self):
        if self.alpha is None:
            raise DomainError("alpha not set")
        return classify_regime(self.alpha, self.p, self.n)


@dataclass(frozen=True)
class KernelConstants:
    """Normalizers of the singular-integral kernels for one (n, s)."""

    c_ns: float
    c_ns_plus: float
    c_ns_minus: float
    kappa_minus_s: float


def riesz_normalizer(n, alpha):
    """c_{n,alpha} = Gamma((n-alpha)/2) / (2^alpha pi^(n/2) Gamma(alpha/2)).

    Valid for alpha in (0, n); turns the raw kernel |x|^(alpha-n) into the
    potential whose Fourier symbol is (2 pi |xi|)^(-alpha).
    """
    if not 0.0 < alpha < n:
        raise DomainError(f"alpha must lie in (0, n), got alpha={alpha}, n={n}")
    acc = _Log()
    acc.mul_gamma((n - alpha) / 2.0)
    acc.mul_pow(2.0, -alpha)
    acc.mul_pow(math.pi, -n / 2.0)
    acc.mul_gamma(alpha / 2.0, power=-1.0)
    return acc.value()


def kernel_constants(n, s):
    """All four kernel normalizers for dimension n and order s in (0, 1)."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n}")
    n = int(n)
    c_ns = riesz_normalizer(n, s)

    plus = _Log()
    plus.mul_pow(s, 1.0)
    plus.mul_pow(2.0, s - 1.0)
    plus.mul_gamma((n + s) / 2.0)
    plus.mul_pow(math.pi, -n / 2.0)
    plus.mul_gamma(1.0 - s / 2.0, power=-1.0)

    minus = _Log()
    minus.mul_pow(2.0, s)
    minus.mul_gamma((n + s + 1.0) / 2.0)
    minus.mul_pow(math.pi, -n / 2.0)
    minus.mul_gamma((1.0 - s) / 2.0, power=-1.0)

    kms = _Log()
    kms.mul_gamma((n - s + 1.0) / 2.0)
    kms.mul_pow(2.0, -s)
    kms.mul_pow(math.pi, -n / 2.0)
    kms.mul_gamma((1.0 + s) / 2.0, power=-1.0)

    return KernelConstants(
        c_ns=c_ns,
        c_ns_plus=plus.value(),
        c_ns_minus=minus.value(),
        kappa_minus_s=kms.value(),
    )


def _herbst_log(n, p, alpha):
    acc = _Log()
    acc.mul_pow(2.0, alpha * (p - 1.0) / p)
    acc.mul_pow(math.pi, n / 2.0)
    acc.mul_gamma(alpha / 2.0)
    acc.mul_gamma(n / (2.0 * p) - alpha / 2.0)
    acc.mul_gamma(n * (p - 1.0) / (2.0 * p))
    acc.mul_gamma((n - alpha) / 2.0, power=-1.0)
    acc.mul_gamma(n * (p - 1.0) / (2.0 * p) + alpha / 2.0, power=-1.0)
    acc.mul_gamma(n / (2.0 * p), power=-1.0)
    return acc


def herbst_constant(n, p, alpha):
    """Sharp constant of the weighted potential bound in the regime alpha*p < n."""
    if p <= 1.0:
        raise RegimeError(f"p must exceed 1, got {p}")
    if not 0.0 < alpha < n:
        raise DomainError(f"alpha must lie in (0, n), got {alpha}")
    if classify_regime(alpha, p, n) != SUBCRITICAL:
        raise RegimeError(f"requires alpha*p < n, got alpha*p = {alpha * p}, n = {n}")
    return _herbst_log(n, p, alpha).value()


def herbst_constant_log(n, p, alpha):
    """(log, sign) form of herbst_constant."""
    if p <= 1.0:
        raise RegimeError(f"p must exceed 1, got {p}")
    if classify_regime(alpha, p, n) != SUBCRITICAL:
        raise RegimeError(f"requires alpha*p < n, got alpha*p = {alpha * p}, n = {n}")
    return _herbst_log(n, p, alpha).pair()


def morrey_constant(n, p, alpha):
    """Sharp sup-norm constant in the regime alpha*p > n.

    (omega_{n-1}/n)^((n-alpha)/n) * (n(p-1)/(alpha p - n))^((p-1)/p)
    """
    if p <= 1.0:
        raise RegimeError(f"p must exceed 1, got {p}")
    if classify_regime(alpha, p, n) != SUPERCRITICAL:
        raise RegimeError(f"requires alpha*p > n, got alpha*p = {alpha * p}, n = {n}")
    omega = sphere_area(n)
    return (omega / n) ** ((n - alpha) / n) * (
        n * (p - 1.0) / (alpha * p - n)
    ) ** ((p - 1.0) / p)


def _twin_sub_log(n, p, s, sign):
    acc = _Log()
    if sign == "+":
        acc.mul_pow(2.0, -s / p)
        acc.mul_gamma(n / (2.0 * p) - s / 2.0)
        acc.mul_gamma(n * (p - 1.0) / (2.0 * p))
        acc.mul_gamma(n * (p - 1.0) / (2.0 * p) + s / 2.0, power=-1.0)
        acc.mul_gamma(n / (2.0 * p), power=-1.0)
    else:
        acc.mul_pow(2.0, 1.0 - s)
        acc.mul_pow(p / (n - p), 1.0)
        acc.mul_gamma(n / (2.0 * p) - s / 2.0)
        acc.mul_gamma(n * (p - 1.0) / (2.0 * p) + 0.5)
        acc.mul_gamma(n * (p - 1.0) / (2.0 * p) + s / 2.0, power=-1.0)
        acc.mul_gamma(n / (2.0 * p) - 0.5, power=-1.0)
    return acc


def _twin_critical_log(n, s, sign):
    omega = sphere_area(n)
    acc = _Log()
    acc.mul_pow(n / omega, (n - s) / n)
    acc.mul_pow(math.pi, n / 2.0)
    acc.mul_pow(2.0, s)
    if sign == "+":
        acc.mul_gamma(s / 2.0)
        acc.mul_gamma((n - s) / 2.0, power=-1.0)
    else:
        acc.mul_gamma((s + 1.0) / 2.0)
        acc.mul_gamma((n + 1.0 - s) / 2.0, power=-1.0)
    return acc


def twin_constants(n, p, s, sign):
    """Sharp constant for the +/- fractional operator at (n, p, s).

    The regime is decided by s*p versus n: the weighted-norm constant below
    it, the exponential-threshold constant on it, the sup-norm constant
    above it.
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    if p <= 1.0:
        raise DomainError(f"p must exceed 1, got {p}")
    regime = classify_regime(s, p, n)
    if regime == SUBCRITICAL:
        if sign == "-" and p >= n:
            raise RegimeError(f"'-' variant below the critical line needs p < n, got p={p}, n={n}")
        return _twin_sub_log(n, p, s, sign).value()
    if regime == CRITICAL:
        return _twin_critical_log(n, s, sign).value()
    c_super = morrey_constant(n, p, s)
    kc = kernel_constants(n, s)
    return c_super * (kc.c_ns if sign == "+" else kc.kappa_minus_s)


def twin_constants_log(n, p, s, sign):
    """(log, sign-of-value) form of twin_constants."""
    value = twin_constants(n, p, s, sign)
    return math.log(abs(value)), math.copysign(1.0, value)


@dataclass(frozen=True)
class IntegerOrderConstants:
    """Integer-order (m-th) sharp constants from the classical inequalities."""

    beta_0mn: float
    c_mp_lt_n: float


def integer_order_constants(m, n, p):
    """Even/odd-m branches of beta_{0,m,n} and c_{mp<n}."""
    if int(m) != m or not 0 < m < n:
        raise DomainError(f"m must be an integer with 0 < m < n, got m={m}, n={n}")
    m = int(m)
    if p <= 1.0:
        raise RegimeError(f"p must exceed 1, got {p}")
    if m * p >= n:
        raise RegimeError(f"c_[mp<n] requires m*p < n, got m*p = {m * p}, n = {n}")
    omega = sphere_area(n)
    even = m % 2 == 0

    beta = _Log()
    beta.mul_pow(n / omega, (n - m) / n)
    beta.mul_pow(math.pi, n / 2.0)
    beta.mul_pow(2.0, m)
    if even:
        beta.mul_gamma(m / 2.0)
        beta.mul_gamma((n - m) / 2.0, power=-1.0)
    else:
        beta.mul_gamma((m + 1.0) / 2.0)
        beta.mul_gamma((n + 1.0 - m) / 2.0, power=-1.0)

    c = _Log()
    if even:
        c.mul_pow(2.0, -m)
        c.mul_gamma(n / (2.0 * p) - m / 2.0)
        c.mul_gamma(n * (p - 1.0) / (2.0 * p))
        c.mul_gamma(n * (p - 1.0) / (2.0 * p) + m / 2.0, power=-1.0)
        c.mul_gamma(n / (2.0 * p), power=-1.0)
    else:
        c.mul_pow(2.0, 1.0 - m)
        c.mul_pow(p / (n - p), 1.0)
        c.mul_gamma(n / (2.0 * p) - m / 2.0)
        c.mul_gamma(n * (p - 1.0) / (2.0 * p) + 0.5)
        c.mul_gamma(n * (p - 1.0) / (2.0 * p) + m / 2.0, power=-1.0)
        c.mul_gamma(n / (2.0 * p) - 0.5, power=-1.0)

    return IntegerOrderConstants(beta_0mn=beta.value(), c_mp_lt_n=c.value())
