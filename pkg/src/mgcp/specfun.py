"""Scalar special functions shared by the counting-process layers.

Mittag-Leffler and generalized Wright series run under one truncation
policy (SeriesConfig).  The incomplete integrals here are the ones the
shock thresholds need; the Caputo derivative is a Grunwald-Letnikov
approximation used only by the fractional ODE residual checks.
"""

import bisect
import math
import warnings
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.special import gammaln, gammasgn
from scipy.special import rgamma as _rgamma


class NumericsWarning(UserWarning):
    """Base class for numerical-quality flags."""


class TruncationWarning(NumericsWarning):
    """A series hit max_terms before the stopping rule was met."""


class CancellationWarning(NumericsWarning):
    """Alternating-series cancellation ate most of the digits."""


@dataclass(frozen=True)
class SeriesConfig:
    """Shared truncation policy for all power series in this package.

    rel_tol : stop once |term| < rel_tol * |partial sum| holds for three
        consecutive terms.
    max_terms : hard cap on the number of terms.
    cancellation_warn_ratio : if max |term| / |result| exceeds this, the
        result is flagged as low precision (warning, not an error).
    """

    rel_tol: float = 1e-14
    max_terms: int = 2000
    cancellation_warn_ratio: float = 1e8

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if self.cancellation_warn_ratio < 1:
            raise ValueError("cancellation_warn_ratio must be >= 1")


DEFAULT_SERIES = SeriesConfig()


def _config(cfg):
    return DEFAULT_SERIES if cfg is None else cfg


class _Accumulator:
    """Sums series terms under the SeriesConfig stopping rule.

    Leading exact-zero terms (reciprocal-gamma poles) do not count
    toward the three-small-terms stop; trailing ones do.
    """

    def __init__(self, cfg, label):
        self.cfg = cfg
        self.label = label
        self.total = 0.0
        self.largest = 0.0
        self._small_run = 0
        self._seen_nonzero = False
        self.converged = False

    def add(self, term):
        """Accumulate one term; True means the stop rule fired."""
        self.total = self.total + term
        mag = abs(term)
        if mag > self.largest:
            self.largest = mag
        if mag != 0.0:
            self._seen_nonzero = True
        if self._seen_nonzero and mag < self.cfg.rel_tol * abs(self.total):
            self._small_run += 1
            if self._small_run >= 3:
                self.converged = True
                return True
        else:
            self._small_run = 0
        return False

    def finish(self):
        if not self.converged:
            warnings.warn(
                "%s: series not converged within %d terms"
                % (self.label, self.cfg.max_terms),
                TruncationWarning,
                stacklevel=3,
            )
        denom = abs(self.total)
        if denom == 0.0:
            denom = math.ulp(0.0)
        if self.largest / denom > self.cfg.cancellation_warn_ratio:
            warnings.warn(
                "%s: cancellation ratio %.2e, result is low precision"
                % (self.label, self.largest / denom),
                CancellationWarning,
                stacklevel=3,
            )
        return self.total


def reciprocal_gamma(x):
    """1/Gamma(x), exactly zero at the poles x = 0, -1, -2, ..."""
    return float(_rgamma(x))


def _gamma_ratio(u, v):
    """Gamma(u)/Gamma(v) with sign tracking; zero when v is a pole."""
    lv = gammaln(v)
    if math.isinf(lv):
        return 0.0
    return gammasgn(u) * gammasgn(v) * math.exp(gammaln(u) - lv)


def mittag_leffler(alpha, beta, gamma, x, cfg=None):
    """Three-parameter Mittag-Leffler function E^gamma_{alpha,beta}(x).

    Series sum_r (gamma)_r x^r / (r! Gamma(alpha r + beta)) with the
    rising factorial (gamma)_r.  Accepts complex x (the codifference
    formulas evaluate it on the unit-circle arguments); real x in, real
    out.
    """
    if alpha <= 0 or beta <= 0 or gamma <= 0:
        raise ValueError("alpha, beta, gamma must be positive")
    cfg = _config(cfg)
    term = reciprocal_gamma(beta)
    if x == 0:
        return term
    acc = _Accumulator(cfg, "mittag_leffler")
    for r in range(cfg.max_terms):
        if acc.add(term):
            break
        # term_{r+1}/term_r = (gamma+r)/(r+1) * x * G(ar+b)/G(ar+a+b)
        u = alpha * r + beta
        ratio = math.exp(gammaln(u) - gammaln(u + alpha))
        term = term * ((gamma + r) / (r + 1.0)) * ratio * x
    return acc.finish()


def wright_1_1(a, alpha_a, b, beta_b, x, cfg=None):
    """Generalized Wright function 1Psi1 with one (a, alpha_a) upper and
    one (b, beta_b) lower parameter pair.

    Series sum_r Gamma(a + alpha_a r)/Gamma(b + beta_b r) * x^r / r!.
    Lower-gamma poles zero out their terms via the reciprocal gamma.
    """
    cfg = _config(cfg)
    if x == 0:
        return _gamma_ratio(a, b)
    acc = _Accumulator(cfg, "wright_1_1")
    logax = math.log(abs(x))
    sgnx = 1.0 if x > 0 else -1.0
    sign_r = 1.0
    for r in range(cfg.max_terms):
        u = a + alpha_a * r
        v = b + beta_b * r
        lv = gammaln(v)
        if math.isinf(lv):
            term = 0.0
        else:
            logmag = gammaln(u) - lv + r * logax - gammaln(r + 1.0)
            term = gammasgn(u) * gammasgn(v) * sign_r * math.exp(logmag)
        if acc.add(term):
            break
        sign_r *= sgnx
    return acc.finish()


def incomplete_beta(x, p, q):
    """Incomplete beta integral int_0^x t^(p-1) (1-t)^(q-1) dt.

    q = 0 is allowed (the integrand t^(p-1)/(1-t) stays integrable for
    x < 1); that case backs the logarithmic threshold law.
    """
    if not 0.0 < x < 1.0:
        raise ValueError("x must lie in (0, 1)")
    if p <= 0:
        raise ValueError("p must be positive")
    if q == 0.0:
        # expand 1/(1-t): sum_m x^(p+m)/(p+m), all terms positive, so
        # the value stays exact down to underflow where quadrature
        # loses the boundary layer at large p
        total = 0.0
        xm = x**p
        m = 0.0
        while True:
            term = xm / (p + m)
            total += term
            if term <= 1e-17 * total:
                return total
            if m >= 200_000.0:
                warnings.warn(
                    "incomplete_beta: series cut at x=%g" % x,
                    TruncationWarning,
                    stacklevel=2,
                )
                # geometric bound on everything dropped
                return total + term * x / (1.0 - x)
            xm *= x
            m += 1.0
    # QAWS handles the algebraic t^(p-1) endpoint weight exactly.
    val, err = quad(
        lambda t: (1.0 - t) ** (q - 1.0),
        0.0,
        x,
        weight="alg",
        wvar=(p - 1.0, 0.0),
        epsabs=1e-12,
        limit=200,
    )
    if err > 1e-8:
        warnings.warn(
            "incomplete_beta: quadrature error %.2e" % err,
            TruncationWarning,
            stacklevel=2,
        )
    return val


def generalized_incomplete_gamma(x, p, q):
    """int_p^q e^(-t) t^(x-1) dt for 0 <= p < q <= 1, x > 0.

    Expanding e^(-t) turns this into
    sum_k (-1)^k / k! * (q^(x+k) - p^(x+k)) / (x+k); since q <= 1 the
    factorial makes convergence immediate for any x, including the very
    large orders (deep threshold tails) where gamma-function routes
    overflow and quadrature collapses into the endpoint layer.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if not (0.0 <= p < q <= 1.0):
        raise ValueError("need 0 <= p < q <= 1")
    total = 0.0
    sign = 1.0
    fact = 1.0
    for k in range(60):
        e = x + k
        term = sign * (q**e - p**e) / (e * fact)
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        sign = -sign
        fact *= k + 1.0
    return total


def generalized_sine_integral(x, p, q):
    """int_p^q t^(x-1) sin(t) dt for 0 <= p < q <= 1, x >= 1.

    Same device as the incomplete gamma above, expanding sin(t); the
    (2k+1)! denominators converge even faster.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    if not (0.0 <= p < q <= 1.0):
        raise ValueError("need 0 <= p < q <= 1")
    total = 0.0
    sign = 1.0
    fact = 1.0
    for k in range(40):
        e = x + 2.0 * k + 1.0
        term = sign * (q**e - p**e) / (e * fact)
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        sign = -sign
        fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0)
    return total


def falling_factorial(x, k):
    """(x)_k = x (x-1) ... (x-k+1); (x)_0 = 1."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for m in range(k):
        out *= x - m
    return out


def caputo_derivative_numeric(samples, beta, t_eval, step):
    """Caputo fractional derivative of order beta from tabulated samples.

    Grunwald-Letnikov weights applied to f - f(0); first-order accurate
    in step.  beta = 1 falls back to a central difference (backward at
    the right edge of the sample range).

    samples : sequence of (t, f(t)) pairs on a uniform grid covering
        [0, t_eval].
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if step <= 0:
        raise ValueError("step must be positive")
    pts = sorted((float(t), float(f)) for t, f in samples)
    if len(pts) < 2:
        raise ValueError("need at least two samples")
    ts = [p[0] for p in pts]
    fs = [p[1] for p in pts]
    if ts[0] > 1e-12 or ts[-1] < t_eval - 1e-12:
        raise ValueError("samples must cover [0, t_eval]")

    def f_at(t):
        # linear interpolation; exact when t sits on the sample grid
        if t <= ts[0]:
            return fs[0]
        if t >= ts[-1]:
            return fs[-1]
        k = bisect.bisect_right(ts, t) - 1
        if ts[k + 1] == ts[k]:
            return fs[k]
        w = (t - ts[k]) / (ts[k + 1] - ts[k])
        return fs[k] * (1.0 - w) + fs[k + 1] * w

    if beta == 1.0:
        if t_eval + step <= ts[-1] + 1e-12 and t_eval - step >= -1e-12:
            return (f_at(t_eval + step) - f_at(t_eval - step)) / (2.0 * step)
        return (f_at(t_eval) - f_at(t_eval - step)) / step

    nsteps = int(math.floor(t_eval / step + 1e-9))
    f0 = f_at(0.0)
    w = 1.0
    acc = f_at(t_eval) - f0
    for j in range(1, nsteps + 1):
        w *= 1.0 - (beta + 1.0) / j
        acc += w * (f_at(t_eval - j * step) - f0)
    return acc / step**beta
