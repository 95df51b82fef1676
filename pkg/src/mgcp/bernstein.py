"""MGCP driven by an arbitrary subordinator given through its Levy measure.

Everything here goes through numerical quadrature against the measure,
even when the measure belongs to a named clock with known closed forms.
That makes tcgcp_transition_rate an independent oracle for the
per-variant rate formulas instead of a restatement of them.

The integrals all have the shape int_0^inf phi(r) mu(r) dr with mu
blowing up like r^(-1-rho) at the origin.  On (0, 1] we substitute
r = u^p with p chosen so the transformed integrand is bounded; on
[1, inf) the exponential or polynomial decay is left to adaptive
quadrature.  Custom densities must be safe to call concurrently; this
module never mutates shared state.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .compositions import joint_compositions
from .gcp import pgf_symbol
from .specfun import mittag_leffler
from .variants import _joint_weight
from . import subordinators as subs

_NAMED_CLOCKS = (subs.Stable, subs.TemperedStable, subs.GammaSub, subs.InverseGaussian)


class QuadratureError(RuntimeError):
    """An integral against the Levy measure could not be trusted."""


@dataclass(frozen=True)
class Named:
    """A measure belonging to one of the four Levy clocks."""

    spec: object

    def __post_init__(self):
        if not isinstance(self.spec, _NAMED_CLOCKS):
            raise ValueError("spec must be a Levy subordinator with a density")


@dataclass(frozen=True)
class Custom:
    """A user-supplied Levy density with integrability hints.

    singularity_exponent rho means density(s) ~ s^(-1-rho) near 0;
    leaving it None makes a log-slope probe near the origin estimate
    the substitution power instead.  decay_rate c means the density
    decays like exp(-c s) and fixes the tail truncation point.
    """

    density: Callable[[float], float]
    singularity_exponent: Optional[float] = None
    decay_rate: Optional[float] = None

    def __post_init__(self):
        if self.singularity_exponent is not None and not (
            self.singularity_exponent < 1.0
        ):
            raise ValueError("singularity exponent must be < 1")
        if self.decay_rate is not None and self.decay_rate <= 0:
            raise ValueError("decay rate must be positive")
        # the defining requirement int (1 ^ s) mu(ds) < inf
        exponent = None
        if self.singularity_exponent is not None:
            exponent = -self.singularity_exponent
        tail_top = 1.0 + 40.0 / self.decay_rate if self.decay_rate else np.inf
        try:
            head, head_err = _head(lambda s: s * self.density(s), exponent)
            tail, tail_err = _quad(self.density, 1.0, tail_top)
        except (QuadratureError, OverflowError) as exc:
            raise ValueError("density is not an integrable Levy measure") from exc
        total = head + tail
        if not math.isfinite(total) or head_err + tail_err > 1e-3 * max(1.0, total):
            raise ValueError("density is not an integrable Levy measure")


def _density_fn(m):
    if isinstance(m, Named):
        spec = m.spec
        return lambda s: subs.levy_density(spec, s)
    return m.density


def _origin_exponent(m, power):
    """Exponent e with integrand ~ s^e at 0, or None when undeclared."""
    if isinstance(m, Named):
        return power - 1.0 - subs.levy_singularity_exponent(m.spec)
    if m.singularity_exponent is not None:
        return power - 1.0 - m.singularity_exponent
    return None


def _tail_top(m):
    if isinstance(m, Custom) and m.decay_rate:
        return 1.0 + 40.0 / m.decay_rate
    return np.inf


def _quad(fn, lo, hi):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return quad(fn, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)


def _probe_power(fn):
    """Estimate the integrand's power-law exponent from its log-slope near 0."""
    lo, hi = 1e-7, 1e-5
    flo, fhi = fn(lo), fn(hi)
    if flo <= 0.0 or fhi <= 0.0:
        return 0.0
    e = (math.log(fhi) - math.log(flo)) / (math.log(hi) - math.log(lo))
    return min(e, 0.0)


def _head(fn, exponent):
    """(value, err) of int_0^1 fn(s) ds, fn ~ s^exponent near the origin."""
    if exponent is None:
        exponent = _probe_power(fn)
    if exponent <= -1.0:
        raise QuadratureError("integrand non-integrable at the origin")
    return _quad(_substituted(fn, 1.0 / (1.0 + exponent)), 0.0, 1.0)


def _integral(fn, exponent, tail_top):
    """int_0^inf fn(s) ds where fn ~ s^exponent (> -1) near the origin."""
    head, head_err = _head(fn, exponent)
    tail, tail_err = _quad(fn, 1.0, np.inf if tail_top is None else tail_top)
    val = head + tail
    err = head_err + tail_err
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise QuadratureError(
            "quadrature achieved tolerance %.3e for value %r" % (err, val)
        )
    return val


def _substituted(fn, p):
    def g(u):
        if u <= 0.0:
            return 0.0
        s = u**p
        try:
            return fn(s) * p * u ** (p - 1.0)
        except OverflowError:
            # the density grows faster near 0 than its declared or
            # probed exponent promised
            raise QuadratureError("integrand overflows near the origin") from None

    return g


def bernstein_f(m, s):
    """The Bernstein function f(s) = int (1 - e^(-s r)) mu(dr)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    if s == 0:
        return 0.0
    if isinstance(m, Named):
        return subs.laplace_exponent(m.spec, s)
    mu = _density_fn(m)
    return _integral(
        lambda r: -math.expm1(-s * r) * mu(r), _origin_exponent(m, 1), _tail_top(m)
    )


def g_lambda_u(rates, m, ubar):
    """The pgf exponent g(lambda; u) = int (1 - e^(-r w)) mu(dr).

    The bracket in the defining display is a sum over all jump vectors
    weighted by powers of u; it collapses to 1 - exp(-r w) with w the
    pgf symbol, and we integrate that directly.  Unlike bernstein_f this
    never shortcuts to closed forms, so it can sit on the other side of
    an equality test.
    """
    if any(abs(u) > 1.0 + 1e-12 for u in ubar):
        raise ValueError("need |u_i| <= 1")
    w = pgf_symbol(rates, ubar)
    if w == 0.0:
        return 0.0
    mu = _density_fn(m)
    return _integral(
        lambda r: -math.expm1(-w * r) * mu(r), _origin_exponent(m, 1), _tail_top(m)
    )


def tcgcp_transition_rate(rates, m, lbar):
    """Rate of the jump by lbar > 0 for the measure-driven process.

    rate = sum over compositions of prod(lam^x / x!) * I_Z with
    I_Z = int e^(-lam r) r^Z mu(dr), Z the total jump count.
    """
    if len(lbar) != rates.q:
        raise ValueError("state vector length must equal q")
    if any(n < 0 for n in lbar):
        raise ValueError("state entries must be non-negative")
    if not any(lbar):
        raise ValueError("lbar must be a non-zero jump")
    lam = rates.total
    mu = _density_fn(m)
    tail_top = _tail_top(m)
    cache = {}
    total = 0.0
    for joint in joint_compositions(rates.ks, lbar):
        w, z = _joint_weight(rates.rows, joint, 1.0)
        if w == 0.0:
            continue
        if z not in cache:
            cache[z] = _integral(
                lambda r: math.exp(-lam * r) * r**z * mu(r),
                _origin_exponent(m, z),
                tail_top,
            )
        total += w * cache[z]
    return total


def tcgcp_pgf(rates, m, ubar, t):
    """pgf exp(-t g(lambda; u)); solves dG/dt = -g G, G(0) = 1."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return math.exp(-t * g_lambda_u(rates, m, ubar))


def tcgcp_pgf_fractional(rates, m, beta, ubar, t):
    """Time-fractional pgf E_beta(-t^beta g(lambda; u))."""
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if t < 0:
        raise ValueError("t must be non-negative")
    g = g_lambda_u(rates, m, ubar)
    if beta == 1.0:
        return math.exp(-t * g)
    return mittag_leffler(beta, 1.0, 1.0, -(t**beta) * g)
