"""Measure-driven layer: quadrature against arbitrary Levy densities.

These tests lean on the Named/Custom duality: a Custom measure built
from a named clock's density must reproduce the clock's closed forms
through the quadrature path, which never shortcuts to them.
"""

import math

import pytest
from numpy.testing import assert_allclose

from mgcp.bernstein import (
    Custom,
    Named,
    bernstein_f,
    g_lambda_u,
    tcgcp_pgf,
    tcgcp_pgf_fractional,
    tcgcp_transition_rate,
)
from mgcp.gcp import RateMatrix, pgf_symbol
from mgcp.specfun import mittag_leffler
from mgcp.subordinators import (
    GammaSub,
    InverseGaussian,
    InverseStable,
    Stable,
    TemperedStable,
    laplace_exponent,
    levy_density,
)
from mgcp.variants import (
    GammaTC,
    IgTC,
    Mgsfcp,
    Tempered,
    variant_pgf,
    variant_transition_rate,
)

FIG1 = RateMatrix([[0.5], [0.5, 0.5]])

NAMED_SPECS = [
    Stable(0.7),
    TemperedStable(0.6, 0.9),
    GammaSub(1.2, 0.8),
    InverseGaussian(1.1, 0.7),
]

VARIANT_FOR = {
    Stable: lambda s: Mgsfcp(s.alpha),
    TemperedStable: lambda s: Tempered(s.alpha, s.theta),
    GammaSub: lambda s: GammaTC(s.a, s.b),
    InverseGaussian: lambda s: IgTC(s.delta, s.gamma),
}


def custom_from(spec, declare=True):
    """Wrap a named clock's density as an opaque Custom measure."""
    rho = {Stable: 0.7, TemperedStable: 0.6, GammaSub: 0.0, InverseGaussian: 0.5}[
        type(spec)
    ]
    return Custom(
        density=lambda s: levy_density(spec, s),
        singularity_exponent=rho if declare else None,
    )


def sid(spec):
    return type(spec).__name__


class TestMeasureValidation:
    def test_named_rejects_non_levy(self):
        with pytest.raises(ValueError):
            Named(InverseStable(0.5))
        with pytest.raises(ValueError):
            Named("stable")

    def test_custom_param_checks(self):
        with pytest.raises(ValueError):
            Custom(lambda s: math.exp(-s), singularity_exponent=1.0)
        with pytest.raises(ValueError):
            Custom(lambda s: math.exp(-s), decay_rate=0.0)

    def test_custom_rejects_non_integrable_density(self):
        # s^(-2) fails int_0^1 s mu(ds)
        with pytest.raises(ValueError, match="integrable"):
            Custom(lambda s: s**-2.0, singularity_exponent=None)

    def test_custom_accepts_gamma_density(self):
        Custom(lambda s: math.exp(-s) / s, singularity_exponent=0.0, decay_rate=1.0)


@pytest.mark.parametrize("spec", NAMED_SPECS, ids=sid)
def test_bernstein_f_named_is_closed_form(spec):
    for s in (0.3, 1.0, 4.0):
        assert_allclose(
            bernstein_f(Named(spec), s), laplace_exponent(spec, s), rtol=1e-14
        )
    assert bernstein_f(Named(spec), 0.0) == 0.0
    with pytest.raises(ValueError):
        bernstein_f(Named(spec), -1.0)


@pytest.mark.parametrize("spec", NAMED_SPECS, ids=sid)
def test_bernstein_f_custom_reproduces_exponent(spec):
    m = custom_from(spec)
    for s in (0.3, 1.0, 4.0):
        assert_allclose(bernstein_f(m, s), laplace_exponent(spec, s), rtol=1e-8)


def test_bernstein_f_undeclared_exponent_probe():
    # no singularity hint: the probe (or tanh-sinh) has to cope alone
    spec = Stable(0.7)
    m = custom_from(spec, declare=False)
    assert_allclose(bernstein_f(m, 1.0), 1.0, rtol=1e-6)


@pytest.mark.parametrize("spec", NAMED_SPECS, ids=sid)
def test_g_lambda_u_matches_exponent_of_symbol(spec):
    ubar = (0.5, 0.7)
    w = pgf_symbol(FIG1, ubar)
    assert_allclose(
        g_lambda_u(FIG1, Named(spec), ubar),
        laplace_exponent(spec, w),
        rtol=1e-8,
    )
    assert g_lambda_u(FIG1, Named(spec), (1.0, 1.0)) == 0.0
    with pytest.raises(ValueError):
        g_lambda_u(FIG1, Named(spec), (1.5, 0.0))


@pytest.mark.parametrize("spec", NAMED_SPECS, ids=sid)
def test_transition_rate_matches_variant_formulas(spec):
    """Quadrature route vs the per-variant closed forms."""
    v = VARIANT_FOR[type(spec)](spec)
    m = Named(spec)
    for lbar in ((1, 0), (0, 1), (0, 2), (1, 1), (2, 2), (0, 4)):
        assert_allclose(
            tcgcp_transition_rate(FIG1, m, lbar),
            variant_transition_rate(v, FIG1, lbar),
            rtol=1e-7,
        )


def test_transition_rate_custom_measure():
    spec = GammaSub(1.2, 0.8)
    got = tcgcp_transition_rate(FIG1, custom_from(spec), (1, 1))
    want = variant_transition_rate(GammaTC(1.2, 0.8), FIG1, (1, 1))
    assert_allclose(got, want, rtol=1e-7)


def test_transition_rate_domain():
    m = Named(Stable(0.7))
    with pytest.raises(ValueError):
        tcgcp_transition_rate(FIG1, m, (0, 0))
    with pytest.raises(ValueError):
        tcgcp_transition_rate(FIG1, m, (1,))
    with pytest.raises(ValueError):
        tcgcp_transition_rate(FIG1, m, (-1, 1))


@pytest.mark.parametrize("spec", NAMED_SPECS, ids=sid)
def test_pgf_matches_variant_pgf(spec):
    v = VARIANT_FOR[type(spec)](spec)
    ubar = (0.4, 0.8)
    for t in (0.5, 1.5):
        assert_allclose(
            tcgcp_pgf(FIG1, Named(spec), ubar, t),
            variant_pgf(v, FIG1, ubar, t),
            rtol=1e-8,
        )
    assert tcgcp_pgf(FIG1, Named(spec), ubar, 0.0) == 1.0
    with pytest.raises(ValueError):
        tcgcp_pgf(FIG1, Named(spec), ubar, -1.0)


class TestFractionalPgf:
    def test_beta_one_is_exponential_path(self):
        m = Named(Stable(0.7))
        ubar = (0.4, 0.8)
        assert_allclose(
            tcgcp_pgf_fractional(FIG1, m, 1.0, ubar, 1.2),
            tcgcp_pgf(FIG1, m, ubar, 1.2),
            rtol=1e-14,
        )

    def test_mittag_leffler_of_exponent(self):
        m = Named(GammaSub(1.2, 0.8))
        ubar = (0.4, 0.8)
        beta, t = 0.6, 1.3
        g = g_lambda_u(FIG1, m, ubar)
        assert_allclose(
            tcgcp_pgf_fractional(FIG1, m, beta, ubar, t),
            mittag_leffler(beta, 1.0, 1.0, -(t**beta) * g),
            rtol=1e-12,
        )

    def test_domain(self):
        m = Named(Stable(0.7))
        with pytest.raises(ValueError):
            tcgcp_pgf_fractional(FIG1, m, 1.5, (0.5, 0.5), 1.0)
        with pytest.raises(ValueError):
            tcgcp_pgf_fractional(FIG1, m, 0.5, (0.5, 0.5), -1.0)
