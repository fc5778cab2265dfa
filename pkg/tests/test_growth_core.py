import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satgrowth import (
    DomainError,
    GrowthParams,
    SolutionSpec,
    bracket_terms,
    closed_form,
    constant_from_initial,
    growth_rate,
    nonlinear_timescale,
    saturation_report,
    saturation_value,
)


class TestGrowthParams:
    def test_alpha_zero_rejected(self):
        with pytest.raises(DomainError):
            GrowthParams(0.0, 0.1, 1e-3)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(DomainError):
            GrowthParams(1.0, bad, 1e-3)

    def test_negative_eta_rejected(self):
        with pytest.raises(DomainError):
            GrowthParams(1.0, 0.1, -1e-3)

    def test_negative_alpha_warns(self):
        with pytest.warns(RuntimeWarning):
            GrowthParams(-1.0, 0.1, 1e-3)

    def test_negative_c_needs_odd_integer_alpha(self):
        SolutionSpec(GrowthParams(1.0, 0.1, 1e-3), -2.0)
        with pytest.raises(DomainError):
            SolutionSpec(GrowthParams(2.0, 0.1, 1e-3), -2.0)


class TestGrowthRate:
    def test_zero_at_saturation(self):
        assert growth_rate(GrowthParams(1.0, 0.145, 1e-5), 1e5) == pytest.approx(0.0, abs=1e-9)

    def test_exponential_limit(self):
        assert growth_rate(GrowthParams(1.0, 0.5, 0.0), 2.0) == 1.0

    def test_half_saturation(self):
        # 0.145 * 5e4 * (1 - 0.5)
        assert growth_rate(GrowthParams(1.0, 0.145, 1e-5), 5e4) == pytest.approx(3625.0, rel=1e-14)

    def test_zero_is_fixed_point(self):
        assert growth_rate(GrowthParams(0.5, 0.2, 1e-2), 0.0) == 0.0

    def test_vectorized(self):
        out = growth_rate(GrowthParams(1.0, 1.0, 1.0), np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(out, [0.0, 0.25, 0.0])

    def test_negative_phi_non_integer_alpha(self):
        with pytest.raises(DomainError):
            growth_rate(GrowthParams(0.5, 0.1, 1e-3), -1.0)

    def test_non_finite_phi(self):
        with pytest.raises(DomainError):
            growth_rate(GrowthParams(1.0, 0.1, 1e-3), math.nan)


class TestClosedForm:
    def test_exponential_at_origin(self):
        spec = SolutionSpec(GrowthParams(1.0, 0.1, 0.0), 3.0)
        assert closed_form(spec, 0.0) == pytest.approx(3.0, rel=1e-15)

    def test_asymptote(self, cumulative_params):
        spec = SolutionSpec(cumulative_params, 1.0)
        assert closed_form(spec, math.inf) == pytest.approx(2e6, rel=1e-14)

    def test_regression_pin(self, cumulative_params):
        # 50-digit mpmath evaluation of [5e-7 + exp(-15)]**-1
        expected = 1240845.1676591670723
        assert closed_form(SolutionSpec(cumulative_params, 1.0), 100.0) == pytest.approx(expected, rel=1e-13)

    def test_non_positive_bracket(self):
        # decaying from above: the bracket crosses zero in the past
        spec = SolutionSpec(GrowthParams(1.0, 0.1, 1e-2), -1.0)
        with pytest.raises(DomainError, match="eta"):
            closed_form(spec, 0.0)

    def test_decay_from_above(self):
        p = GrowthParams(1.0, 0.3, 1e-2)
        c = constant_from_initial(p, 250.0, 0.0)
        assert c < 0
        vals = closed_form(SolutionSpec(p, c), np.linspace(0, 40, 50))
        assert vals[0] == pytest.approx(250.0, rel=1e-12)
        assert np.all(np.diff(vals) < 0)
        assert np.all(vals > 100.0)

    def test_verhulst_reduction(self):
        lam, eta, c = 0.2, 1e-3, 5.0
        t = np.linspace(0, 100, 201)
        K, A = 1 / eta, 1 / (eta * c)
        textbook = K / (1 + A * np.exp(-lam * t))
        np.testing.assert_allclose(closed_form(SolutionSpec(GrowthParams(1.0, lam, eta), c), t), textbook, rtol=1e-13)


class TestConstantFromInitial:
    def test_half_saturation(self):
        eta = 1e-4
        c = constant_from_initial(GrowthParams(1.0, 0.2, eta), 0.5 / eta, 0.0)
        assert c == pytest.approx(1 / eta, rel=1e-13)

    def test_exponential(self):
        assert constant_from_initial(GrowthParams(1.0, 0.2, 0.0), 5.0, 0.0) == pytest.approx(5.0, rel=1e-15)

    def test_at_saturation_is_infinite(self):
        assert constant_from_initial(GrowthParams(1.0, 0.2, 0.5), 2.0, 0.0) == math.inf

    def test_infinite_c_sits_at_ceiling(self):
        spec = SolutionSpec(GrowthParams(1.0, 0.2, 0.5), math.inf)
        np.testing.assert_allclose(closed_form(spec, [0.0, 10.0]), 2.0)

    @pytest.mark.parametrize("phi0", [0.0, -1.0])
    def test_non_positive(self, phi0):
        with pytest.raises(DomainError):
            constant_from_initial(GrowthParams(1.0, 0.2, 1e-3), phi0, 0.0)

    def test_above_saturation_even_alpha(self):
        with pytest.raises(DomainError):
            constant_from_initial(GrowthParams(2.0, 0.2, 1.0), 5.0, 0.0)

    @settings(max_examples=200, deadline=None)
    @given(
        alpha=st.floats(0.2, 4.0),
        lam=st.floats(0.01, 1.0),
        log_eta=st.floats(-15, 0),
        frac=st.floats(1e-6, 0.999),
        t0=st.floats(-50, 50),
    )
    def test_round_trip(self, alpha, lam, log_eta, frac, t0):
        p = GrowthParams(alpha, lam, 10.0**log_eta)
        phi0 = frac * saturation_value(p)
        c = constant_from_initial(p, phi0, t0)
        assert closed_form(SolutionSpec(p, c), t0) == pytest.approx(phi0, rel=1e-12)


class TestSaturation:
    def test_annual_revenue_ceiling(self):
        # about 100 billion dollars, in millions
        assert saturation_value(GrowthParams(1.0, 0.145, 1e-5)) == pytest.approx(1e5, rel=1e-12)

    def test_headcount_ceiling(self):
        assert saturation_value(GrowthParams(1.0, 0.09, 2e-6)) == pytest.approx(5e5, rel=1e-12)

    def test_non_unit_alpha(self):
        assert saturation_value(GrowthParams(2.0, 0.1, 4.0)) == 0.5

    def test_unbounded_marker(self):
        rep = saturation_report(SolutionSpec(GrowthParams(1.0, 0.1, 0.0), 1.0))
        assert rep.unbounded and rep.t_nl is None


class TestNonlinearTimescale:
    def test_log_of_unity(self):
        assert nonlinear_timescale(SolutionSpec(GrowthParams(1.0, 0.3, 0.25), 4.0)) == 0.0

    def test_value(self):
        # -(0.1)**-1 * ln(1e-4)
        t_nl = nonlinear_timescale(SolutionSpec(GrowthParams(1.0, 0.1, 1e-4), 1.0))
        assert t_nl == pytest.approx(92.10340371976183, rel=1e-13)

    def test_undefined_without_saturation(self):
        assert nonlinear_timescale(SolutionSpec(GrowthParams(1.0, 0.1, 0.0), 1.0)) is None

    def test_window_for_cumulative_parameters(self, cumulative_params):
        # t_nl = -ln(eta*c)/lam lands in [70, 85] years only for c within
        # [exp(-12.75), exp(-10.5)] / eta
        lo, hi = math.exp(-0.15 * 85) / 5e-7, math.exp(-0.15 * 70) / 5e-7
        assert nonlinear_timescale(SolutionSpec(cumulative_params, lo)) == pytest.approx(85.0, rel=1e-12)
        assert nonlinear_timescale(SolutionSpec(cumulative_params, hi)) == pytest.approx(70.0, rel=1e-12)

    def test_decay_branch_uses_absolute_value(self):
        p = GrowthParams(1.0, 0.3, 1e-2)
        spec = SolutionSpec(p, constant_from_initial(p, 250.0, 0.0))
        eta_term, transient = bracket_terms(spec, nonlinear_timescale(spec))
        assert abs(transient) == pytest.approx(eta_term, rel=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(
        alpha=st.floats(0.2, 4.0),
        lam=st.floats(0.01, 1.0),
        log_eta=st.floats(-12, -1),
        log_c=st.floats(-3, 6),
    )
    def test_equipartition(self, alpha, lam, log_eta, log_c):
        spec = SolutionSpec(GrowthParams(alpha, lam, 10.0**log_eta), 10.0**log_c)
        eta_term, transient = bracket_terms(spec, nonlinear_timescale(spec))
        assert transient == pytest.approx(eta_term, rel=1e-9)


def _spec_strategy():
    return st.builds(
        lambda a, lam, le, frac: (a, lam, 10.0**le, frac),
        st.floats(0.5, 3.0),
        st.floats(0.02, 0.3),
        st.floats(-8, -2),
        st.floats(1e-4, 0.5),
    )


@settings(max_examples=100, deadline=None)
@given(_spec_strategy())
def test_ode_consistency(args):
    alpha, lam, eta, frac = args
    p = GrowthParams(alpha, lam, eta)
    spec = SolutionSpec(p, constant_from_initial(p, frac * saturation_value(p), 0.0))
    t = np.linspace(0.0, 150.0, 61)
    h = 1e-5
    fd = (closed_form(spec, t + h) - closed_form(spec, t - h)) / (2 * h)
    phi = closed_form(spec, t)
    rate = growth_rate(p, phi)
    # measured against the linear-growth scale lam*phi; deep in saturation
    # the rate itself is below the finite difference's rounding floor
    assert np.all(np.abs(fd - rate) <= 1e-6 * lam * phi)
    well_conditioned = np.abs(rate) >= 1e-3 * lam * phi
    np.testing.assert_allclose(fd[well_conditioned], rate[well_conditioned], rtol=1e-6)


@settings(max_examples=100, deadline=None)
@given(_spec_strategy())
def test_monotone_bounded_asymptote(args):
    alpha, lam, eta, frac = args
    p = GrowthParams(alpha, lam, eta)
    phi_sat = saturation_value(p)
    spec = SolutionSpec(p, constant_from_initial(p, frac * phi_sat, 0.0))
    t = np.linspace(0.0, 400.0, 801)
    phi = closed_form(spec, t)
    gap = phi_sat - phi
    # once the gap drops below one ulp the value rounds onto the ceiling
    resolvable = gap > 1e-12 * phi_sat
    assert np.all(gap >= 0)
    assert np.all(phi[resolvable] < phi_sat)
    assert np.all(np.diff(gap) <= 0)
    assert np.all(np.diff(phi)[resolvable[1:]] > 0)
    t_check = nonlinear_timescale(spec) + 10.0 / (alpha * lam)
    assert phi_sat - closed_form(spec, t_check) < 1e-4 * phi_sat
