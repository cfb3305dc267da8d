"""Oracle tests: closed-form constants, exact moments, quadrature identities.

Golden values were produced by the quadrature oracle itself in a separate
session and frozen here at 1e-9; they guard against regressions in the
integration scheme, not against the formulas (those have independent checks
below, e.g. the gamma-function cross-check for the Exp law).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lenglart.oracles import (
    ConstantKind,
    ExpLaw,
    IdentityReport,
    PointMassLaw,
    TruncatedParetoLaw,
    UniformLaw,
    check_moment_identities,
    constant,
    full_extremal_sup_moment,
    gtilde_sup_moment,
    lambda_bound,
    moment_identity_law,
    xtilde_sup_moment,
    y_sup_moment,
)

P_GRID = [0.05, 0.1, 0.25, 0.5, 0.7071, 0.9, 0.99]

# frozen golden values (quadrature oracle, tolerance 1e-9)
GOLDEN_GTILDE = {
    (0.5, 5.0): 4.025654951880698,
    (0.5, 10.0): 7.561196883233899,
    (0.5, 40.0): 28.7744003191906,
}


class TestConstants:
    def test_headline_values(self):
        assert constant(ConstantKind.LENGLART, 0.5) == pytest.approx(
            2.0 * math.sqrt(2.0), abs=1e-12
        )
        assert constant(ConstantKind.MONOTONE, 0.5) == pytest.approx(
            math.sqrt(2.0), abs=1e-12
        )
        assert constant(ConstantKind.PRATELLI_POWER, 0.5) == pytest.approx(2.0, abs=1e-12)
        assert constant(ConstantKind.LENGLART_ORIGINAL, 0.5) == pytest.approx(3.0, abs=1e-12)

    @pytest.mark.parametrize("p", P_GRID)
    def test_lenglart_monotone_identity(self, p):
        assert constant(ConstantKind.LENGLART, p) == pytest.approx(
            constant(ConstantKind.MONOTONE, p) / (1.0 - p), abs=1e-12
        )

    @pytest.mark.parametrize("p", P_GRID)
    def test_improvement_chain(self, p):
        mono = constant(ConstantKind.MONOTONE, p)
        pratelli = constant(ConstantKind.PRATELLI_POWER, p)
        leng = constant(ConstantKind.LENGLART, p)
        assert mono <= pratelli <= leng

    def test_limits_near_one(self):
        assert constant(ConstantKind.MONOTONE, 0.99) == pytest.approx(1.0, abs=0.05)
        assert constant(ConstantKind.MONOTONE, 0.999) == pytest.approx(1.0, abs=0.01)
        assert constant(ConstantKind.LENGLART, 0.999) > 900.0

    @pytest.mark.parametrize("p", [-0.1, 0.0, 1.0, 1.5])
    def test_rejects_bad_p(self, p):
        with pytest.raises(ValueError, match="p must lie"):
            constant(ConstantKind.LENGLART, p)


class TestLambdaBound:
    def test_at_lambda_equals_p(self):
        for p in P_GRID:
            assert lambda_bound(p, p) == pytest.approx(p ** (-p), abs=1e-12)

    def test_direct_substitution(self):
        assert lambda_bound(0.5, 1.0) == pytest.approx(1.5, abs=1e-12)

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_grid_argmin_is_p(self, p):
        lams = np.arange(1e-4, 3.0 + 1e-4, 1e-4)
        vals = lams ** (-p) * (lams + 1.0 - p)
        i = int(np.argmin(vals))
        assert abs(lams[i] - p) <= 1e-4 + 1e-12
        assert vals[i] == pytest.approx(p ** (-p), abs=1e-8)

    @given(
        p=st.floats(0.05, 0.95),
        lam=st.floats(1e-3, 10.0),
    )
    def test_p_is_global_minimizer(self, p, lam):
        assert lambda_bound(p, lam) >= lambda_bound(p, p) - 1e-12

    def test_rejects_bad_lambda(self):
        with pytest.raises(ValueError, match="lambda"):
            lambda_bound(0.5, 0.0)


class TestExactMoments:
    def test_xtilde_is_t(self):
        assert xtilde_sup_moment(0.5, 0.0) == 0.0
        assert xtilde_sup_moment(0.5, 5.0) == 5.0
        assert xtilde_sup_moment(0.3, 17.25) == 17.25

    def test_y_moment(self):
        assert y_sup_moment(0.5, 0.0) == 0.0
        assert y_sup_moment(0.5, 1.0) == pytest.approx(2.0, abs=1e-12)
        assert y_sup_moment(0.5, 4.0) == pytest.approx(4.0, abs=1e-12)

    def test_full_extremal(self):
        assert full_extremal_sup_moment(0.5, 10) == pytest.approx(20.0, abs=1e-12)
        assert full_extremal_sup_moment(0.5, 1) == pytest.approx(2.0, abs=1e-12)

    @given(p=st.floats(0.05, 0.95), n=st.integers(1, 100))
    def test_full_extremal_tower_identity(self, p, n):
        # n/(1-p) equals the y-law tower over the jump level
        assert full_extremal_sup_moment(p, n) == pytest.approx(
            xtilde_sup_moment(p, n) / (1.0 - p), rel=1e-12
        )

    def test_rejects_negative_arguments(self):
        with pytest.raises(ValueError):
            xtilde_sup_moment(0.5, -1.0)
        with pytest.raises(ValueError):
            y_sup_moment(0.5, -1.0)
        with pytest.raises(ValueError):
            full_extremal_sup_moment(0.5, 0)


class TestGtilde:
    def test_zero_horizon(self):
        assert gtilde_sup_moment(0.5, 0.0) == 0.0

    @pytest.mark.parametrize(("key", "value"), sorted(GOLDEN_GTILDE.items()))
    def test_golden_values(self, key, value):
        p, t = key
        assert gtilde_sup_moment(p, t) == pytest.approx(value, abs=1e-9)

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("t", [0.5, 1.0, 5.0, 10.0])
    def test_upper_bound(self, p, t):
        assert gtilde_sup_moment(p, t) <= p**p * (t + 1.0) * (1.0 + 1e-12)

    @settings(max_examples=25, deadline=None)
    @given(p=st.floats(0.1, 0.9), t=st.floats(0.1, 10.0))
    def test_monotone_in_t(self, p, t):
        assert gtilde_sup_moment(p, t + 0.5) >= gtilde_sup_moment(p, t)


class TestMomentIdentities:
    def test_uniform_value(self):
        report = check_moment_identities(UniformLaw(), 0.5)
        for v in (report.direct, report.via_tail_integral, report.via_truncated_mean):
            assert v == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert report.max_discrepancy < 1e-8

    def test_exp_matches_gamma_function(self):
        # independent closed form: E[Z^p] = Gamma(1+p) for Z ~ Exp(1)
        for p in (0.3, 0.5, 0.7):
            report = check_moment_identities(ExpLaw(), p)
            assert report.direct == pytest.approx(math.gamma(1.0 + p), abs=1e-8)
            assert report.max_discrepancy < 1e-8

    def test_point_mass_exact(self):
        report = check_moment_identities(PointMassLaw(2.5), 0.5)
        assert report.direct == pytest.approx(2.5**0.5, abs=1e-10)
        assert report.max_discrepancy < 1e-8

    def test_truncated_pareto(self):
        report = check_moment_identities(TruncatedParetoLaw(alpha=2.0, cap=1e6), 0.5)
        assert report.max_discrepancy < 1e-8

    @settings(max_examples=20, deadline=None)
    @given(
        p=st.floats(0.1, 0.9),
        law=st.sampled_from(["uniform", "exp", "point"]),
    )
    def test_identities_agree_for_random_p(self, p, law):
        report = check_moment_identities(moment_identity_law(law, 1.7), p)
        assert report.max_discrepancy < 1e-8

    def test_report_json_shape(self):
        report = check_moment_identities(UniformLaw(), 0.5)
        d = report.to_json()
        assert set(d) == {
            "law", "p", "direct", "via_tail_integral", "via_truncated_mean",
            "max_discrepancy",
        }
        assert isinstance(report, IdentityReport)

    def test_unknown_law_rejected(self):
        with pytest.raises(ValueError, match="unknown law"):
            moment_identity_law("cauchy")

    def test_pareto_needs_finite_mean(self):
        with pytest.raises(ValueError, match="tail index"):
            TruncatedParetoLaw(alpha=1.0)


class TestLawSampling:
    @pytest.mark.parametrize("name", ["uniform", "exp", "point", "pareto"])
    def test_empirical_sf_matches(self, name):
        law = moment_identity_law(name, 1.0)
        rng = np.random.Generator(np.random.Philox(key=11))
        draws = law.sample(rng, 200_000)
        for z in (0.25, 0.8, 1.5, 3.0):
            target = law.sf(z)
            emp = float((draws >= z).mean())
            se = math.sqrt(max(target * (1 - target), 1e-12) / draws.size)
            assert abs(emp - target) <= max(4.0 * se, 1e-3)
