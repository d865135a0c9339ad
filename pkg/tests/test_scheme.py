import math
from fractions import Fraction

import numpy as np
import pytest

from levymlmc.measure import TwoSidedStable
from levymlmc.scheme import (
    GridSpec,
    RegimeError,
    classify_case,
    make_case_params,
    rate_and_cutoff,
)


class TestGridSpec:
    def test_node_identity_is_integer_exact(self):
        g = GridSpec(7, 3)
        for i in range(1, 7):
            assert g.node_index(i, g.m + 1) == g.node_index(i + 1, 1)
            assert g.node_fraction(i, g.m + 1) == g.node_fraction(i + 1, 1)

    def test_node_times(self):
        g = GridSpec(4, 2)
        assert g.node_time(1, 1) == 0.0
        assert g.node_time(1, 3) == 0.25
        assert g.node_fraction(3, 2) == Fraction(5, 8)
        assert g.node_times()[-1] == 1.0

    def test_eta_projections_fix_grid_nodes(self):
        g = GridSpec(5, 4)
        for i in range(1, 6):
            for k in range(1, 6):
                t = g.node_time(i, k)
                assert g.eta_fine(t) == t
        assert g.eta_coarse(0.55) == pytest.approx(0.4)

    def test_degenerate_refinement_allowed(self):
        g = GridSpec(3, 1)
        assert g.n_cells == 3

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            GridSpec(0, 2)
        with pytest.raises(ValueError):
            GridSpec(4, 0)


class TestClassifyCase:
    def test_drifting_low_activity(self):
        m = TwoSidedStable(0.5, 1.0, 0.0, drift_b=0.0)
        assert m.d_zero() != 0.0
        assert classify_case(m, 0.5, symmetric=False, b_zero=True) == "C1"

    def test_high_activity_always_c5(self):
        m = TwoSidedStable(1.5, 1.0, 1.0)
        assert classify_case(m, 1.5, symmetric=True, b_zero=True) == "C5"
        m2 = TwoSidedStable(1.5, 2.0, 1.0, drift_b=0.3)
        assert classify_case(m2, 1.5, symmetric=False, b_zero=False) == "C5"

    def test_alpha_one_split_by_symmetry(self):
        sym = TwoSidedStable(1.0, 1.0, 1.0)
        asym = TwoSidedStable(1.0, 2.0, 1.0)
        assert classify_case(sym, 1.0, symmetric=True, b_zero=True) == "C4"
        assert classify_case(asym, 1.0, symmetric=False, b_zero=True) == "C3"

    def test_symmetric_driftless_low_activity(self):
        m = TwoSidedStable(0.75, 1.0, 1.0, drift_b=0.0)
        assert classify_case(m, 0.75, symmetric=True, b_zero=True) == "C2"

    def test_unclassifiable_configuration(self):
        # alpha < 1, asymmetric, with b tuned so d = 0: outside the table
        asym = TwoSidedStable(0.5, 2.0, 1.0, drift_b=0.0)
        d = asym.d_zero()
        tuned = TwoSidedStable(0.5, 2.0, 1.0, drift_b=-d)
        assert tuned.d_zero() == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(RegimeError):
            classify_case(tuned, 0.5, symmetric=False, b_zero=False)

    def test_flag_consistency_enforced(self):
        m = TwoSidedStable(1.0, 1.0, 1.0)
        with pytest.raises(RegimeError):
            classify_case(m, 1.0, symmetric=False, b_zero=True)


class TestRateAndCutoff:
    def test_c1_plug(self):
        u, beta = rate_and_cutoff("C1", 100, 2, 0.5)
        assert u == pytest.approx(200.0)
        assert beta == pytest.approx(math.log(100.0) ** 2 / 100.0)
        assert beta == pytest.approx(0.21207, rel=1e-4)

    def test_c4_plug(self):
        u, beta = rate_and_cutoff("C4", 20, 2, 1.0)
        assert u == pytest.approx(40.0 / math.log(20.0))
        assert u == pytest.approx(13.3523, rel=1e-4)
        assert beta == pytest.approx(math.log(20.0) / 20.0)
        assert beta == pytest.approx(0.149787, rel=1e-4)

    def test_c2_c3_c5_formulas(self):
        n, m, a = 64, 3, 0.75
        ln = math.log(n)
        u, beta = rate_and_cutoff("C2", n, m, a)
        assert u == pytest.approx((m * n / ((m - 1) * ln)) ** (1 / a))
        assert beta == pytest.approx((ln / n) ** (1 / a))
        u, beta = rate_and_cutoff("C3", n, m, 1.0)
        assert u == pytest.approx(m * n / ((m - 1) * ln**2))
        assert beta == pytest.approx(ln / n)
        n5 = 256  # the C5 cutoff formula only drops below 1 around n ~ 100
        ln5 = math.log(n5)
        u, beta = rate_and_cutoff("C5", n5, m, 1.5)
        assert u == pytest.approx((m * n5 / ((m - 1) * ln5)) ** (1 / 1.5))
        assert beta == pytest.approx(ln5 / n5 ** (1 / 3.0))

    def test_cutoff_clamped_with_warning(self):
        # C5 at small n is the regime whose cutoff formula exceeds 1
        with pytest.warns(UserWarning, match="clamping"):
            _, beta = rate_and_cutoff("C5", 16, 2, 1.5)
        assert beta == 1.0

    def test_preconditions(self):
        with pytest.raises(ValueError):
            rate_and_cutoff("C1", 2, 2, 0.5)
        with pytest.raises(ValueError):
            rate_and_cutoff("C1", 10, 1, 0.5)
        with pytest.raises(ValueError):
            rate_and_cutoff("C9", 10, 2, 0.5)

    @pytest.mark.parametrize(
        "case,alpha",
        [("C1", 0.5), ("C2", 0.75), ("C3", 1.0), ("C4", 1.0), ("C5", 1.5)],
    )
    def test_asymptotic_direction(self, case, alpha):
        # u grows, the cutoff shrinks and the per-cell intensity fades (only
        # logarithmically in the alpha <= 1 symmetric regimes)
        model = TwoSidedStable(alpha, 1.0, 1.0)
        ns = [2**j for j in range(8, 17)]
        us, betas, lams = [], [], []
        for n in ns:
            cp = make_case_params(model, case, n, 2, alpha)
            us.append(cp.u_nm)
            betas.append(cp.beta_n)
            lams.append(cp.lambda_nm)
        assert all(u2 > u1 for u1, u2 in zip(us, us[1:]))
        assert all(b2 < b1 for b1, b2 in zip(betas, betas[1:]))
        assert all(l2 < l1 for l1, l2 in zip(lams[-5:], lams[-4:]))
        assert lams[-1] < min(lams[0], 0.2)


class TestMakeCaseParams:
    def test_lambda_matches_tail_over_cells(self):
        model = TwoSidedStable(1.0, 1.0, 1.0)
        cp = make_case_params(model, "C4", 64, 2, 1.0)
        assert cp.lambda_nm == pytest.approx(model.theta(cp.beta_n) / 128.0, rel=1e-14)
        assert cp.theta == 2.0
        assert cp.theta_prime == 0.0

    def test_d_const_for_low_activity(self):
        model = TwoSidedStable(0.5, 1.0, 0.0)
        cp = make_case_params(model, "C1", 64, 2, 0.5)
        # d = -integral of x F(dx) over (0, 1] = -alpha theta+/(1-alpha)
        assert cp.d_const == pytest.approx(-1.0, rel=1e-14)
        assert not np.isnan(cp.d_const)
