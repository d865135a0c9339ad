import numpy as np
import pytest

from levymlmc import coeffs
from levymlmc.euler import (
    compute_z_diag,
    decomposition_residual,
    euler_coarse_interp,
    euler_fine,
    gronwall_bound,
    multilevel_error,
)
from levymlmc.measure import TwoSidedStable
from levymlmc.paths import sample_path
from levymlmc.scheme import GridSpec

from conftest import fabricate_case


def brute_force_coupled(f, dy, m, x0):
    """Independent nested-loop reference for both schemes on plain Python
    floats; deliberately avoids the kernel code paths."""
    big_l = len(dy)
    n = big_l // m
    y = [0.0]
    for d in dy:
        y.append(y[-1] + d)
    x_fine = [x0]
    for j in range(big_l):
        x_fine.append(x_fine[-1] + f(x_fine[-1]) * dy[j])
    x_coarse_nodes = [x0]
    for i in range(n):
        inc = y[(i + 1) * m] - y[i * m]
        x_coarse_nodes.append(x_coarse_nodes[-1] + f(x_coarse_nodes[-1]) * inc)
    x_coarse = []
    for j in range(big_l + 1):
        i = min(j // m, n - 1) if big_l else 0
        if j == big_l:
            x_coarse.append(x_coarse_nodes[n])
        else:
            base = x_coarse_nodes[j // m]
            x_coarse.append(base + f(base) * (y[j] - y[(j // m) * m]))
    u = [c - fi for c, fi in zip(x_coarse, x_fine)]
    return np.array(x_fine), np.array(x_coarse), np.array(u)


def make_path(model=None, n=8, m=2, beta=0.1, seed=7, mode="gaussian-remainder"):
    model = model or TwoSidedStable(0.75, 1.0, 1.0)
    grid = GridSpec(n, m)
    case = fabricate_case(model, beta, n, m, u_nm=float(n * m) / max(m - 1, 1))
    gen = np.random.default_rng(seed)
    return model, sample_path(model, case, grid, mode, gen)


class TestSchemes:
    def test_constant_coefficient_is_shifted_path(self):
        _, path = make_path()
        c = coeffs.constant(2.0)
        xf = euler_fine(c, path, 1.5)
        np.testing.assert_allclose(xf, 1.5 + 2.0 * path.y_at_nodes, rtol=1e-13, atol=1e-14)
        # constant coefficient kills the level difference entirely
        res = multilevel_error(c, path, 1.5)
        assert np.all(res.u_err == 0.0)
        assert np.all(res.z_diag == 0.0)

    def test_linear_coefficient_product_formula(self):
        _, path = make_path(n=4, m=3)
        lin = coeffs.linear()
        xf = euler_fine(lin, path, 2.0)
        np.testing.assert_allclose(
            xf, 2.0 * np.cumprod(np.concatenate([[1.0], 1.0 + path.y_incr])), rtol=1e-12
        )

    def test_zero_increment_path_is_constant(self):
        model, path = make_path()
        frozen = type(path)(
            grid=path.grid,
            case=path.case,
            mode=path.mode,
            cells=type(path.cells)(
                n_cells=path.cells.n_cells,
                beta=path.cells.beta,
                drift_incr=0.0,
                counts=np.zeros_like(path.cells.counts),
                jump_offsets=np.zeros_like(path.cells.jump_offsets),
                jump_times=np.empty(0),
                jump_sizes=np.empty(0),
                small_incr=np.zeros_like(path.cells.small_incr),
                y_incr=np.zeros_like(path.cells.y_incr),
                y_nodes=np.zeros_like(path.cells.y_nodes),
            ),
        )
        bump = coeffs.smooth_bump(0.0, 1.0, 1.0)
        assert np.all(euler_fine(bump, frozen, 0.3) == 0.3)
        assert np.all(euler_coarse_interp(bump, frozen, 0.3) == 0.3)

    def test_degenerate_refinement_has_no_error(self):
        _, path = make_path(n=6, m=1)
        bump = coeffs.smooth_bump(0.2, 1.0, 0.7)
        res = multilevel_error(bump, path, 0.1)
        np.testing.assert_allclose(res.u_err, 0.0, atol=1e-16)

    def test_two_cell_hand_formula(self):
        _, path = make_path(n=1, m=2)
        d1, d2 = path.y_incr
        lin = coeffs.linear()
        res = multilevel_error(lin, path, 1.7)
        assert res.x_fine[-1] == pytest.approx(1.7 * (1 + d1) * (1 + d2), rel=1e-14)
        assert res.x_coarse[-1] == pytest.approx(1.7 * (1 + d1 + d2), rel=1e-14)
        assert res.u_err[-1] == pytest.approx(-1.7 * d1 * d2, rel=1e-11)


class TestBruteForceOracle:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize(
        "coeff",
        [coeffs.linear(), coeffs.smooth_bump(0.3, 2.0, 1.1), coeffs.constant(0.8)],
        ids=lambda c: c.kind_name,
    )
    def test_matches_reference(self, n, m, coeff):
        gen = np.random.default_rng(1000 * n + m)
        dy = 0.3 * gen.standard_normal(n * m)
        _, path = make_path(n=n, m=m, seed=0)
        patched = type(path.cells)(
            n_cells=n * m,
            beta=path.cells.beta,
            drift_incr=0.0,
            counts=np.zeros(n * m, dtype=np.int64),
            jump_offsets=np.zeros(n * m + 1, dtype=np.int64),
            jump_times=np.empty(0),
            jump_sizes=np.empty(0),
            small_incr=dy.copy(),
            y_incr=dy.copy(),
            y_nodes=np.concatenate([[0.0], np.cumsum(dy)]),
        )
        path = type(path)(grid=GridSpec(n, m), case=path.case, mode=path.mode, cells=patched)
        res = multilevel_error(coeff, path, 0.4)
        scalar_f = lambda x: float(coeff.f(np.array([x]))[0])
        xf_ref, xc_ref, u_ref = brute_force_coupled(scalar_f, dy, m, 0.4)
        assert np.max(np.abs(res.x_fine - xf_ref)) < 1e-13
        assert np.max(np.abs(res.x_coarse - xc_ref)) < 1e-13
        assert np.max(np.abs(res.u_err - u_ref)) < 1e-13


class TestDecompositionIdentity:
    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_identity_on_random_paths(self, m):
        model = TwoSidedStable(0.75, 2.0, 1.0, drift_b=0.1)
        bump = coeffs.smooth_bump(0.1, 1.5, 0.9)
        for seed in range(20):
            _, path = make_path(model=model, n=8, m=m, beta=0.05, seed=seed)
            res = multilevel_error(bump, path, 0.2)
            assert decomposition_residual(bump, path, res) < 1e-12

    def test_linear_z_is_cross_product_sum(self):
        _, path = make_path(n=3, m=2, seed=11)
        lin = coeffs.linear()
        res = multilevel_error(lin, path, 1.0)
        # G(x, y) = x y for the identity coefficient
        dy = path.y_incr.reshape(3, 2)
        y = path.y_at_nodes
        expected = np.zeros(4)
        for i in range(3):
            x_block = res.x_coarse[2 * i]
            gap = y[2 * i + 1] - y[2 * i]
            expected[i + 1] = expected[i] + x_block * gap * dy[i, 1]
        np.testing.assert_allclose(res.z_diag, expected, rtol=1e-12, atol=1e-16)

    def test_z_diag_zero_for_constant(self):
        _, path = make_path()
        res = multilevel_error(coeffs.constant(3.0), path, 0.0)
        assert np.all(res.z_diag == 0.0)


class TestGronwall:
    def test_error_dominated_by_bound(self):
        model = TwoSidedStable(0.75, 1.0, 1.0)
        bump = coeffs.smooth_bump(0.3, 1.0, 1.0)
        for seed in range(10):
            _, path = make_path(model=model, n=16, m=2, beta=0.05, seed=seed)
            res = multilevel_error(bump, path, 0.3)
            bound = gronwall_bound(bump, path, res)
            assert np.all(np.abs(res.u_err) <= bound * (1 + 1e-10) + 1e-14)


class TestZDiagDirect:
    def test_consistency_with_multilevel_error(self):
        _, path = make_path(n=5, m=3, seed=3)
        bump = coeffs.smooth_bump(0.0, 2.0, 1.0)
        res = multilevel_error(bump, path, 0.1)
        xc = euler_coarse_interp(bump, path, 0.1)
        np.testing.assert_array_equal(res.x_coarse, xc)
        np.testing.assert_array_equal(res.z_diag, compute_z_diag(bump, path, xc))
