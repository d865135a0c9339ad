import numpy as np
import pytest

from levymlmc import coeffs
from levymlmc._kernels import BACKEND, _core, _ref
from levymlmc._kernels import (
    coupled_nodes_batch,
    coupled_terminal_batch,
    euler_path_batch,
    linear_error_recursion,
)

CATALOGUE = [
    coeffs.constant(0.7),
    coeffs.linear(),
    coeffs.smooth_bump(0.3, 1.5, 0.8),
]


@pytest.fixture
def dy(rng):
    return 0.05 * rng.standard_normal((16, 24))


def test_compiled_backend_is_active():
    # the build in this repo compiles the extension; fallback remains usable
    # via LEVYMLMC_BACKEND=python
    assert BACKEND in ("c", "python")


@pytest.mark.skipif(_core is None, reason="compiled backend not built")
@pytest.mark.parametrize("coeff", CATALOGUE, ids=lambda c: c.kind_name)
def test_backends_agree(coeff, dy):
    x_c = _core.euler_path_batch(coeff.kind, *coeff.params, 0.2, dy)
    x_py = _ref.euler_path_batch(coeff, 0.2, dy)
    np.testing.assert_allclose(x_c, x_py, rtol=1e-12, atol=1e-14)

    nodes_c = _core.coupled_nodes_batch(coeff.kind, *coeff.params, 0.2, dy, 3)
    nodes_py = _ref.coupled_nodes_batch(coeff, 0.2, dy, 3)
    for a, b in zip(nodes_c, nodes_py):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    term_c = _core.coupled_terminal_batch(coeff.kind, *coeff.params, 0.2, dy, 3)
    term_py = _ref.coupled_terminal_batch(coeff, 0.2, dy, 3)
    for a, b in zip(term_c, term_py):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


@pytest.mark.skipif(_core is None, reason="compiled backend not built")
def test_linear_recursion_backends_agree(rng):
    a = 0.1 * rng.standard_normal((8, 50))
    b = 0.01 * rng.standard_normal((8, 50))
    np.testing.assert_allclose(
        _core.linear_error_recursion(a, b),
        _ref.linear_error_recursion(a, b),
        rtol=1e-12,
        atol=1e-16,
    )


def test_custom_coefficient_routes_to_fallback(dy):
    # a custom coefficient must work through the dispatching API
    c = coeffs.custom(f=lambda x: np.sin(x), fp=lambda x: np.cos(x), lipschitz_const=1.0)
    x = euler_path_batch(c, 0.0, dy)
    expected = _ref.euler_path_batch(c, 0.0, dy)
    np.testing.assert_array_equal(x, expected)


def test_constant_coefficient_closed_form(dy):
    c = coeffs.constant(2.5)
    x = euler_path_batch(c, 1.0, dy)
    np.testing.assert_allclose(
        x, 1.0 + 2.5 * np.concatenate([np.zeros((16, 1)), np.cumsum(dy, axis=1)], axis=1),
        rtol=1e-13,
        atol=1e-15,
    )


def test_terminal_matches_nodes(dy):
    c = coeffs.smooth_bump(0.0, 2.0, 1.0)
    xf, xc, u = coupled_nodes_batch(c, 0.1, dy, 4)
    xf_t, xc_t, u_t = coupled_terminal_batch(c, 0.1, dy, 4)
    np.testing.assert_allclose(xf[:, -1], xf_t, rtol=1e-13)
    np.testing.assert_allclose(xc[:, -1], xc_t, rtol=1e-13)
    np.testing.assert_allclose(u[:, -1], u_t, rtol=1e-13, atol=1e-16)


def test_linear_recursion_closed_form():
    # constant a, b: U_{j+1} = (1+a) U_j + b has the geometric closed form
    a = np.full((1, 30), 0.02)
    b = np.full((1, 30), 0.001)
    u = linear_error_recursion(a, b)
    j = np.arange(31)
    expected = 0.001 * ((1.02**j - 1.0) / 0.02)
    np.testing.assert_allclose(u[0], expected, rtol=1e-12)


def test_cell_count_must_divide(dy):
    with pytest.raises(ValueError):
        coupled_nodes_batch(coeffs.linear(), 0.0, dy[:, :23], 4)
