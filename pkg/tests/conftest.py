import numpy as np
import pytest

from levymlmc.scheme import CaseParams


def fabricate_case(model, beta, n, m, case_id="C2", alpha=None, u_nm=1.0):
    """CaseParams with an explicit cutoff, bypassing the rate table; test
    helper for exercising the path engine at controlled truncation levels."""
    alpha = alpha if alpha is not None else getattr(model, "alpha", 1.0)
    theta_plus = getattr(model, "theta_plus_const", 0.0)
    theta_minus = getattr(model, "theta_minus_const", 0.0)
    d_const = model.d_zero() if alpha < 1.0 else float("nan")
    return CaseParams(
        case_id=case_id,
        alpha=alpha,
        u_nm=u_nm,
        beta_n=beta,
        lambda_nm=model.theta(beta) / (n * m),
        d_const=d_const,
        theta_plus=theta_plus,
        theta_minus=theta_minus,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
