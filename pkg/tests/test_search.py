import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize, rosen

from tweezer_qc.search import InputError, SimplexOptions, nelder_mead


def scipy_nm(f, x0):
    return minimize(f, x0, method="Nelder-Mead",
                    options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": 20000}).x


@pytest.mark.parametrize("x0", [[-1.2, 1.0], [0.0, 0.0], [2.0, -1.5]])
def test_rosenbrock_agrees_with_scipy(x0):
    opts = SimplexOptions(step=0.1, ftol=1e-14, xtol=1e-10, max_evals=20000)
    res = nelder_mead(rosen, x0, opts)
    assert res.converged
    assert np.allclose(res.x, scipy_nm(rosen, x0), atol=1e-6)
    assert np.allclose(res.x, [1.0, 1.0], atol=1e-6)


def test_rosenbrock_in_five_dimensions():
    opts = SimplexOptions(step=0.5, ftol=1e-14, xtol=1e-10, max_evals=40000)
    res = nelder_mead(rosen, np.zeros(5), opts)
    assert res.fun < 1e-10
    assert np.allclose(res.x, 1.0, atol=1e-5)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3.0, 3.0), min_size=3, max_size=3),
       st.lists(st.floats(0.5, 5.0), min_size=3, max_size=3))
def test_quadratic_bowl(center, weights):
    c, w = np.array(center), np.array(weights)
    bowl = lambda x: float(np.sum(w * (x - c) ** 2))
    res = nelder_mead(bowl, np.zeros(3), SimplexOptions(step=1.0, max_evals=6000))
    assert np.allclose(res.x, c, atol=1e-5)
    assert np.allclose(res.x, scipy_nm(bowl, np.zeros(3)), atol=1e-4)


def test_history_and_counts():
    res = nelder_mead(lambda x: float(x[0] ** 2), [1.0], SimplexOptions(step=0.5, max_evals=200))
    assert len(res.history) == res.nfev <= 200
    assert res.fun == min(res.history)


def test_budget_is_respected():
    res = nelder_mead(rosen, [-1.2, 1.0], SimplexOptions(step=0.1, max_evals=50))
    assert res.nfev <= 50 + 3  # a shrink step may finish its sweep
    assert not res.converged


def test_penalized_points_are_avoided():
    # the unconstrained minimum at 2 is penalized; the best allowed point is 1
    def f(x):
        return float((x[0] - 2) ** 2), bool(x[0] > 1)

    res = nelder_mead(f, [0.0], SimplexOptions(step=0.3, max_evals=2000, penalty=10.0))
    assert not res.all_penalized
    assert res.x[0] == pytest.approx(1.0, abs=1e-3)


def test_all_penalized_is_reported():
    res = nelder_mead(lambda x: (float(x[0] ** 2), True), [1.0], SimplexOptions(max_evals=100))
    assert res.all_penalized
    assert res.fun == pytest.approx(0.0, abs=1e-6)


def test_non_finite_start_rejected():
    with pytest.raises(InputError):
        nelder_mead(lambda x: np.nan, [0.0])


def test_non_finite_values_elsewhere_are_tolerated():
    f = lambda x: np.inf if x[0] < -0.5 else float((x[0] - 0.3) ** 2)
    res = nelder_mead(f, [0.0], SimplexOptions(step=1.0, max_evals=1000))
    assert res.x[0] == pytest.approx(0.3, abs=1e-5)


def test_option_validation():
    with pytest.raises(ValueError):
        SimplexOptions(contract=1.5)
    with pytest.raises(ValueError):
        nelder_mead(rosen, [0.0, 0.0], SimplexOptions(max_evals=2))


def test_deterministic():
    a = nelder_mead(rosen, [-1.2, 1.0], SimplexOptions(step=0.1, max_evals=500))
    b = nelder_mead(rosen, [-1.2, 1.0], SimplexOptions(step=0.1, max_evals=500))
    assert np.array_equal(a.x, b.x) and a.history == b.history
