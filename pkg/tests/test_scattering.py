"""Scattering amplitude and the argument-winding integrators."""
import numpy as np
import pytest

from halfdirac import winding_adaptive, winding_along
from halfdirac.errors import NoConvergence
from halfdirac.scattering import s_values


def test_amplitude_is_unimodular(p, dirichlet, condition_a, condition_b):
    kx = np.linspace(-8.0, 8.0, 41)
    kappa = np.linspace(0.05, 6.0, 25)
    KX, KAP = np.meshgrid(kx, kappa)
    for bc in (dirichlet, condition_a, condition_b):
        s = s_values(p, bc, KX.ravel(), KAP.ravel())
        assert np.max(np.abs(np.abs(s) - 1.0)) < 1e-9


@pytest.mark.parametrize("integrator", [winding_along, winding_adaptive])
def test_constant_path_has_zero_winding(integrator):
    res = integrator(lambda t: np.full(np.shape(t), 2.0 - 1.0j))
    assert res.snapped == 0
    assert abs(res.phase_integral) < 1e-12


@pytest.mark.parametrize("integrator", [winding_along, winding_adaptive])
@pytest.mark.parametrize("k", [-3, -2, -1, 1, 2, 3])
def test_pure_phase_paths_wind_by_their_frequency(integrator, k):
    res = integrator(lambda t: np.exp(2j * np.pi * k * np.asarray(t)))
    assert res.snapped == k
    assert abs(res.phase_integral - k) < 1e-9


def test_adaptive_integrator_resolves_a_narrow_phase_slip():
    # The quotient of two factors whose zeros straddle the path sweeps a
    # full turn inside a window of width ~1e-6; uniform grids alias it to 0.
    delta = 1e-6

    def ev_num(t):
        return (np.asarray(t) - 0.5) + 1j * delta

    def ev_den(t):
        return (np.asarray(t) - 0.5) - 1j * delta

    res = winding_adaptive(ev_num, ev_den)
    assert res.snapped == -1
    # The globally refining integrator cannot resolve the slip in budget.
    with pytest.raises(NoConvergence):
        winding_along(lambda t: ev_num(t) / ev_den(t), max_depth=4)


def test_adaptive_integrator_accepts_a_common_zero_of_both_factors():
    # Both factors vanish at the same point; the quotient stays smooth.
    def ev_num(t):
        t = np.asarray(t)
        return (t - 0.5) * np.exp(4j * np.pi * t)

    def ev_den(t):
        return np.asarray(t) - 0.5

    res = winding_adaptive(ev_num, ev_den)
    assert res.snapped == 2


def test_adaptive_integrator_reports_nonconvergence_on_budget_exhaustion():
    rng = np.random.default_rng(7)

    def noisy(t):
        t = np.asarray(t)
        return np.exp(2j * np.pi * rng.uniform(-1, 1, size=t.shape))

    with pytest.raises(NoConvergence):
        winding_adaptive(noisy, max_depth=6, max_points=4096)
