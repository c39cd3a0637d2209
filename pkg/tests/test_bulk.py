"""Bulk band structure: Hamiltonian symbol, dispersion, roots, Chern number."""
import numpy as np
import pytest

from halfdirac import ModelParams, chern, hamiltonian, momentum_roots, omega_plus
from halfdirac.bulk import kappa_ev_of
from halfdirac.errors import OutsideBulkBand


def _char_poly(p, kx, ky, omega):
    H = hamiltonian(p, kx, ky)
    return np.linalg.det(H - omega * np.eye(2))


def test_hamiltonian_is_hermitian_on_real_momenta(p):
    for kx, ky in [(0.0, 0.0), (1.3, -0.4), (-2.0, 5.0)]:
        H = hamiltonian(p, kx, ky)
        assert np.allclose(H, H.conj().T)


def test_omega_plus_is_an_eigenvalue(p):
    for kx, ky in [(0.0, 0.0), (0.7, 1.1), (-3.0, 2.5)]:
        w = omega_plus(p, kx, ky)
        vals = np.linalg.eigvalsh(hamiltonian(p, kx, ky))
        assert abs(vals[1] - w) < 1e-12


def test_momentum_roots_solve_the_characteristic_polynomial(p):
    for kx, omega in [(0.0, 1.5), (0.5, 2.0), (-1.2, 3.7), (2.0, 9.0)]:
        kappa, kappa_ev, kappa_div = momentum_roots(p, kx, omega)
        assert kappa > 0
        assert kappa_ev.real == 0 and kappa_ev.imag > 0
        assert kappa_div == -kappa_ev
        scale = max(abs(omega), 1.0) ** 2
        for ky in (kappa, -kappa, kappa_ev, kappa_div):
            assert abs(_char_poly(p, kx, ky, omega)) < 1e-9 * scale


def test_momentum_roots_reject_energies_below_the_band(p):
    with pytest.raises(OutsideBulkBand):
        momentum_roots(p, 0.0, 0.5)


def test_kappa_ev_matches_momentum_roots(p):
    for kx in (0.0, 0.7, -1.5):
        for kappa in (0.2, 1.0, 3.0):
            omega = omega_plus(p, kx, kappa)
            _, kappa_ev, _ = momentum_roots(p, kx, omega)
            assert abs(kappa_ev_of(p, kx, kappa) - kappa_ev) < 1e-9


def test_chern_default_parameters(p):
    assert chern(p, band=+1) == 1
    assert chern(p, band=-1) == -1


def test_model_params_enforce_standing_assumptions():
    with pytest.raises(ValueError):
        ModelParams(m=-1.0, eps=0.1)
    with pytest.raises(ValueError):
        ModelParams(m=1.0, eps=-0.1)
    with pytest.raises(ValueError):
        ModelParams(m=1.0, eps=0.6)
