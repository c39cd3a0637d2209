"""End-to-end acceptance checks with explicit tolerances and time budgets.

Each test states its runtime budget and asserts it; budgets assume an
ordinary laptop-class machine.  The criteria cover the bulk Chern number,
the scattering route to it, the edge-spectrum reproduction, the asymptotic
anomaly, the randomized per-class identity sweep, self-adjointness, the
amplitude/root/winding properties, and the closed-form curve regression.
"""
import time

import numpy as np
import pytest

from halfdirac import (
    ModelParams,
    case_study_curves,
    chern,
    chern_via_scattering,
    classify,
    is_self_adjoint,
    make_class,
    n_b_direct,
    n_b_levinson,
    transverse_roots,
    w_infinity,
    winding_along,
)
from halfdirac.anomaly import ALL_CLASS_TAGS, sample_class_params
from halfdirac.boundary import BoundaryCondition, sa_residual, transform
from halfdirac.bulk import hamiltonian
from halfdirac.cli import run_sweep
from halfdirac.edge import spectrum_rows
from halfdirac.scattering import g_values


class _Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            elapsed = time.monotonic() - self.t0
            assert elapsed < self.seconds, (
                f"runtime budget exceeded: {elapsed:.1f}s > {self.seconds}s"
            )


@pytest.fixture(scope="module")
def named(p, dirichlet, condition_a, condition_b):
    return {"dirichlet": dirichlet, "a": condition_a, "b": condition_b}


# criterion 1 -- bulk Chern number


def test_bulk_chern_number(p):
    with _Budget(10):
        assert chern(p, band=+1, residual_tol=0.01) == 1
        assert chern(p, band=-1, residual_tol=0.01) == -1


# criterion 2 -- Chern number recovered from scattering data


def test_chern_via_scattering_is_loop_and_condition_independent(p, named):
    rng = np.random.default_rng(3)
    conditions = list(named.values())
    for tag in ("A14", "A23", "A24", "A34", "C"):
        conditions.append(make_class(tag, sample_class_params(tag, rng, p), p))
    loops = [
        {"loop_center": (0.0, 2.0), "loop_radius": 1.0},
        {"loop_center": (0.5, 3.0), "loop_radius": 1.5},
        {"loop_center": (-1.0, 2.5), "loop_radius": 0.8},
    ]
    with _Budget(60):
        for bc in conditions:
            for loop in loops:
                res = chern_via_scattering(p, bc, snap_tol=0.1, **loop)
                assert res.snapped == 1
                assert abs(res.phase_integral - 1.0) < 0.1


# criterion 3 -- edge-spectrum branch counts


def test_edge_spectra_and_mode_counts(p, named, condition_a_plus):
    expected = {"dirichlet": 1, "a": 2, "b": 3}
    with _Budget(120):
        for key, bc in named.items():
            rows, branches = spectrum_rows(p, bc)
            assert len(branches) == expected[key]
            assert n_b_direct(p, bc) == expected[key]
            branch_ids = {r[2] for r in rows} - {-1}
            assert len(branch_ids) == expected[key]
        assert n_b_direct(p, condition_a_plus) == 0


# criterion 4 -- asymptotic anomaly and the identity C_+ = n_b + w_inf


def test_asymptotic_anomaly_and_identity(p, named, condition_a_plus):
    expected_w = {"dirichlet": 0, "a": -1, "b": -2}
    expected_n = {"dirichlet": 1, "a": 2, "b": 3}
    with _Budget(120):
        for key, bc in named.items():
            w = w_infinity(p, bc, snap_tol=0.1)
            assert w.snapped == expected_w[key]
            n = n_b_levinson(p, bc, snap_tol=0.1)
            assert n.snapped == expected_n[key]
            assert 1 == n.snapped + w.snapped
        assert w_infinity(p, condition_a_plus).snapped == 1


# criterion 5 -- randomized per-class sweep against the closed-form oracle


def test_randomized_class_sweep(p):
    with _Budget(900):
        summary = run_sweep(p, samples=5, seed=42)
    assert summary["n_runs"] == 35
    assert summary["n_convergent"] >= 1
    assert summary["identity_match_rate"] == 1.0
    assert summary["prediction_match_rate"] >= 0.95
    for run in summary["runs"]:
        n_b = run["report"]["n_b"]
        if n_b is not None:
            assert n_b in (-1, 0, 1, 2, 3)


# criterion 6 -- self-adjointness of all constructors, GL2 stability


def test_self_adjointness_suite(p, rng):
    for tag in ALL_CLASS_TAGS:
        for _ in range(10):
            bc = make_class(tag, sample_class_params(tag, rng, p), p)
            assert sa_residual(p, bc) < 1e-12
            assert is_self_adjoint(p, bc)
    rejected = BoundaryCondition(
        A0=np.array([[1, 0, 0, 0], [0, 0, 1, 0]], dtype=complex),
        A1=np.zeros((2, 4), dtype=complex),
    )
    assert not is_self_adjoint(p, rejected)


def test_thousand_gl2_transforms_preserve_classification(p, rng):
    count = 0
    per_tag = 1000 // len(ALL_CLASS_TAGS) + 1
    for tag in ALL_CLASS_TAGS:
        bc = make_class(tag, sample_class_params(tag, rng, p), p)
        for _ in range(per_tag):
            G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            if abs(np.linalg.det(G)) < 0.05:
                G = G + 2.0 * np.eye(2)
            assert classify(p, transform(bc, G)).tag == tag
            count += 1
    assert count >= 1000


# criterion 7 -- amplitude, root, and winding properties


def test_amplitude_unimodular_on_a_dense_grid(p, named):
    kx = np.linspace(-8.0, 8.0, 50) + 0.0137
    kappa = np.linspace(0.05, 6.0, 50)
    KX, KAP = np.meshgrid(kx, kappa)
    assert KX.size == 2500
    for bc in named.values():
        num = g_values(p, bc, KX.ravel(), -KAP.ravel())
        den = g_values(p, bc, KX.ravel(), KAP.ravel())
        s = num / den
        assert np.max(np.abs(np.abs(s) - 1.0)) < 1e-9


def test_amplitude_gl2_invariant(p, named, rng):
    kx = np.linspace(-5.0, 5.0, 20) + 0.0137
    kappa = np.linspace(0.2, 3.0, 10)
    KX, KAP = np.meshgrid(kx, kappa)
    for bc in named.values():
        G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(G)) < 0.05:
            G = G + 2.0 * np.eye(2)
        bc2 = transform(bc, G)
        s1 = (g_values(p, bc, KX.ravel(), -KAP.ravel())
              / g_values(p, bc, KX.ravel(), KAP.ravel()))
        s2 = (g_values(p, bc2, KX.ravel(), -KAP.ravel())
              / g_values(p, bc2, KX.ravel(), KAP.ravel()))
        assert np.max(np.abs(s1 - s2)) < 1e-10


def test_transverse_roots_residuals(p):
    for kx, omega in [(0.0, 0.3), (1.0, -0.5), (-2.0, 0.9), (0.3, 0.0)]:
        for q in transverse_roots(p, kx, omega):
            H = hamiltonian(p, kx, q)
            res = abs(np.linalg.det(H - omega * np.eye(2)))
            scale = max(1.0, abs(q)) ** 4
            assert res < 1e-10 * scale


def test_winding_unit_cases():
    res = winding_along(lambda t: np.full(np.shape(t), 1.0 + 2.0j))
    assert res.snapped == 0
    for k in (-3, -2, -1, 1, 2, 3):
        res = winding_along(
            lambda t, k=k: np.exp(2j * np.pi * k * np.asarray(t))
        )
        assert res.snapped == k


# criterion 8 -- closed-form dominant-scale curve regression


def test_worked_curve_windings(p, named):
    expected = {"dirichlet": 0, "a": -1, "b": -2}
    u = np.linspace(-1e3, 1e3, 400001)
    for key, bc in named.items():
        g_minus, g_plus = case_study_curves(classify(p, bc), u)
        ratio = g_minus / g_plus
        w = np.angle(ratio[1:] / ratio[:-1]).sum() / (2.0 * np.pi)
        assert abs(w - expected[key]) < 0.05
