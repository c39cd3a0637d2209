"""Closed-form anomaly oracle and the worked dominant-scale curves."""
import numpy as np
import pytest

from halfdirac import (
    THRESHOLD,
    case_study_curves,
    classify,
    make_class,
    predict_w_infinity,
    winding_adaptive,
)
from halfdirac.boundary import ClassLabel
from halfdirac.errors import NotAWorkedExample

SQRT2 = np.sqrt(2.0)


def _predict(p, tag, params):
    label = classify(p, make_class(tag, params, p))
    return predict_w_infinity(p, label)


@pytest.mark.parametrize("tag,params,expected", [
    ("A12", {}, 0),
    ("A12", {"b11": 0.4, "b12": 0.3 + 0.2j, "b22": -1.1}, 0),
    ("A14", {"beta": -1.0}, -1),
    ("A14", {"beta": 1.0}, 1),
    ("A14", {"beta": 0.0}, 0),
    ("A23", {"alpha": 0.5, "beta": 1.0}, 0),
    ("A23", {"alpha": -0.3, "beta": 2.0}, -1),
    ("A23", {"alpha": 0.0, "beta": -2.0}, 1),
    ("A24", {"beta": 3.0, "a11": 1.0}, 1),
    ("A24", {"beta": -3.0, "a11": 1.0}, -1),
    ("A24", {"beta": 1.0, "a11": 1.0}, 0),
    ("A34", {"beta1": 4.0, "beta2": -4.0, "b12": -1j}, -2),
    ("A34", {"beta1": 0.0, "beta2": 1.0, "b12": 1.0}, 1),
    ("A34", {"beta1": 0.0, "beta2": 1.0, "b12": 2.0}, 0),
    ("A34", {"beta1": 0.0, "beta2": -1.0, "b12": 0.5}, -1),
    ("A34", {"beta1": -4.0, "beta2": 4.0, "b12": 1.0}, 2),
    ("A34", {"beta1": 0.0, "beta2": 1.0, "b12": 0.0}, 1),
    ("A34", {"beta1": 0.0, "beta2": -1.0, "b12": 0.0}, -1),
    ("A34", {"beta1": 0.0, "beta2": 0.0, "b12": 0.0}, 0),
    ("B", {"a1": 0.3 + 0.1j, "a2": -0.2j, "mu": 1.0 + 0.5j, "alpha": 0.0}, 0),
    ("C", {"a1": 0.1, "a2": 0.0, "a4": 0.2, "mu": 0.3}, 1),
    ("C", {"a1": 0.1, "a2": 0.7, "a4": 0.2, "mu": 0.3}, 0),
])
def test_oracle_rules(p, tag, params, expected):
    pred = _predict(p, tag, params)
    assert pred.value == expected


@pytest.mark.parametrize("tag,params", [
    ("A23", {"alpha": 0.2, "beta": float(SQRT2)}),
    ("A23", {"alpha": 0.0, "beta": float(-SQRT2)}),
    ("A24", {"beta": float(SQRT2), "a11": 1.0}),
    ("A34", {"beta1": float(SQRT2), "beta2": 1.0, "b12": 0.0}),
])
def test_oracle_reports_thresholds(p, tag, params):
    pred = _predict(p, tag, params)
    assert pred.value is THRESHOLD
    assert pred.is_threshold


def _curve_winding(label, n=200001, lim=1e3):
    u = np.linspace(-lim, lim, n)
    g_minus, g_plus = case_study_curves(label, u)
    ratio = g_minus / g_plus
    steps = np.angle(ratio[1:] / ratio[:-1])
    return steps.sum() / (2.0 * np.pi)


def test_worked_curves_reproduce_the_three_windings(p, dirichlet, condition_a,
                                                    condition_b):
    expected = {id(dirichlet): 0, id(condition_a): -1, id(condition_b): -2}
    for bc in (dirichlet, condition_a, condition_b):
        w = _curve_winding(classify(p, bc))
        assert abs(w - expected[id(bc)]) < 0.05


def test_worked_curves_reject_unsupported_labels(p):
    label = classify(p, make_class("A34", {"beta1": 1.0, "beta2": 1.0,
                                           "b12": 1.0}, p))
    with pytest.raises(NotAWorkedExample):
        case_study_curves(label, np.array([0.0, 1.0]))
    with pytest.raises(NotAWorkedExample):
        case_study_curves(ClassLabel(tag="B", params={}), np.array([0.0]))


def test_worked_curve_winding_matches_adaptive_integrator(p, condition_a):
    label = classify(p, condition_a)

    def ev(t):
        u = np.tan(np.pi * (np.asarray(t) - 0.5))
        g_minus, g_plus = case_study_curves(label, u)
        return g_minus / g_plus

    eps = 1e-4  # avoid the poles of tan at the endpoints
    res = winding_adaptive(lambda t: ev(eps + (1 - 2 * eps) * np.asarray(t)))
    assert res.snapped == -1
