"""Boundary-condition constructors, classification, and GL2 invariance."""
import numpy as np
import pytest

from halfdirac import (
    BoundaryCondition,
    classify,
    equivalent,
    is_self_adjoint,
    make_class,
)
from halfdirac.anomaly import ALL_CLASS_TAGS, sample_class_params
from halfdirac.boundary import sa_residual, transform
from halfdirac.errors import NotRank2, NotSelfAdjoint


def _random_gl2(rng):
    while True:
        G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(G)) > 0.1:
            return G


@pytest.mark.parametrize("tag", ALL_CLASS_TAGS)
def test_constructors_are_self_adjoint(tag, p, rng):
    for _ in range(5):
        bc = make_class(tag, sample_class_params(tag, rng, p), p)
        assert sa_residual(p, bc) < 1e-12
        assert is_self_adjoint(p, bc)


@pytest.mark.parametrize("tag", ALL_CLASS_TAGS)
def test_classify_recovers_the_constructor_tag(tag, p, rng):
    for _ in range(5):
        bc = make_class(tag, sample_class_params(tag, rng, p), p)
        assert classify(p, bc).tag == tag


def test_cell_with_pivots_one_three_is_rejected(p):
    bc = BoundaryCondition(
        A0=np.array([[1, 0, 0, 0], [0, 0, 1, 0]], dtype=complex),
        A1=np.zeros((2, 4), dtype=complex),
    )
    assert not is_self_adjoint(p, bc)
    with pytest.raises(NotSelfAdjoint):
        classify(p, bc)


def test_rank_deficient_condition_is_rejected(p):
    bc = BoundaryCondition(
        A0=np.array([[1, 0, 0, 0], [2, 0, 0, 0]], dtype=complex),
        A1=np.zeros((2, 4), dtype=complex),
    )
    with pytest.raises(NotRank2):
        classify(p, bc)


def test_gl2_transforms_preserve_class_and_equivalence(p, rng):
    for tag in ALL_CLASS_TAGS:
        bc = make_class(tag, sample_class_params(tag, rng, p), p)
        label = classify(p, bc)
        for _ in range(10):
            bc2 = transform(bc, _random_gl2(rng))
            assert is_self_adjoint(p, bc2)
            label2 = classify(p, bc2)
            assert label2.tag == label.tag
            assert equivalent(bc, bc2)


def test_classify_params_match_canonical_form(p, rng):
    for tag in ALL_CLASS_TAGS:
        params = sample_class_params(tag, rng, p)
        bc = make_class(tag, params, p)
        label = classify(p, bc)
        for name, value in params.items():
            assert name in label.params
            assert abs(complex(label.params[name]) - complex(value)) < 1e-8


def test_boundary_condition_dict_round_trip(p, rng):
    bc = make_class("A34", sample_class_params("A34", rng, p), p)
    bc2 = BoundaryCondition.from_dict(bc.to_dict())
    assert np.allclose(bc.A0, bc2.A0) and np.allclose(bc.A1, bc2.A1)


def test_distinct_conditions_are_not_equivalent(p, dirichlet, condition_a):
    assert not equivalent(dirichlet, condition_a)
    assert equivalent(dirichlet, dirichlet)
