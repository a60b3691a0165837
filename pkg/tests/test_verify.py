import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from cubkit.constructions import catalog, identity_to_pointset, liouville_family, lucas_family
from cubkit.errors import BudgetExceeded, ValidationError
from cubkit.pointsets import WeightedPointSet
from cubkit.polyspaces import gegenbauer_q
from cubkit.surd import Surd
from cubkit.verify import (
    banach_to_cubature,
    embed_to_banach,
    is_cubature_for,
    kernel_residuals,
    moment_identity_constant,
    moment_residual,
    r_form_residual,
    root_set_check,
    strength_kernel,
    strength_moments,
    weight_uniformity_of_tight,
)

FIXTURES = [
    ("polygon", {"N": 5}, 4),
    ("polygon", {"N": 6}, 5),
    ("polygon", {"N": 8}, 7),
    ("simplex", {"n": 4}, 2),
    ("cross_polytope", {"n": 5}, 3),
    ("hypercube", {"n": 4}, 3),
    ("tetrahedron", {}, 2),
    ("octahedron", {}, 3),
    ("cube", {}, 3),
    ("icosahedron", {}, 5),
    ("dodecahedron", {}, 5),
    ("d4_roots", {}, 5),
    ("e8_roots", {}, 7),
    ("liouville_s3", {}, 5),
    ("kempner_s3", {}, 7),
    ("schur_s3", {}, 11),
]


@pytest.mark.parametrize("name,params,strength", FIXTURES)
def test_kernel_and_moment_routes_agree(name, params, strength):
    ps = catalog(name, **params)
    a = strength_kernel(ps, strength + 1)
    b = strength_moments(ps, strength + 1)
    assert a.max_strength == b.max_strength == strength
    assert a.strict and b.strict


@pytest.mark.parametrize("name,params,strength", FIXTURES[:13])
def test_float_mode_agrees(name, params, strength):
    ps = catalog(name, **params).to_float()
    assert strength_kernel(ps, strength + 1).max_strength == strength
    assert strength_moments(ps, strength + 1).max_strength == strength


@pytest.mark.parametrize("name,k", [("icosahedron", 6), ("e8_roots", 9), ("kempner_s3", 8)])
def test_r_form_equals_sum_of_kernel_residuals(name, k):
    ps = catalog(name)
    total = sum(kernel_residuals(ps, k), Surd(0))
    assert r_form_residual(ps, k) == total


@given(st.integers(0, 10**6))
def test_strength_invariant_under_rotation(seed):
    rot = Rotation.random(random_state=seed).as_matrix()
    ico = catalog("icosahedron").to_float()
    moved = WeightedPointSet(ico.array @ rot.T, ico.weights, ico.radius2, mode="float")
    assert strength_kernel(moved, 7).max_strength == 5
    np.testing.assert_allclose(
        kernel_residuals(moved, 7), kernel_residuals(ico, 7), atol=1e-12
    )


@given(st.integers(2, 5), st.integers(2, 30), st.integers(0, 10**6))
def test_kernel_residuals_are_nonnegative(n, N, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((N, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    w = rng.uniform(0.1, 1.0, N)
    ps = WeightedPointSet(x, w, 1.0, mode="float")
    assert min(kernel_residuals(ps, 8)) > -1e-12


def test_kernel_residual_brute_force():
    ps = catalog("dodecahedron").to_float()
    x = ps.array / math.sqrt(ps.radius2)
    w = ps.normalized_weights()
    for j in range(1, 8):
        q = gegenbauer_q(3, j)
        brute = sum(w[a] * w[b] * q(float(x[a] @ x[b])) for a in range(len(x)) for b in range(len(x)))
        assert kernel_residuals(ps, 7)[j - 1] == pytest.approx(brute, abs=1e-12)


def test_moment_identity_constants():
    assert moment_identity_constant(catalog("icosahedron"), 2) == Fraction(1, 5)
    assert moment_identity_constant(catalog("lucas_s2"), 2) == Fraction(1, 5)
    assert moment_identity_constant(catalog("e8_roots"), 3) == Fraction(15, 8 * 10 * 12)
    assert moment_identity_constant(catalog("cube"), 2) is None


def test_homogeneous_spaces():
    half = identity_to_pointset(liouville_family())
    assert len(half) == 12
    assert is_cubature_for(half, "P", 4)
    assert is_cubature_for(half, "P", 2)
    assert not is_cubature_for(half, "F", 3)
    # the 24 vectors of Lucas' identity integrate P^(4) but not P^(6)
    pairs = catalog("d4_roots")
    assert is_cubature_for(pairs, "P", 4) and not is_cubature_for(pairs, "P", 6)
    assert identity_to_pointset(lucas_family()).dim == 3


def test_moment_residual_reports_gap():
    ok, gap = moment_residual(catalog("cube").to_float(), 4)
    assert not ok and gap > 1e-3
    ok, gap = moment_residual(catalog("icosahedron").to_float(), 4)
    assert ok and gap < 1e-12


def test_moment_cap():
    ps = WeightedPointSet(np.eye(30), mode="float")
    with pytest.raises(BudgetExceeded):
        strength_moments(ps, 14)


@pytest.mark.parametrize(
    "name,params,kernel,roots",
    [
        ("icosahedron", {}, "C^(2)", [-1 / math.sqrt(5), 1 / math.sqrt(5)]),
        ("octahedron", {}, "C^(1)", [0.0]),
        ("e8_roots", {}, "C^(3)", [-0.5, 0.0, 0.5]),
        ("simplex", {"n": 5}, "R^(1)", [-0.2]),
        ("cross_polytope", {"n": 4}, "C^(1)", [0.0]),
    ],
)
def test_tight_root_sets(name, params, kernel, roots):
    rep = root_set_check(catalog(name, **params))
    assert rep.status == "tight" and rep.matches
    assert rep.kernel == kernel
    np.testing.assert_allclose(rep.observed, roots, atol=1e-12)
    np.testing.assert_allclose(rep.expected, roots, atol=1e-12)


def test_non_tight_root_report():
    rep = root_set_check(catalog("cube"))
    assert rep.status == "containment" and not rep.tight and rep.matches is None


@pytest.mark.parametrize("name", ["icosahedron", "e8_roots", "octahedron"])
def test_tight_sets_have_equal_weights(name):
    uniform, ratio = weight_uniformity_of_tight(catalog(name))
    assert uniform and ratio == 1.0
    with pytest.raises(ValidationError):
        weight_uniformity_of_tight(catalog("cube"))


@pytest.mark.parametrize("name,l", [("icosahedron", 2), ("kempner_s3", 3), ("d4_roots", 2)])
def test_banach_embedding_round_trip(name, l):
    ps = catalog(name)
    rows = embed_to_banach(ps, l)
    rng = np.random.default_rng(1)
    for u in rng.standard_normal((5, ps.dim)):
        assert np.sum((rows @ u) ** (2 * l)) == pytest.approx(np.dot(u, u) ** l, rel=1e-12)
    back = banach_to_cubature(rows, l)
    assert is_cubature_for(back, "P", 2 * l)
    assert back.total_weight == pytest.approx(1.0)


def test_banach_rejects_non_isometry():
    with pytest.raises(ValidationError):
        banach_to_cubature(np.eye(3), 2)
    with pytest.raises(ValidationError):
        embed_to_banach(catalog("cube"), 2)


def test_report_serialisation():
    rep = strength_kernel(catalog("icosahedron"), 8)
    assert rep.to_text().splitlines()[0] == "strength=5 tight=yes"
    doc = json.loads(rep.to_json())
    assert doc["max_strength"] == 5 and doc["size"] == 12
    assert rep.residual(6) > 0
    with pytest.raises(KeyError):
        rep.residual(9)
