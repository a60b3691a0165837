from fractions import Fraction
from math import comb

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial.transform import Rotation
from scipy.special import eval_legendre

from cubkit import markov as mk
from cubkit.constructions import icosahedron, octahedron
from cubkit.errors import BudgetExceeded, ValidationError
from cubkit.pointsets import WeightedPointSet


def _random_orthogonal(rng, proper=True):
    g = Rotation.random(random_state=rng).as_matrix()
    if not proper:
        g = g @ np.diag([1.0, 1.0, -1.0])
    return g


def _rot_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])


def _unit(rng, count):
    x = rng.standard_normal((count, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


PYTH = [[Fraction(3, 5), Fraction(-4, 5), 0], [Fraction(4, 5), Fraction(3, 5), 0], [0, 0, 1]]
PYTH_INV = [list(r) for r in zip(*PYTH)]


@pytest.mark.parametrize("k", [0, 1, 2, 5, 8])
def test_basis_orthonormal(k):
    B = mk.harmonic_basis(k)
    assert B.dim == 2 * k + 1
    assert B.orthonormality_defect() < 1e-13


@pytest.mark.parametrize("k", [1, 3, 6])
def test_basis_polynomials_are_harmonic(k):
    for p in mk.harmonic_basis(k).polys:
        assert not p.laplacian()
        assert p.is_homogeneous() and p.degree == k


@pytest.mark.parametrize("k", [2, 7])
def test_exact_and_numeric_evaluation_agree(k):
    x = _unit(np.random.default_rng(1), 10)
    assert_allclose(mk.harmonic_basis(k).evaluate(x), mk.harmonic_values(k, x), atol=1e-13)


@pytest.mark.parametrize("k", [1, 4, 10, 20])
def test_addition_theorem(k):
    rng = np.random.default_rng(k)
    x, y = _unit(rng, 20), _unit(rng, 20)
    Yx, Yy = mk.harmonic_values(k, x), mk.harmonic_values(k, y)
    lhs = np.sum(Yx * Yy, axis=1)
    rhs = (2 * k + 1) * eval_legendre(k, np.sum(x * y, axis=1))
    assert_allclose(lhs, rhs, atol=1e-11)
    assert_allclose(np.sum(Yx**2, axis=1), 2 * k + 1, rtol=1e-12)


@pytest.mark.parametrize("k", [0, 3, 9])
def test_rep_of_identity(k):
    assert_allclose(mk.rep_matrix(np.eye(3), k).matrix, np.eye(2 * k + 1), atol=1e-13)


def test_z_rotation_degree_one_trace():
    for theta in (0.3, 1.7, np.pi):
        assert abs(mk.rep_matrix(_rot_z(theta), 1).trace - (1 + 2 * np.cos(theta))) < 1e-13


@pytest.mark.parametrize("k", [1, 2, 5])
def test_rep_is_orthogonal_homomorphism(k):
    rng = np.random.default_rng(10 + k)
    g, h = _random_orthogonal(rng), _random_orthogonal(rng, proper=False)
    Rg, Rh, Rgh = (mk.rep_matrix(m, k).matrix for m in (g, h, g @ h))
    assert_allclose(Rg @ Rg.T, np.eye(2 * k + 1), atol=1e-12)
    assert_allclose(Rgh, Rg @ Rh, atol=1e-12)


def test_rep_rejects_non_orthogonal():
    with pytest.raises(ValidationError):
        mk.rep_matrix(np.diag([1.0, 1.0, 2.0]), 2)


def test_trace_formula_on_random_elements():
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(100):
        g = _random_orthogonal(rng, proper=bool(i % 2))
        k = 1 + i % 6
        worst = max(worst, abs(mk.rep_matrix(g, k).trace - mk.trace_formula(g, k)))
    assert worst < 1e-10


@pytest.mark.parametrize("k", range(0, 7))
def test_trace_formula_special_elements(k):
    assert mk.trace_formula(np.eye(3), k) == pytest.approx(2 * k + 1)
    assert mk.trace_formula(-np.eye(3), k) == pytest.approx((-1) ** k * (2 * k + 1))
    assert mk.trace_formula(np.diag([1.0, 1.0, -1.0]), k) == pytest.approx(1.0)


def test_trace_of_minus_identity_degree_three():
    assert mk.trace_formula(-np.eye(3), 3) == pytest.approx(-7)
    assert mk.rep_matrix(-np.eye(3), 3).trace == pytest.approx(-7)


def test_identity_operator_spectrum():
    op = mk.markov_operator([np.eye(3)], [1.0], 4)
    assert_allclose(mk.spectrum(op), 1.0, atol=1e-13)


def test_icosahedron_homothety():
    rep = mk.homothety_report(icosahedron(), 2)
    assert rep.expected_factor == pytest.approx(0.2)
    assert rep.matches_expected
    assert mk.cubature_homothety_check(icosahedron(), 1)


def test_perturbed_icosahedron_is_not_homothety():
    ps = icosahedron().to_float()
    X = ps.array.copy()
    X[0] += np.array([0.05, -0.02, 0.01])
    X[9] = -X[0]
    bad = WeightedPointSet(X / np.linalg.norm(X, axis=1, keepdims=True), radius2=1.0, mode="float")
    assert not mk.homothety_report(bad, 2).is_homothety
    assert mk.homothety_implies_design(bad, 2) is None


def test_homothety_converse_on_octahedron():
    rep = mk.homothety_implies_design(octahedron(), 1)
    assert rep is not None and rep.max_strength == 3


def test_markov_spectrum_inside_unit_interval():
    rng = np.random.default_rng(3)
    mats = [mk.reflection(v) for v in _unit(rng, 6)]
    for k in (1, 2, 5):
        ev = mk.spectrum(mk.markov_operator(mats, np.full(6, 1 / 6), k))
        assert np.all(np.abs(ev) <= 1 + 1e-12)


def test_pythagorean_rotation_return_probabilities():
    rep = mk.kesten_moments([PYTH, PYTH_INV], 12, k_max=[1])
    assert rep.exact
    assert rep.moments[2] == Fraction(1, 2)
    for N in range(13):
        expected = Fraction(comb(N, N // 2), 2**N) if N % 2 == 0 else 0
        assert rep.moments[N] == expected


def test_reflection_walk_second_moment():
    rng = np.random.default_rng(5)
    mats = [mk.reflection(v) for v in _unit(rng, 4)]
    rep = mk.kesten_moments(mats, 4, k_max=[1, 2])
    assert rep.moments[0] == 1
    assert rep.moments[2] >= 1 / 4 - 1e-12


def test_trace_moments_converge_towards_return_probability():
    rep = mk.kesten_moments([PYTH, PYTH_INV], 10, k_max=[1, 50, 400])
    gaps = [abs(rep.trace_moments[k][10] - float(rep.moments[10])) for k in (1, 50, 400)]
    assert gaps[2] < gaps[0]
    assert gaps[2] < 0.02


def test_kesten_input_checks():
    with pytest.raises(ValidationError):
        mk.kesten_moments([PYTH], 4)
    with pytest.raises(ValidationError):
        mk.kesten_moments([np.eye(3), PYTH, PYTH_INV], 4)
    with pytest.raises(BudgetExceeded):
        mk.kesten_moments([PYTH, PYTH_INV], 60)


def test_kesten_bound():
    assert mk.kesten_bound(2) == pytest.approx(1.0)
    assert mk.kesten_bound(6) == pytest.approx(2 * np.sqrt(5) / 6)


def test_norm_sandwich():
    rng = np.random.default_rng(11)
    mats = [mk.reflection(v) for v in _unit(rng, 4)]
    rep = mk.norm_sandwich(mats, k_max=10)
    assert rep.upper_ok
    assert rep.lower == pytest.approx(0.5)
    assert rep.status in ("confirmed", "inconclusive")
    assert len(rep.norms) == 10


@pytest.mark.parametrize("n", [5, 17, 40])
def test_jacobi_against_numpy(n):
    rng = np.random.default_rng(n)
    a = rng.standard_normal((n, n))
    a = a + a.T
    vals, vecs = mk.jacobi_eigh(a)
    assert_allclose(np.sort(vals), np.linalg.eigvalsh(a), atol=1e-11)
    assert_allclose(a @ vecs, vecs * vals, atol=1e-10)


def test_matrix_text_round_trip():
    mats = [PYTH, PYTH_INV, _rot_z(0.25)]
    back = mk.loads_matrices(mk.dumps_matrices(mats))
    assert back[0] == [[Fraction(x) for x in r] for r in PYTH]
    assert_allclose(np.array(back[2], dtype=float), _rot_z(0.25), atol=0)


def test_matrix_text_rejects_bad_rows():
    with pytest.raises(ValidationError):
        mk.loads_matrices("matrices count=1\n1 0 0\n0 1 0\n")
    with pytest.raises(ValidationError):
        mk.loads_matrices("matrices count=1\n1 0 0\n0 1 0\n0 0 2\n")
