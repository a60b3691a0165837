import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubkit import lattices as lat
from cubkit.errors import BudgetExceeded, ValidationError


def _brute_count_zn(n, m):
    r = int(m**0.5)
    return sum(1 for v in itertools.product(range(-r, r + 1), repeat=n) if sum(x * x for x in v) == m)


def _sigma3(m):
    return sum(d**3 for d in range(1, m + 1) if m % d == 0)


@pytest.mark.parametrize("n, m", [(2, 5), (3, 3), (4, 1), (4, 6), (5, 4), (7, 1)])
def test_zn_shell_counts_against_brute_force(n, m):
    L = lat.standard("Z", n)
    assert len(lat.shell(L, m)) == _brute_count_zn(n, m)


def test_e8_shell_counts():
    E8 = lat.standard("E8")
    shells = lat.enumerate_shells(E8, 6)
    assert [len(shells[m]) for m in (2, 4, 6)] == [240, 2160, 6720]
    for m in (2, 4, 6):
        assert len(shells[m]) == 240 * _sigma3(m // 2)
    assert all(len(shells[m]) == 0 for m in (1, 3, 5))


def test_shell_vectors_have_the_right_norm_and_lie_in_lattice():
    D4 = lat.standard("D", 4)
    for v in lat.shell(D4, 4).vectors:
        assert D4.inner(v, v) == 4
        assert D4.contains(v)


def test_witt12_has_no_norm_one_vectors():
    W = lat.standard("Witt", 12)
    assert W.integral and not W.even
    assert len(lat.shell(W, 1)) == 0


def test_lattice_flags():
    E8 = lat.standard("E8")
    assert E8.flags() == {"integral": True, "even": True, "unimodular": True}
    D4 = lat.standard("D", 4)
    assert D4.even and not D4.unimodular
    assert D4.determinant == 4
    Z3 = lat.standard("Z", 3)
    assert Z3.unimodular and not Z3.even
    with pytest.raises(ValidationError):
        lat.standard("Witt", 6)


def test_hnf_of_equivalent_bases():
    assert lat.hnf([[2, 0], [0, 3]]) == lat.hnf([[2, 3], [2, 6]])
    assert lat.hnf([[4, 6], [2, 3]]) == [[2, 3]]


def test_lattice_equality_is_basis_free():
    A = lat.IntegralLattice([[1, 1], [1, -1]])
    B = lat.IntegralLattice([[2, 0], [1, 1]])
    C = lat.IntegralLattice([[2, 0], [0, 2]])
    assert A == B
    assert A != C
    assert hash(A) == hash(B)


def test_dependent_basis_rejected():
    with pytest.raises(ValidationError):
        lat.IntegralLattice([[1, 2], [2, 4]])


@settings(max_examples=25)
@given(st.lists(st.integers(-6, 6), min_size=9, max_size=9))
def test_lll_output_is_unimodular_and_reduced(entries):
    B = np.array(entries, dtype=object).reshape(3, 3)
    if np.linalg.det(B.astype(float)) == 0 or abs(np.linalg.det(B.astype(float))) < 0.5:
        return
    G = (B @ B.T).tolist()
    U = lat.lll_reduce(G)
    Uo = np.array(U, dtype=object)
    assert abs(round(np.linalg.det(np.array(U, dtype=float)))) == 1
    R = Uo @ np.array(G, dtype=object) @ Uo.T
    # size reduction: |mu_ij| <= 1/2 implies |R_ij| <= R_jj / 2 + (lower terms); check first row
    assert abs(Fraction(R[1][0])) <= Fraction(R[0][0]) / 2


def test_solve_lp_small():
    # minimize -x - y with x + 2y + s1 = 4, 3x + y + s2 = 6
    A = [[1, 2, 1, 0], [3, 1, 0, 1]]
    status, x, value = lat.solve_lp(A, [4, 6], [-1, -1, 0, 0])
    assert status == "optimal"
    assert value == Fraction(-14, 5)
    assert x[:2] == [Fraction(8, 5), Fraction(6, 5)]


def test_solve_lp_infeasible_and_unbounded():
    assert lat.solve_lp([[1, 1]], [-1], [1, 1])[0] == "infeasible"
    assert lat.solve_lp([[1, -1]], [1], [-1, 0])[0] == "unbounded"


@pytest.mark.parametrize(
    "name, n, perfect, eutactic, strongly, kissing",
    [
        ("E8", None, True, True, True, 240),
        ("D", 4, True, True, True, 24),
        ("Z", 3, False, True, False, 6),
        ("D", 5, True, True, False, 40),
    ],
)
def test_voronoi(name, n, perfect, eutactic, strongly, kissing):
    rep = lat.voronoi_tests(lat.standard(name, n))
    assert (rep.perfect, rep.eutactic, rep.strongly_perfect, rep.kissing) == (perfect, eutactic, strongly, kissing)


def test_e8_shell_strengths():
    E8 = lat.standard("E8")
    assert lat.shell_design_strength(E8, 2, 9).max_strength == 7
    assert lat.shell_design_strength(E8, 4, 9).max_strength == 7


def test_two_shell_cubature_weights_sum_to_one():
    ps = lat.two_shell_cubature_e8()
    assert len(ps) == 2400
    assert sum(ps.weights) == 1


def test_quadratic_classes_e8():
    counts = lat.quadratic_classes(lat.standard("E8"))
    assert counts == {"zero": 1, "isotropic": 135, "anisotropic": 120}


def test_shell_fibers_e8():
    E8 = lat.standard("E8")
    fib2 = lat.shell_fibers(E8, 2)
    assert len(fib2) == 120 and set(fib2.values()) == {2}
    fib4 = lat.shell_fibers(E8, 4)
    assert len(fib4) == 135 and set(fib4.values()) == {16}


def test_neighbor_of_e8_is_even_unimodular_with_240_roots():
    E8 = lat.standard("E8")
    z = (2, 1, 1, 1, 1, 0, 0, 0)
    N = lat.neighbor(E8, z)
    assert N.even and N.unimodular
    assert len(lat.shell(N, 2)) == 240


def test_neighbor_with_norm_four_is_odd_unimodular():
    N = lat.neighbor(lat.standard("E8"), (2, 0, 0, 0, 0, 0, 0, 0))
    assert N.unimodular and not N.even


def test_neighbor_preconditions():
    E8 = lat.standard("E8")
    with pytest.raises(ValidationError):
        lat.neighbor(E8, (1, 1, 0, 0, 0, 0, 0, 0))
    with pytest.raises(ValidationError):
        lat.neighbor(E8, (2, 2, 0, 0, 0, 0, 0, 0))
    with pytest.raises(ValidationError):
        lat.neighbor(E8, (1, 0, 0, 0, 0, 0, 0, 0))
    with pytest.raises(ValidationError):
        lat.neighbor(lat.standard("D", 4), (1, 1, 0, 0))


@pytest.mark.parametrize("x", [(2, 0, 0, 0, 0, 0, 0, 0), (1, 1, 1, 1, 0, 0, 0, 0), (1, 1, -1, 1, 0, 0, 0, 0)])
def test_reflection_equals_neighbour(x):
    check = lat.reflection_image(lat.standard("E8"), x)
    assert check.equal


def test_reflection_needs_norm_four():
    with pytest.raises(ValidationError):
        lat.reflection_image(lat.standard("E8"), (1, 1, 0, 0, 0, 0, 0, 0))


@pytest.mark.parametrize("L", [lat.standard("E8"), lat.standard("D", 5), lat.IntegralLattice([[1, 0], [Fraction(1, 2), Fraction(3, 2)]], "odd")])
def test_text_round_trip(L):
    back = lat.loads_lattice(lat.dumps_lattice(L))
    assert back == L
    assert back.gram == L.gram


def test_text_rejects_mismatched_gram():
    text = "lattice name=x dim=2\nbasis\n1 0\n0 1\ngram\n1 0\n0 2\n"
    with pytest.raises(ValidationError):
        lat.loads_lattice(text)


def test_text_rejects_missing_header():
    with pytest.raises(ValidationError):
        lat.loads_lattice("basis\n1 0\n0 1\n")


def test_vector_budget(monkeypatch):
    monkeypatch.setattr(lat, "MAX_VECTORS", 100)
    with pytest.raises(BudgetExceeded):
        lat.enumerate_shells(lat.standard("E8"), 4)
