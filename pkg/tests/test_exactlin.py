from fractions import Fraction as Q
from itertools import permutations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from hpt import _linalg
from hpt.exactlin import (GradedComplex, GradedMap, betti_numbers, boundary_of_map,
                          compose, compose_perm, homology, identity, permute_tensor,
                          q_coefficient, tensor, tensor_map, tensor_power, zero_map)
from hpt.contraction import contraction_from_homology
from hpt.random_instances import random_complex, random_map
from hpt.schur import disc_complex

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def matrices(max_n=5):
    return st.integers(1, max_n).flatmap(
        lambda r: st.integers(1, max_n).flatmap(
            lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c),
                               min_size=r, max_size=r)))


# --- dense linear algebra against sympy ------------------------------------

@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_sympy(m):
    assert _linalg.rank(m, len(m[0])) == sympy.Matrix(m).rank()


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_nullspace_is_kernel_of_right_size(m):
    n = len(m[0])
    ns = _linalg.nullspace(m, n)
    assert len(ns) == n - sympy.Matrix(m).rank()
    for _, v in ns:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


@settings(max_examples=100, deadline=None)
@given(matrices(), st.data())
def test_solve_consistent_and_inconsistent(m, data):
    n = len(m[0])
    x = data.draw(st.lists(rationals, min_size=n, max_size=n))
    rhs = [sum(a * b for a, b in zip(row, x)) for row in m]
    v = _linalg.solve(m, n, rhs)
    assert v is not None
    assert [sum(a * b for a, b in zip(row, v)) for row in m] == rhs
    bumped = list(rhs)
    bumped[0] += 1
    aug_rank = sympy.Matrix([r + [b] for r, b in zip(m, bumped)]).rank()
    if aug_rank > sympy.Matrix(m).rank():
        assert _linalg.solve(m, n, bumped) is None


def test_inverse_and_singular():
    m = [[Q(2), Q(1)], [Q(1), Q(1)]]
    assert _linalg.inverse(m) == [[1, -1], [-1, 2]]
    with pytest.raises(ZeroDivisionError):
        _linalg.inverse([[Q(1), Q(2)], [Q(2), Q(4)]])


# --- maps --------------------------------------------------------------------

def rank4():
    return GradedComplex.from_generators(
        [("a", 1), ("b", 0), ("c", 0), ("e", 1)], {"a": [(2, "b")], "e": [(1, "c")]})


def test_compose_identity_and_dd():
    A = rank4()
    f = random_map(1, A, A, 0)
    assert compose(identity(A), f) == f
    assert compose(A.d, A.d).is_zero()


def test_compose_matches_dense_product():
    A = GradedComplex({"p": 0, "q": 0, "r": 0})
    f, g = random_map(2, A, A, 0, density=1), random_map(3, A, A, 0, density=1)
    M = sympy.Matrix(g.matrix()) * sympy.Matrix(f.matrix())
    assert sympy.Matrix(compose(g, f).matrix()) == M


def test_boundary_of_map():
    A = rank4()
    assert boundary_of_map(A.d).is_zero()
    c = contraction_from_homology(A)
    assert boundary_of_map(c.h) == compose(c.g, c.f) - identity(A)
    f = random_map(4, A, A, 1, density=1)
    lhs = boundary_of_map(f)
    # entrywise: d f + f d for an odd map
    for k in A.basis:
        want = {}
        for t, x in f.cols.get(k, {}).items():
            for u, y in A.d.cols.get(t, {}).items():
                want[u] = want.get(u, 0) + x * y
        for t, x in A.d.cols.get(k, {}).items():
            for u, y in f.cols.get(t, {}).items():
                want[u] = want.get(u, 0) + x * y
        assert lhs.image(k) == {u: v for u, v in want.items() if v}


def test_tensor_identities():
    A = rank4()
    AA = tensor_power(A, 2)
    assert tensor_map(identity(A), identity(A)) == identity(AA)
    assert compose(AA.d, AA.d).is_zero()
    # interchange law with the Koszul sign, rank <= 3
    B = GradedComplex({"x": 0, "y": 1, "z": 1})
    f, f2 = random_map(5, B, B, 1), random_map(6, B, B, 1)
    g, g2 = random_map(7, B, B, 1), random_map(8, B, B, 0)
    lhs = compose(tensor_map(f, g), tensor_map(f2, g2))
    rhs = tensor_map(compose(f, f2), compose(g, g2)) * (-1) ** (g.degree * f2.degree)
    assert lhs == rhs


def test_tensor_associativity_is_literal():
    A = rank4()
    assert tensor(tensor(A, A), A) == tensor(A, A, A) == tensor_power(A, 3)


def test_permutations():
    A = GradedComplex({"x": 1, "y": 1})
    assert permute_tensor((0, 1), 2, A) == identity(tensor_power(A, 2))
    P = permute_tensor((1, 0), 2, A)
    assert P.image(("x", "y")) == {("y", "x"): -1}
    B = GradedComplex({"u": 0, "v": 1})
    for s in permutations(range(3)):
        for t in permutations(range(3)):
            assert permute_tensor(compose_perm(s, t), 3, B) == compose(
                permute_tensor(s, 3, B), permute_tensor(t, 3, B))


# --- homology ----------------------------------------------------------------

def test_homology_trivial_cases():
    A = GradedComplex({"a": 0, "b": 3})
    H, f, g = homology(A)
    assert len(H) == 2 and compose(f, g) == identity(H)
    assert len(homology(disc_complex(1, 2))[0]) == 0


def _sympy_betti(A):
    out = {}
    for n in A.degrees():
        keys, low, high = (A.basis_in_degree(n), A.basis_in_degree(n - 1),
                           A.basis_in_degree(n + 1))
        rk = lambda src, tgt: (sympy.Matrix([[A.d.image(s).get(t, 0) for s in src]
                                             for t in tgt]).rank() if src and tgt else 0)
        b = len(keys) - rk(keys, low) - rk(high, keys)
        if b:
            out[n] = b
    return out


@pytest.mark.parametrize("seed", range(30))
def test_betti_numbers_against_sympy(seed):
    A = random_complex(seed, rank=6)
    assert betti_numbers(A) == _sympy_betti(A)


def test_q_coefficients():
    assert q_coefficient(1, 0) == 1
    assert q_coefficient(3, 1) == Q(1, 6)
    assert all(q_coefficient(n, n) == 0 for n in range(1, 9))


def test_ill_formed_complexes_rejected():
    with pytest.raises(ValueError):
        GradedComplex({"x": 1, "y": 1}, {"x": {"y": 1}})
    with pytest.raises(ValueError):
        GradedComplex({"x": 1, "y": 0}, {"x": {"y": 1}, "y": {"x": 1}})
    A = rank4()
    with pytest.raises(ValueError):
        GradedMap(A, A, 0, {"a": {"b": 1}}, check=True)
    assert zero_map(A, A).is_zero()
