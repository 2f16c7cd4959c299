from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from knalg.cocycles_central import (
    AffineElement,
    BilinearFormGL,
    affine_bracket,
    basis_evaluator,
    check_local,
    coboundary_for_affine_change,
    coboundary_for_projective_change,
    cocycle_current,
    cocycle_function,
    cocycle_mixing,
    cocycle_vector,
)
from knalg.kn_algebras import CurrentElement, Matrix, bracket_currents, gl_basis
from knalg.kn_forms import MarkedConfig, basis_form, lie_derivative

ONE = MarkedConfig.of([0])
TWO = MarkedConfig.of([0, Fraction(1, 2)])
THREE = MarkedConfig.of([0, 1, -3])
deg = st.integers(-6, 6)


@given(deg, deg, st.sampled_from([1, -1]))
def test_classical_function_cocycle(n, m, sign):
    got = cocycle_function(basis_form(ONE, 0, n, 1), basis_form(ONE, 0, m, 1), ONE, sign)
    assert got == sign * (m if n + m == 0 else 0)


@given(deg, deg)
def test_virasoro_cocycle(n, m):
    got = cocycle_vector(basis_form(ONE, -1, n, 1), basis_form(ONE, -1, m, 1), ONE)
    assert got == (Fraction(n ** 3 - n, 12) if n + m == 0 else 0)


@given(deg, deg)
def test_classical_mixing_cocycle(n, m):
    got = cocycle_mixing(basis_form(ONE, -1, n, 1), basis_form(ONE, 0, m, 1), ONE)
    assert got == (m * (m - 1) if n + m == 0 else 0)


@given(deg, deg)
def test_heisenberg_current_cocycle(n, m):
    one = Matrix.identity(1)
    got = cocycle_current(CurrentElement.basis(ONE, one, n, 1), CurrentElement.basis(ONE, one, m, 1),
                          BilinearFormGL())
    assert got == (m if n + m == 0 else 0)


def test_heisenberg_central_term():
    one = Matrix.identity(1)
    out = affine_bracket(AffineElement(CurrentElement.basis(ONE, one, 1, 1)),
                         AffineElement(CurrentElement.basis(ONE, one, -1, 1)), BilinearFormGL())
    assert out.current.is_zero() and out.central == -1


@pytest.mark.parametrize("cfg", [ONE, TWO, THREE], ids=["N1", "N2", "N3"])
@pytest.mark.parametrize("kind", ["function", "vector", "mixing", "current"])
def test_locality_upper_bound_is_zero(cfg, kind):
    rep = check_local(basis_evaluator(kind, cfg), cfg, (-5, 5))
    assert rep.is_local and rep.upper == 0


idx3 = st.tuples(st.integers(-3, 3), st.integers(1, 3))


@settings(max_examples=25)
@given(idx3, idx3, idx3)
def test_vector_cocycle_identity(a, b, c):
    e, f, g = (basis_form(THREE, -1, *i) for i in (a, b, c))
    s = (cocycle_vector(lie_derivative(e, f), g, THREE) + cocycle_vector(lie_derivative(f, g), e, THREE)
         + cocycle_vector(lie_derivative(g, e), f, THREE))
    assert s == 0


@settings(max_examples=25)
@given(idx3, idx3, idx3)
def test_function_cocycle_is_l_invariant(a, b, c):
    e, A, B = basis_form(THREE, -1, *a), basis_form(THREE, 0, *b), basis_form(THREE, 0, *c)
    assert cocycle_function(lie_derivative(e, A), B, THREE) + cocycle_function(A, lie_derivative(e, B), THREE) == 0


@settings(max_examples=25)
@given(idx3, idx3, idx3)
def test_mixing_cocycle_identity(a, b, c):
    e, f, A = basis_form(THREE, -1, *a), basis_form(THREE, -1, *b), basis_form(THREE, 0, *c)
    s = (cocycle_mixing(lie_derivative(e, f), A, THREE) - cocycle_mixing(e, lie_derivative(f, A), THREE)
         + cocycle_mixing(f, lie_derivative(e, A), THREE))
    assert s == 0


@settings(max_examples=20)
@given(idx3, idx3, idx3, st.lists(st.sampled_from(gl_basis(2)), min_size=3, max_size=3),
       st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_current_cocycle_identity(a, b, c, mats, r2):
    alpha = BilinearFormGL(Fraction(1), r2)
    X, Y, Z = (CurrentElement.basis(THREE, m, *i) for m, i in zip(mats, (a, b, c)))
    s = (cocycle_current(bracket_currents(X, Y), Z, alpha) + cocycle_current(bracket_currents(Y, Z), X, alpha)
         + cocycle_current(bracket_currents(Z, X), Y, alpha))
    assert s == 0


def test_changing_projective_connection_is_a_coboundary():
    phi = coboundary_for_projective_change(TWO, basis_form(TWO, 2, 0, 1), (-2, 2))
    assert phi is not None


def test_changing_affine_connection_is_a_coboundary():
    phi = coboundary_for_affine_change(TWO, basis_form(TWO, 1, 0, 1), (-2, 2))
    assert phi is not None


def test_orientation_flips_every_central_term():
    for kind in ("function", "vector", "mixing", "current"):
        plus, minus = basis_evaluator(kind, TWO, 1), basis_evaluator(kind, TWO, -1)
        for a, b in (((1, 1), (-1, 1)), ((2, 2), (-2, 1)), ((0, 1), (0, 2))):
            assert plus(a, b) == -minus(a, b)
