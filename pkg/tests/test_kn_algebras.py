from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from knalg.kn_algebras import (
    CurrentElement,
    DiffOpElement,
    Matrix,
    act_on_current,
    bracket_currents,
    bracket_diffop,
    bracket_expansion,
    gl_basis,
    one_as_sum,
    product_expansion,
    regular_function_basis,
    strip_constants_KL,
    structure_constants,
    subalgebra_member,
)
from knalg.kn_forms import MarkedConfig, basis_form, combine, lie_derivative, order_at_infinity

TWO = MarkedConfig.of([0, 1])
THREE = MarkedConfig.of([0, 1, -2])
idx2 = st.tuples(st.integers(-3, 3), st.integers(1, 2))
idx3 = st.tuples(st.integers(-2, 2), st.integers(1, 3))


def _vec(cfg, d: dict):
    return combine(cfg, -1, d)


def test_witt_table():
    t = structure_constants(MarkedConfig.of([0]), "vector", (-4, 4))
    assert (t.R, t.S) == (0, 0)
    for ((n, _), (m, _)), out in t.entries.items():
        assert out == {(n + m, 1): Fraction(m - n)}


def test_laurent_table():
    t = structure_constants(MarkedConfig.of([0]), "function", (-4, 4))
    assert (t.R, t.S) == (0, 0)
    assert all(out == {(a[0] + b[0], 1): 1} for (a, b), out in t.entries.items())


def test_two_point_product_support():
    assert {k[0] for k in product_expansion(TWO, (0, 1), (0, 2))} <= {0, 1}


def test_two_point_bracket_lower_bound():
    assert all(k[0] >= 0 for k in bracket_expansion(TWO, (0, 1), (0, 2)))


def test_almost_grading_is_finite():
    t = structure_constants(THREE, "function", (-2, 2))
    assert 0 <= t.R and 0 <= t.S <= 3


def test_gl2_current_bracket():
    cfg = MarkedConfig.of([0])
    E12, E21 = Matrix.unit(2, 1, 2), Matrix.unit(2, 2, 1)
    H = Matrix.unit(2, 1, 1) - Matrix.unit(2, 2, 2)
    for n in range(-2, 3):
        for m in range(-2, 3):
            got = bracket_currents(CurrentElement.basis(cfg, E12, n, 1), CurrentElement.basis(cfg, E21, m, 1))
            assert got == CurrentElement.basis(cfg, H, n + m, 1)


def test_vector_field_acts_on_heisenberg_current():
    cfg = MarkedConfig.of([0])
    one = Matrix.identity(1)
    for n in range(-2, 3):
        for m in range(-2, 3):
            got = act_on_current(basis_form(cfg, -1, n, 1), CurrentElement.basis(cfg, one, m, 1))
            assert got == CurrentElement.basis(cfg, one, n + m, 1).scale(m)


@settings(max_examples=30)
@given(idx3, idx3, idx3)
def test_vector_jacobi(a, b, c):
    e, f, g = (basis_form(THREE, -1, *i) for i in (a, b, c))
    s = (lie_derivative(lie_derivative(e, f), g) + lie_derivative(lie_derivative(f, g), e)
         + lie_derivative(lie_derivative(g, e), f))
    assert s.is_zero()


@settings(max_examples=30)
@given(idx2, idx2)
def test_bracket_expansion_antisymmetric_and_exact(a, b):
    ab, ba = bracket_expansion(TWO, a, b), bracket_expansion(TWO, b, a)
    assert ab == {k: -v for k, v in ba.items()}
    want = lie_derivative(basis_form(TWO, -1, *a), basis_form(TWO, -1, *b))
    assert _vec(TWO, ab).equals(want) if ab else want.is_zero()


@settings(max_examples=30)
@given(idx2, idx2, idx2)
def test_product_is_associative(a, b, c):
    f = basis_form(TWO, 0, *a).tensor(basis_form(TWO, 0, *b)).tensor(basis_form(TWO, 0, *c))
    g = basis_form(TWO, 0, *a).tensor(basis_form(TWO, 0, *b).tensor(basis_form(TWO, 0, *c)))
    assert f.equals(g)


@settings(max_examples=20)
@given(idx2, idx2, st.sampled_from(gl_basis(2)), st.sampled_from(gl_basis(2)))
def test_vector_fields_act_by_derivations_on_currents(a, b, x, y):
    e = basis_form(TWO, -1, 1, 1)
    X, Y = CurrentElement.basis(TWO, x, *a), CurrentElement.basis(TWO, y, *b)
    lhs = act_on_current(e, bracket_currents(X, Y))
    rhs = bracket_currents(act_on_current(e, X), Y) + bracket_currents(X, act_on_current(e, Y))
    assert lhs == rhs


def test_diffop_bracket_mixes_action():
    cfg = MarkedConfig.of([0])
    one = Matrix.identity(1)
    zero_cur = CurrentElement.from_dict(cfg, 1, {})
    zero_vec = basis_form(cfg, -1, 0, 1).scale(0)
    D1 = DiffOpElement(zero_cur, basis_form(cfg, -1, 1, 1))
    D2 = DiffOpElement(CurrentElement.basis(cfg, one, 2, 1), zero_vec)
    out = bracket_diffop(D1, D2)
    assert out.current == CurrentElement.basis(cfg, one, 3, 1).scale(2)
    assert out.vector.is_zero()


@pytest.mark.parametrize("cfg", [MarkedConfig.of([0]), TWO, THREE])
def test_negative_functions_vanish_at_infinity(cfg):
    N = cfg.N
    for n in range(-4, 0):
        for p in range(1, N + 1):
            assert order_at_infinity(basis_form(cfg, 0, n, p)) == -N * (n + 1) + 1


@pytest.mark.parametrize("cfg", [MarkedConfig.of([0]), TWO, THREE])
def test_triangular_pieces(cfg):
    for p in range(1, cfg.N + 1):
        assert subalgebra_member(basis_form(cfg, -1, 1, p), "plus", cfg)
        assert not subalgebra_member(basis_form(cfg, -1, 0, p), "plus", cfg)
    K, L = strip_constants_KL(cfg)
    for p in range(1, cfg.N + 1):
        assert subalgebra_member(basis_form(cfg, 0, -K - 1, p), "minus", cfg)
        assert subalgebra_member(basis_form(cfg, 0, -K - 1, p), ("regular", 1), cfg)


def test_classical_strip_constants():
    assert strip_constants_KL(MarkedConfig.of([0])) == (0, 1)


def test_one_is_sum_of_degree_zero():
    assert one_as_sum(THREE) == {(0, 1): 1, (0, 2): 1, (0, 3): 1}


def test_regular_functions_vanish_at_infinity():
    basis = regular_function_basis(TWO, -3, 0)
    assert basis
    for vec in basis:
        f = combine(TWO, 0, dict(vec))
        assert order_at_infinity(f) >= 1


def test_matrix_algebra():
    x, y = Matrix.unit(2, 1, 2), Matrix.unit(2, 2, 1)
    assert x.bracket(y) == Matrix.unit(2, 1, 1) - Matrix.unit(2, 2, 2)
    assert (x @ y).trace() == 1
    assert len(gl_basis(3)) == 9
