from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from knalg.exact_arith import JetScalar, Poly, RationalFunction, value
from knalg.kn_forms import (
    MarkedConfig,
    basis_form,
    basis_form_by_solve,
    constant_one,
    expand_in_basis,
    form_orders,
    jet_derivative,
    kn_pairing,
    lie_derivative,
    pairing_at_infinity,
)

small = st.integers(-4, 4)
points = st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=4), min_size=1, max_size=3, unique=True)


def test_classical_functions_are_monomials():
    cfg = MarkedConfig.of([0])
    for n in range(-5, 6):
        assert basis_form(cfg, 0, n, 1).rf() == RationalFunction.linear_power(0, n)


def test_classical_vector_fields_are_witt_generators():
    cfg = MarkedConfig.of([0])
    for n in range(-3, 4):
        assert basis_form(cfg, -1, n, 1).rf() == RationalFunction.linear_power(0, n + 1)


def test_two_point_function_example():
    cfg = MarkedConfig.of([0, 1])
    f = basis_form(cfg, 0, 0, 1)
    assert f.rf() == RationalFunction(Poly([1, -1]))
    assert form_orders(f, cfg) == {1: 0, 2: 1, "inf": -1}


@pytest.mark.parametrize("lam", [-1, 0, 1, 2])
@pytest.mark.parametrize("n", [-2, 0, 3])
def test_closed_form_matches_linear_solve(lam, n):
    cfg = MarkedConfig.of([0, Fraction(1, 2), -2])
    for p in (1, 2, 3):
        assert basis_form(cfg, lam, n, p).equals(basis_form_by_solve(cfg, lam, n, p))


@settings(max_examples=25, deadline=None)
@given(points, st.sampled_from([-1, 0, 1, 2]), small, small)
def test_duality(pts, lam, n, m):
    cfg = MarkedConfig.of(pts)
    for p in range(1, cfg.N + 1):
        for r in range(1, cfg.N + 1):
            v = kn_pairing(basis_form(cfg, lam, n, p), basis_form(cfg, 1 - lam, m, r), cfg)
            assert v == (1 if (m == -n and p == r) else 0)


@settings(max_examples=25, deadline=None)
@given(points, st.sampled_from([0, 1]), small, small)
def test_pairing_contour_can_be_taken_at_infinity(pts, lam, n, m):
    cfg = MarkedConfig.of(pts)
    f, g = basis_form(cfg, lam, n, 1), basis_form(cfg, 1 - lam, m, cfg.N)
    assert kn_pairing(f, g, cfg) == pairing_at_infinity(f, g)


@settings(max_examples=20, deadline=None)
@given(points, small)
def test_orders_of_basis_elements(pts, n):
    cfg = MarkedConfig.of(pts)
    N = cfg.N
    for lam in (-1, 0, 1):
        for p in range(1, N + 1):
            o = form_orders(basis_form(cfg, lam, n, p), cfg)
            assert o[p] == n - lam
            assert all(o[i] == n + 1 - lam for i in range(1, N + 1) if i != p)


def test_identity_is_sum_of_degree_zero_functions():
    cfg = MarkedConfig.of([0, 1, 3])
    total = basis_form(cfg, 0, 0, 1) + basis_form(cfg, 0, 0, 2) + basis_form(cfg, 0, 0, 3)
    assert total.equals(constant_one(cfg))


def test_lie_derivative_classical():
    cfg = MarkedConfig.of([0])
    for n in range(-3, 4):
        for m in range(-3, 4):
            got = lie_derivative(basis_form(cfg, -1, n, 1), basis_form(cfg, 0, m, 1))
            assert got.rf() == RationalFunction.linear_power(0, n + m).scale(m)


def test_expansion_round_trip():
    cfg = MarkedConfig.of([0, 1])
    f = basis_form(cfg, 0, 1, 1).tensor(basis_form(cfg, 0, -1, 2))
    coeffs = expand_in_basis(f, cfg)
    rebuilt = None
    for (k, t), c in coeffs.items():
        term = basis_form(cfg, 0, k, t).scale(c)
        rebuilt = term if rebuilt is None else rebuilt + term
    assert rebuilt.equals(f)


@pytest.mark.parametrize("lam,n,p", [(0, 2, 1), (0, -1, 2), (-1, 0, 1), (-1, -2, 2), (1, 1, 1)])
def test_jet_derivative_matches_sympy(lam, n, p):
    a, b = Fraction(1, 3), Fraction(-2)
    cfg = MarkedConfig.of([JetScalar(a, 1, 0, 0), b])
    d, red = jet_derivative(basis_form(cfg, lam, n, p), cfg, 1)
    assert red == MarkedConfig.of([a, b])
    z, t = sp.symbols("z t")
    pts = [t, sp.Rational(b.numerator, b.denominator)]
    e_other = n + 1 - lam
    expr = sp.Integer(1)
    for i, zi in enumerate(pts, start=1):
        expr *= (z - zi) ** (n - lam if i == p else e_other)
        if i != p:
            expr *= (pts[p - 1] - zi) ** (-e_other)
    want = sp.diff(expr, t).subs(t, sp.Rational(a.numerator, a.denominator))
    got = d.rf()
    num = sum(sp.Rational(c.numerator, c.denominator) * z ** k for k, c in enumerate(got.num.c))
    den = sum(sp.Rational(c.numerator, c.denominator) * z ** k for k, c in enumerate(got.den.c))
    assert sp.simplify(num / den - want) == 0


def test_jet_derivative_agrees_with_nilpotent_part():
    cfg = MarkedConfig.of([JetScalar(0, 1, 0, 0), 1])
    f = basis_form(cfg, 0, 1, 2)
    d, _ = jet_derivative(f, cfg, 1)
    assert d.rf() == f.rf().d1()


def test_config_validation():
    with pytest.raises(ValueError):
        MarkedConfig.of([])
    with pytest.raises(ValueError):
        MarkedConfig.of([1, JetScalar(1, 1, 0, 0)])
    assert value(MarkedConfig.of([0, 1]).with_jets({2: 2}).point(2)) == 1
