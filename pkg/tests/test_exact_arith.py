from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from knalg.exact_arith import (
    INF,
    JetScalar,
    Poly,
    RationalFunction,
    ZeroDenominator,
    d1_part,
    d2_part,
    d12_part,
    frac_str,
    jet,
    laurent_expand,
    order_at,
    parse_frac,
    residue_at,
    residue_at_infinity,
    scalar_from_json,
    scalar_to_json,
    value,
)

Z = sp.Symbol("z")

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
jets = st.builds(JetScalar, fracs, fracs, fracs, fracs)
small_polys = st.lists(fracs, min_size=1, max_size=4).map(Poly)


def to_sympy(f: RationalFunction):
    num = sum(sp.Rational(c.numerator, c.denominator) * Z ** k for k, c in enumerate(f.num.c))
    den = sum(sp.Rational(c.numerator, c.denominator) * Z ** k for k, c in enumerate(f.den.c))
    return num / den


def sym(x: Fraction):
    return sp.Rational(x.numerator, x.denominator)


@given(jets, jets, jets)
def test_jet_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(jets)
def test_jet_inverse(a):
    if value(a) == 0:
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == 1


def test_epsilons_square_to_zero():
    e1, e2 = jet(0, 1), jet(0, 0, 1)
    assert e1 * e1 == 0 and e2 * e2 == 0
    assert d12_part(e1 * e2) == 1


@given(st.lists(fracs, min_size=1, max_size=5), fracs)
def test_jet_evaluation_is_taylor(coeffs, x0):
    # p(x0 + e1 + e2) = p + p'(e1 + e2) + p'' e1 e2
    p = Poly(coeffs)
    v = p(JetScalar(x0, 1, 1, 0))
    expr = sum(sym(c) * Z ** k for k, c in enumerate(coeffs))
    assert value(v) == expr.subs(Z, sym(x0))
    assert d1_part(v) == d2_part(v) == sp.diff(expr, Z).subs(Z, sym(x0))
    assert d12_part(v) == sp.diff(expr, Z, 2).subs(Z, sym(x0))


@given(small_polys, small_polys, small_polys)
def test_rational_function_field_ops(a, b, c):
    if c.is_zero():
        return
    f, g = RationalFunction(a, c), RationalFunction(b, c)
    assert sp.simplify(to_sympy(f + g) - (to_sympy(f) + to_sympy(g))) == 0
    assert sp.simplify(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0
    assert sp.simplify(to_sympy(f.deriv()) - sp.diff(to_sympy(f), Z)) == 0


def test_canonical_form_is_unique():
    f = RationalFunction(Poly([-1, 0, 1]), Poly([-2, 2]))  # (z^2-1)/(2z-2)
    assert f == RationalFunction(Poly([Fraction(1, 2), Fraction(1, 2)]))
    assert f.den == Poly([1])


def test_zero_denominator():
    with pytest.raises(ZeroDenominator):
        RationalFunction(Poly([1]), Poly([]))


@pytest.mark.parametrize("k", [-3, -1, 0, 2])
def test_linear_power_with_moving_root(k):
    root = JetScalar(Fraction(1, 3), 1, 0, 0)
    f = RationalFunction.linear_power(root, k)
    base = RationalFunction.linear_power(Fraction(1, 3), k)
    # d/d eps (z - a - eps)^k = -k (z - a)^(k-1)
    assert f.value_part() == base
    assert f.d1() == RationalFunction.linear_power(Fraction(1, 3), k - 1).scale(-k)


@settings(max_examples=40)
@given(small_polys, st.lists(fracs, min_size=1, max_size=3, unique=True), fracs)
def test_residues_match_sympy(num, roots, c0):
    den = Poly([1])
    for r in roots:
        den = den * Poly.linear(r)
    f = RationalFunction(num, den)
    fs = to_sympy(f)
    for r in roots + [c0]:
        assert residue_at(f, r) == sp.residue(fs, Z, sym(r))
    # residue theorem on the sphere
    assert sum((residue_at(f, r) for r in roots), Fraction(0)) + residue_at_infinity(f) == 0


@settings(max_examples=30)
@given(small_polys, fracs, fracs)
def test_laurent_expansion_matches_sympy(num, r, c0):
    f = RationalFunction(num, Poly.linear(r) * Poly.linear(r))
    if f.is_zero():
        return
    lead = order_at(f, c0)
    exp = laurent_expand(f, c0, 4)
    ser = sp.series(to_sympy(f).subs(Z, Z + sym(c0)), Z, 0, lead + 4).removeO()
    for k in range(lead, lead + 4):
        assert exp.coefficient(k) == ser.coeff(Z, k)


def test_order_at_infinity():
    assert order_at(RationalFunction(Poly([0, 0, 1])), INF) == -2
    assert order_at(RationalFunction(Poly([1]), Poly([0, 1])), INF) == 1


@given(fracs)
def test_frac_round_trip(x):
    assert parse_frac(frac_str(x)) == x
    assert scalar_from_json(scalar_to_json(x)) == x


@given(jets)
def test_scalar_json_round_trip(a):
    assert scalar_from_json(scalar_to_json(a)) == a
