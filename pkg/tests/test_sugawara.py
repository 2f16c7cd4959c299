from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from knalg.fermion_rep import FermionModule, Truncation
from knalg.kn_algebras import Matrix, gl_basis
from knalg.kn_forms import MarkedConfig, basis_form
from knalg.sugawara import (
    CriticalLevel,
    ReductiveSplit,
    SugawaraOperator,
    detect_level,
    sugawara_coeff,
    window_bound,
)

ONE = MarkedConfig.of([0])
TWO = MarkedConfig.of([0, 1])


def build(cfg, g, orientation=1):
    fm = FermionModule(cfg, g)
    split = ReductiveSplit(g)
    detect_level(fm, split, 0, Truncation(-3), orientation)
    return fm, split, SugawaraOperator(fm, split, orientation)


@pytest.fixture(scope="module")
def classical():
    return build(ONE, 1)


@pytest.fixture(scope="module")
def two_point_gl2():
    return build(TWO, 2)


def test_classical_coefficients_are_kronecker():
    for k in range(-2, 3):
        for n in range(-3, 4):
            for m in range(-3, 4):
                assert sugawara_coeff(ONE, k, 1, n, 1, m, 1) == (1 if n + m == k else 0)


def test_coefficient_window():
    assert window_bound(ONE) == (0, 0)
    for cfg in (TWO, MarkedConfig.of([0, 1, 3])):
        lo, hi = window_bound(cfg)
        assert lo == 0 and hi >= 0


def test_split_constants():
    assert ReductiveSplit(1).kappas() == {"s": 0}
    assert ReductiveSplit(2).kappas() == {"s": 0, "sl": 2}
    assert ReductiveSplit(3).kappas() == {"s": 0, "sl": 3}


@pytest.mark.parametrize("orientation", [1, -1])
def test_fermion_level(orientation):
    fm = FermionModule(ONE, 1)
    assert detect_level(fm, ReductiveSplit(1), 0, Truncation(-3), orientation) == {"s": -orientation}


def test_level_does_not_depend_on_configuration(two_point_gl2):
    _, split, _ = two_point_gl2
    assert split.levels() == {"s": -1, "sl": -1}


def test_prefactors(two_point_gl2):
    _, split, sug = two_point_gl2
    pre = {s.name: sug.prefactor(s) for s in split.summands}
    assert pre == {"s": Fraction(-1, 2), "sl": Fraction(-1, 6)}


def test_critical_level_is_refused():
    fm = FermionModule(ONE, 2)
    split = ReductiveSplit(2)
    for s in split.summands:
        s.level = Fraction(2) if s.name == "sl" else Fraction(-1)
    with pytest.raises(CriticalLevel):
        SugawaraOperator(fm, split, 1)


def test_degree_operator(classical):
    fm, _, sug = classical
    for mono in fm.window_basis(0, Truncation(-4)):
        assert sug.mode(0, 1, {mono: 1}) == {mono: mono.degree - Fraction(1, 2)}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_virasoro_central_charge_one(classical, k):
    # T(e_k) = -L_k, so T([e_k, e_-k]) - [T(e_k), T(e_-k)] = -(k^3 - k)/12
    fm, _, sug = classical
    e, f = basis_form(ONE, -1, k, 1), basis_form(ONE, -1, -k, 1)
    assert sug.projective_defect(e, f, 0, Truncation(-4)) == -Fraction(k ** 3 - k, 12)


def test_fundamental_relation_classical_gl2():
    fm, _, sug = build(ONE, 2)
    e0 = basis_form(ONE, -1, 0, 1)
    assert sug.fundamental_defect(e0, Matrix.unit(2, 1, 2), (1, 1), 0, Truncation(-4)) == {}


@settings(max_examples=8)
@given(st.integers(-2, 2), st.integers(1, 2), st.sampled_from(gl_basis(2)), st.integers(-2, 2), st.integers(1, 2))
def test_fundamental_relation_two_points(two_point_gl2, k, r, x, n, p):
    _, _, sug = two_point_gl2
    assert sug.fundamental_defect(basis_form(TWO, -1, k, r), x, (n, p), 0, Truncation(-3)) == {}


def test_two_point_sugawara_is_projective(two_point_gl2):
    _, _, sug = two_point_gl2
    sug.projective_defect(basis_form(TWO, -1, 1, 1), basis_form(TWO, -1, -1, 2), 0, Truncation(-3))


def test_modes_are_almost_graded(two_point_gl2):
    # degrees count single-particle indices, so one KN degree is Ng steps
    fm, _, sug = two_point_gl2
    for k in (-3, -1, 0, 1):
        for mono in fm.window_basis(0, Truncation(-4)):
            for out in sug.mode(k, 1, {mono: 1}):
                assert fm.Ng * k <= out.degree - mono.degree <= fm.Ng * (k + 2)
