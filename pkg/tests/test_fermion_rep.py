from fractions import Fraction

import pytest
from sympy.functions.combinatorial.numbers import partition as npartitions
from hypothesis import given, settings, strategies as st

from knalg.fermion_rep import (
    FermionModule,
    NotScalar,
    Truncation,
    TruncationOverflow,
    WedgeMonomial,
    WedgeVector,
    _scalar_of,
    partitions,
)
from knalg.kn_algebras import CurrentElement, Matrix, gl_basis
from knalg.kn_forms import MarkedConfig, basis_form

ONE = MarkedConfig.of([0])
TWO = MarkedConfig.of([0, 1])


def cur(cfg, x, n, p=1):
    return CurrentElement.basis(cfg, x, n, p)


@pytest.mark.parametrize("n", range(0, 13))
def test_partitions_match_sympy(n):
    assert len(list(partitions(n))) == npartitions(n)


@pytest.mark.parametrize("cfg,g", [(ONE, 1), (TWO, 1), (TWO, 2)])
def test_slice_dimensions_are_partition_numbers(cfg, g):
    fm = FermionModule(cfg, g)
    for d in range(0, -9, -1):
        monos = fm.monomials_of_degree(0, d)
        assert len(monos) == npartitions(-d)
        assert all(m.degree == d for m in monos)


@settings(max_examples=30)
@given(st.integers(-50, 50))
def test_index_map_is_bijective(M):
    fm = FermionModule(MarkedConfig.of([0, 1, 2]), 2)
    assert fm.index(*fm.unindex(M)) == M
    n, p, i = fm.unindex(M)
    assert 1 <= p <= 3 and 1 <= i <= 2


@pytest.mark.parametrize("charge,expected", [(-1, 2), (0, 1), (2, -1)])
def test_vacuum_eigenvalue_of_constant_current(charge, expected):
    fm = FermionModule(ONE, 1)
    out = fm.apply_current(cur(ONE, Matrix.identity(1), 0), fm.vacuum_vector(charge))
    assert out == {fm.vacuum(charge): expected}


def test_two_point_gl2_vacuum_eigenvalue():
    fm = FermionModule(TWO, 2)
    out = fm.apply_current(cur(TWO, Matrix.identity(2), 0, 1), fm.vacuum_vector(0))
    assert out == {fm.vacuum(0): 2}


def test_heisenberg_level_on_classical_wedge():
    fm = FermionModule(ONE, 1)
    one = Matrix.identity(1)
    assert fm.projective_defect(cur(ONE, one, 1), cur(ONE, one, -1), 0, Truncation(-4)) == -1


def test_level_is_configuration_independent():
    fm = FermionModule(TWO, 1)
    one = Matrix.identity(1)
    assert fm.projective_defect(cur(TWO, one, 1), cur(TWO, one, -1), 0, Truncation(-4)) == -1


def test_weight_operator_is_diagonal_classically():
    fm = FermionModule(ONE, 1)
    e0 = basis_form(ONE, -1, 0, 1)
    for mono in fm.window_basis(0, Truncation(-5)):
        assert fm.apply_vector_field(e0, {mono: 1}) == ({mono: mono.degree} if mono.degree else {})


def test_degree_shift_of_currents():
    fm = FermionModule(ONE, 1)
    v = {fm.from_partition(0, (2, 1)): Fraction(1)}
    for k in (-3, -1, 1):
        assert fm.apply_current(cur(ONE, Matrix.identity(1), k), v).degrees() <= {-3 + k}


def test_window_monomials_have_nonpositive_degree():
    fm = FermionModule(TWO, 2)
    for charge in (-1, 0, 1):
        assert all(m.degree <= 0 for m in fm.window_basis(charge, Truncation(-6)))


ops = st.tuples(st.sampled_from(gl_basis(2)), st.integers(-3, 3), st.integers(1, 2))


@settings(max_examples=40)
@given(st.lists(ops, min_size=1, max_size=3), st.integers(-1, 1))
def test_currents_preserve_charge(seq, charge):
    fm = FermionModule(TWO, 2)
    v = fm.vacuum_vector(charge)
    for x, n, p in seq:
        v = fm.apply_current(cur(TWO, x, n, p), v)
    assert v.charges() <= {charge}


@settings(max_examples=20)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 2), st.integers(1, 2))
def test_current_commutator_is_projective(n, m, p, r):
    fm = FermionModule(TWO, 2)
    x, y = Matrix.unit(2, 1, 2), Matrix.unit(2, 2, 1)
    fm.projective_defect(cur(TWO, x, n, p), cur(TWO, y, m, r), 0, Truncation(-4))


def test_vector_field_commutator_is_projective():
    fm = FermionModule(TWO, 1)
    e, f = basis_form(TWO, -1, 2, 1), basis_form(TWO, -1, -2, 2)
    fm.projective_defect(e, f, 0, Truncation(-4))


def test_monomial_json_round_trip():
    m = WedgeMonomial(1, (4, 6), (-1, 2))
    assert WedgeMonomial.from_json(m.as_json()) == m
    with pytest.raises(ValueError):
        WedgeMonomial(0, (1,), ())


def test_truncation_guard():
    fm = FermionModule(ONE, 1)
    with pytest.raises(TruncationOverflow):
        fm.apply_current(cur(ONE, Matrix.identity(1), -3), fm.vacuum_vector(0), Truncation(-2))


def test_wedge_vector_drops_zeros():
    m = WedgeMonomial(0)
    assert WedgeVector({m: 0}) == {}
    assert (WedgeVector({m: 1}) - WedgeVector({m: 1})) == {}


def test_off_diagonal_defect_is_not_scalar():
    with pytest.raises(NotScalar):
        _scalar_of({WedgeMonomial(0): 1, WedgeMonomial(0, (0,), (-1,)): 1}, WedgeMonomial(0), None)
