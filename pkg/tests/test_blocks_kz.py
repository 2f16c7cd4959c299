from fractions import Fraction

import pytest

from knalg.blocks_kz import (
    BlockBundle,
    conformal_blocks,
    derivative_identities,
    kz_emit,
    pullback,
    rational_reconstruct,
    regular_basis,
)
from knalg.exact_arith import Poly, RationalFunction
from knalg.fermion_rep import FermionModule
from knalg.kn_algebras import CurrentElement, Matrix
from knalg.kn_forms import MarkedConfig, basis_form, order_at_infinity, combine

ONE = MarkedConfig.of([0])
TWO = MarkedConfig.of([0, 1])


def test_classical_vacuum_sector_is_one_dimensional():
    space = conformal_blocks(FermionModule(ONE, 1), 0, -6)
    assert space.dimension == 1 and space.stabilized
    assert space.basis[0].degree == 0


def test_regular_currents_kill_classical_excitations():
    fm = FermionModule(ONE, 1)
    space = conformal_blocks(fm, 0, -6)
    for k in range(1, 5):
        w = fm.apply_current(CurrentElement.basis(ONE, Matrix.identity(1), -k, 1), fm.vacuum_vector(0))
        assert space.in_span(w)


@pytest.mark.parametrize("depth,dim", [(-4, 3), (-6, 4)])
def test_two_point_block_dimensions(depth, dim):
    space = conformal_blocks(FermionModule(TWO, 1), 0, depth)
    assert space.dimension == dim and space.stabilized


def test_dimension_is_invariant_under_relabeling():
    a = conformal_blocks(FermionModule(MarkedConfig.of([0, 2]), 1), 0, -5)
    b = conformal_blocks(FermionModule(MarkedConfig.of([2, 0]), 1), 0, -5)
    assert a.dimension == b.dimension


def test_regular_basis_vanishes_at_infinity():
    for lam, order in ((0, 1), (-1, 2)):
        basis = regular_basis(TWO, lam, -4, -1, order)
        assert basis
        for coeffs in basis:
            assert order_at_infinity(combine(TWO, lam, coeffs)) >= order


def test_classical_pullback_is_translation():
    pb = pullback(ONE, 1)
    assert pb.e_X.rf() == RationalFunction.const(1)
    with pytest.raises(ValueError):
        pullback(ONE, 2)


def test_pullback_accepts_regular_corrections():
    corr = regular_basis(TWO, -1, -3, -1, 2)[0]
    pb = pullback(TWO, 1, corr)
    assert pb.e_X.equals(basis_form(TWO, -1, -1, 1) + combine(TWO, -1, corr))


def test_rational_reconstruction():
    f = RationalFunction(Poly([1, 2]), Poly([-3, 1]))
    samples = [(Fraction(t, 7), f(Fraction(t, 7))) for t in range(-6, 4)]
    assert rational_reconstruct(samples) == f


def test_two_point_jet_identities():
    rep = derivative_identities((0, 1), 1, samples=4, seed=1, q=2, depth=-3)
    assert set(rep) == {"function_regular", "vector_regular", "pullback_bracket", "current_derivative",
                        "sugawara_derivative_scalar"}
    assert all(not r["failures"] for r in rep.values())


def test_three_point_pullback_is_not_regular():
    # documented limitation: from N = 3 on, e_{-1,p} no longer vanishes at infinity
    rep = derivative_identities((0, 1, 3), 1, samples=3, seed=0, with_operators=False)
    assert rep["function_regular"]["failures"]
    assert order_at_infinity(basis_form(TWO, -1, -1, 1)) == 1
    assert order_at_infinity(basis_form(MarkedConfig.of([0, 1, 3]), -1, -1, 1)) == 0


def test_two_point_curvature_vanishes():
    bb = BlockBundle((0, 1), 1, 0, -4, {1: 1, 2: 2}, check=False)
    assert bb.curvature(1, 2) == 0 == bb.curvature(2, 1)


def test_kz_system_two_points():
    out = kz_emit((0, 1), 1, 0, -4, samples=8, seed=0)
    assert out["dimension"] == 3 and out["stabilized"]
    m1, m2 = out["systems"][0]["matrix"], out["systems"][1]["matrix"]
    assert m1 == [[3, 0, 0], [0, 4, 0], [0, 0, 4]]
    assert m2 == [[-x for x in row] for row in m1]
    pole = out["systems"][0]["poles"][0]
    assert pole["simple"] and pole["reconstructed"]
    assert pole["residue_matrix"] == [[-3, 0, 0], [0, -4, 0], [0, 0, -4]]
