import numpy as np
import pytest

from ncgx.errors import GroupNotFinite, MissingJ, NoRealStructure, ZerothOrderViolation
from ncgx.groups import GroupHopfData, Weight, WindowedZ, cyclic
from ncgx.opalg import SIGMA_1, ComplexOperator, HilbertSpace, identity
from ncgx.synthetic import EVEN_ROWS, ODD_ROWS, ko_row_triple, noninvariant_base
from ncgx.triples import (KO_TABLE, SpectralTripleData, alternate_real_structure, bounded_transform,
                          check_equivariance, check_irreducible, check_nondegenerate, check_order_condition,
                          classify_real_structure, group_triple, ko_dims_for, summability_partial_sums,
                          verify_axioms)


@pytest.mark.parametrize("n", sorted(list(ODD_ROWS) + list(EVEN_ROWS)))
def test_each_row_classifies_to_its_ko(n):
    s = classify_real_structure(ko_row_triple(n))
    assert s.ko == n
    eps, eps_p, eps_pp = KO_TABLE[n]
    assert s.signs == (eps, eps_p, eps_pp)


def test_ko_table_rows_are_distinct():
    assert len({KO_TABLE[n] for n in range(0, 8, 2)}) == 4
    assert len({KO_TABLE[n][:2] for n in range(1, 8, 2)}) == 4


def test_undetermined_sign_widens_candidates():
    # D = 0 makes eps' undetermined
    assert ko_dims_for(1, 0, None, False) == frozenset({1, 7})
    t = ko_row_triple(7)
    s = classify_real_structure(t.replace(D=ComplexOperator(np.zeros((2, 2)))))
    assert s.eps_prime == 0 and s.ko_dims == frozenset({1, 7})


def test_no_real_structure():
    t = ko_row_triple(7)
    bad = t.replace(J=ComplexOperator(np.array([[0, 1], [1j, 0]]), antilinear=True))
    with pytest.raises(NoRealStructure):
        classify_real_structure(bad)


def test_zeroth_order_violation():
    t = noninvariant_base().replace(J=ComplexOperator(np.eye(2), antilinear=True))
    with pytest.raises(ZerothOrderViolation):
        classify_real_structure(t)
    with pytest.raises(MissingJ):
        classify_real_structure(noninvariant_base())


@pytest.mark.parametrize("n", [0, 2, 4, 6])
def test_alternate_real_structure_signs(n):
    t = ko_row_triple(n)
    eps, eps_p, eps_pp = KO_TABLE[n]
    s = classify_real_structure(alternate_real_structure(t))
    assert s.signs == (eps * eps_pp, -eps_p, eps_pp)


def test_group_triple_of_z_is_ko_one():
    G = WindowedZ(10)
    t = group_triple(G, Weight.inclusion(G))
    s = classify_real_structure(t, t.interior(3))
    assert s.ko == 1
    assert verify_axioms(t, t.interior(3)).passed


def test_order_conditions_on_z():
    G = WindowedZ(10)
    t = group_triple(G, Weight.inclusion(G))
    w = t.interior(6)
    for k in (0, 1, 2):
        assert check_order_condition(t, k, w).passed
    ta = group_triple(G, Weight.absolute(G))
    rep = check_order_condition(ta, 1, ta.interior(6))
    assert not rep.passed
    assert rep.get("order 1").witness["residual"] > 1


def test_nondegenerate_and_irreducible():
    G = cyclic(2)
    good = group_triple(G, Weight(G, [0.0, 1.0]))
    assert check_nondegenerate(good).passed and check_irreducible(good).passed
    flat = group_triple(G, Weight.constant(G, 1.0))
    assert not check_nondegenerate(flat).passed
    assert not check_irreducible(flat).passed
    with pytest.raises(GroupNotFinite):
        check_nondegenerate(group_triple(WindowedZ(4), Weight.inclusion(WindowedZ(4))))


def test_equivariance_torus(torus):
    w = torus.interior(4)
    rep = check_equivariance(torus, GroupHopfData(torus.group, "inverse"), w)
    assert rep.passed
    assert rep.get("D invariant").passed
    bad = check_equivariance(torus, GroupHopfData(torus.group, "identity"), w)
    assert bad.get("J twisted invariant").witness["g"] == 1


def test_equivariance_noninvariant_reports_d():
    t = noninvariant_base()
    rep = check_equivariance(t, GroupHopfData(t.group, "inverse"))
    c = rep.get("D invariant")
    assert c.report_only and not c.passed and c.residual == pytest.approx(2.0)


def test_axioms_catch_bad_grading():
    space = HilbertSpace(2)
    t = SpectralTripleData(space, [identity(space)], ComplexOperator(SIGMA_1), grading=ComplexOperator(np.eye(2)))
    rep = verify_axioms(t)
    assert not rep.get("grading anticommutes with D").passed


def test_bounded_transform_and_summability():
    t = ko_row_triple(5)
    F = bounded_transform(t).dense()
    assert np.allclose(F, SIGMA_1 / 2)
    sums = summability_partial_sums(t, 2.0)
    assert sums == pytest.approx([0.5, 1.0])
