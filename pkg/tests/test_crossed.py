import numpy as np
import pytest

from ncgx.crossed import (ODD_FROM_EVEN, PI1_LAMBDA, PI2_GAMMA, CrossedElement, build_crossed,
                          check_crossed_identities, check_dual_symmetry, check_equicontinuity, default_characters,
                          dhat_spectrum_check, intertwiner_residuals)
from ncgx.errors import GroupNotAbelian, MissingUnitaries
from ncgx.groups import Weight, WindowedZ, cyclic, symmetric3
from ncgx.opalg import HilbertSpace, diagonal, identity
from ncgx.synthetic import even_tilde_base, ko_row_triple, noninvariant_base
from ncgx.triples import SpectralTripleData


def test_identities_torus_pi2(torus_crossed):
    rep = check_crossed_identities(torus_crossed)
    assert rep.passed, [c.line() for c in rep.failures()]
    assert torus_crossed.space.dim == 25 * 25 * 2


def test_identities_torus_pi1(torus_crossed_pi1):
    rep = check_crossed_identities(torus_crossed_pi1)
    assert rep.passed, [c.line() for c in rep.failures()]
    assert rep.get("commutator with 1 (x) M_l").passed


def test_identities_even_base():
    base = even_tilde_base(6)
    c = build_crossed(base, base.group, Weight.inclusion(base.group), PI2_GAMMA)
    assert c.parity == ODD_FROM_EVEN and c.grading_hat is None
    assert check_crossed_identities(c).passed


def test_identities_finite_nonabelian():
    G = symmetric3()
    base = ko_row_triple(3, G)
    c = build_crossed(base, G, Weight(G, [0, 1, 1, 2, 2, 1]), PI2_GAMMA)
    assert check_crossed_identities(c).passed
    assert dhat_spectrum_check(c).passed


def test_spectrum_of_dhat_squared(z2_crossed):
    assert dhat_spectrum_check(z2_crossed).passed


def test_pi2_needs_unitaries():
    G = cyclic(2)
    base = ko_row_triple(3)
    with pytest.raises(MissingUnitaries):
        build_crossed(base, G, Weight.constant(G, 1.0), PI2_GAMMA)


def test_dimension_cap():
    G = WindowedZ(30)
    space = HilbertSpace(200)
    one = identity(space)
    t = SpectralTripleData(space, [one], diagonal(np.arange(200.0), space), unitaries={g: one for g in G.elements},
                           group=G)
    with pytest.raises(ValueError):
        build_crossed(t, G, Weight.inclusion(G), PI2_GAMMA)


def test_rep_of_element_is_linear(torus_crossed):
    c = torus_crossed
    x = CrossedElement({0: np.eye(5)[1], 1: 2j * np.eye(5)[2]})
    want = c.rep_basis(1, 0) + 2j * c.rep_basis(2, 1)
    assert abs((c.rep(x) - want).matrix).max() < 1e-14


def test_intertwiner(torus_crossed_pi1, torus_crossed):
    rep = intertwiner_residuals(torus_crossed_pi1)
    assert rep.passed
    assert not rep.get("U D_hat U* = D_hat").report_only


def test_intertwiner_noninvariant_is_report_only():
    base = noninvariant_base()
    c = build_crossed(base, base.group, Weight(base.group, [0.0, 1.0]), PI1_LAMBDA)
    chk = intertwiner_residuals(c).get("U D_hat U* = D_hat")
    assert chk.report_only and chk.residual > 0.5


def test_equicontinuity(torus):
    rep = check_equicontinuity(torus)
    assert rep.passed


def test_coaction_form_finite(z2_crossed):
    rep = check_dual_symmetry(z2_crossed, form="coaction")
    assert rep.passed, [c.line() for c in rep.failures()]


def test_dual_action_form_torus(torus_crossed):
    rep = check_dual_symmetry(torus_crossed)
    assert rep.passed
    assert rep.get("dual action commutes with D_hat").passed


def test_default_characters():
    assert len(default_characters(cyclic(4))) == 4
    assert [n for n, _ in default_characters(WindowedZ(4))] == ["phi=0", "phi=1.5708", "phi=1"]
    with pytest.raises(GroupNotAbelian):
        default_characters(symmetric3())
