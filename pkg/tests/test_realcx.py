import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from ncgx.crossed import PI1_LAMBDA, PI2_GAMMA, build_crossed
from ncgx.errors import (GroupNotAbelian, HypothesisNotMet, MissingJ, TableRowMismatch, WrongStarConvention)
from ncgx.groups import Weight, cyclic, symmetric3
from ncgx.opalg import ComplexOperator
from ncgx.realcx import (HAT, ROW_NAMES, TILDE, antilinear_factor, assemble_real_structure, check_aux_j_lemma,
                         check_crossed_order_conditions, check_J_coaction_equivariance, check_J_dual_action,
                         check_reduced_order_conditions, necessity_bound)
from ncgx.synthetic import ko_row_triple, noninvariant_base
from ncgx.triples import KO_TABLE

Z2 = cyclic(2)


def shifted(n, variant):
    base = ko_row_triple(n, Z2)
    w = Weight.constant(Z2, 0.0) if variant == HAT else Weight(Z2, [0.0, 1.0])
    return assemble_real_structure(build_crossed(base, Z2, w, PI2_GAMMA), variant)


@pytest.mark.parametrize("n", range(8))
def test_hat_raises_ko_by_one(n):
    r = shifted(n, HAT)
    assert r.base_ko == n
    assert r.predicted_ko == r.measured.ko == (n + 1) % 8
    assert r.measured.signs == KO_TABLE[(n + 1) % 8]


@pytest.mark.parametrize("n", range(8))
def test_tilde_lowers_ko_by_one(n):
    r = shifted(n, TILDE)
    assert r.predicted_ko == r.measured.ko == (n - 1) % 8
    assert r.measured.signs == KO_TABLE[(n - 1) % 8]


S1 = np.array([[0, 1], [1, 0]])
S2C = np.array([[0, 1j], [-1j, 0]])
S3 = np.diag([1, -1])


@pytest.mark.parametrize("variant,n,matrix", [
    (HAT, 1, S2C), (HAT, 3, np.eye(2)), (HAT, 5, S2C), (HAT, 7, np.eye(2)),
    (TILDE, 1, S3), (TILDE, 3, S1), (TILDE, 5, S3), (TILDE, 7, S1),
])
def test_odd_row_factors(variant, n, matrix):
    K = antilinear_factor(variant, n)
    assert K.antilinear
    assert np.allclose(K.dense(), matrix)


def test_even_row_names():
    assert [ROW_NAMES[HAT, n] for n in (0, 2, 4, 6)] == ["(chi (x) 1) j", "j", "(chi (x) 1) j", "j"]
    assert [ROW_NAMES[TILDE, n] for n in (0, 2, 4, 6)] == ["j", "(chi (x) 1) j", "j", "(chi (x) 1) j"]


def test_torus_hat(torus_real):
    r = torus_real
    assert r.base_ko == 1 and r.predicted_ko == 2
    assert r.row == "j (x) cc.sigma_2"
    assert r.measured.signs == (-1, 1, -1)


def test_even_tilde(even_tilde_real):
    r = even_tilde_real
    assert r.base_ko == 0 and r.predicted_ko == r.measured.ko == 7


@pytest.mark.parametrize("name", ["torus_real", "z2_real", "even_tilde_real"])
def test_aux_j_lemma(name, request):
    rep = check_aux_j_lemma(request.getfixturevalue(name))
    assert rep.passed, [c.line() for c in rep.failures()]


def test_star_convention():
    G = cyclic(3)
    w = np.exp(2j * np.pi / 3)
    base = ko_row_triple(7, G, {k: ComplexOperator(np.diag([w ** k, w ** -k])) for k in range(3)})
    c = build_crossed(base, G, Weight.constant(G, 0.0), PI2_GAMMA)
    # J = conj sends the diagonal phases u_k to u_k*, so only the tilde convention holds
    with pytest.raises(WrongStarConvention):
        assemble_real_structure(c, HAT)
    c2 = build_crossed(base, G, Weight(G, [0.0, 1.0, 1.0]), PI2_GAMMA)
    assert assemble_real_structure(c2, TILDE).measured.ko == 6


def test_structural_errors():
    G = cyclic(2)
    base = ko_row_triple(3, G)
    with pytest.raises(TableRowMismatch):
        assemble_real_structure(build_crossed(base, G, Weight.constant(G, 0.0), PI1_LAMBDA), HAT)
    with pytest.raises(HypothesisNotMet):
        assemble_real_structure(build_crossed(base, G, Weight(G, [0.0, 1.0]), PI2_GAMMA), HAT)
    S = symmetric3()
    with pytest.raises(GroupNotAbelian):
        assemble_real_structure(build_crossed(ko_row_triple(3, S), S, Weight.constant(S, 0.0), PI2_GAMMA), TILDE)
    nj = noninvariant_base()
    with pytest.raises(MissingJ):
        assemble_real_structure(build_crossed(nj, nj.group, Weight.constant(nj.group, 0.0), PI2_GAMMA), HAT)


def test_torus_orders_zero_and_one(torus_real):
    for k in (0, 1):
        assert check_crossed_order_conditions(torus_real, k).passed


def test_torus_graded_second_order_mixed_terms(torus_real):
    # D (x) 1 (x) sigma_1 + 1 (x) M_l (x) sigma_2 leaves {[D, a], j X j^-1} (x) i sigma_3 behind
    chk = check_crossed_order_conditions(torus_real, 2).get("crossed order 2")
    assert not chk.passed
    assert chk.residual == pytest.approx(16.0)
    assert (chk.witness["a"], chk.witness["b"]) == ((0, 0), (0, 1))


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("order", [0, 1, 2])
def test_torus_reduced_orders(torus_real, order, sign):
    assert check_reduced_order_conditions(torus_real, order, sign).passed


def test_second_order_needs_first_order_base(z2_real):
    with pytest.raises(HypothesisNotMet):
        check_crossed_order_conditions(z2_real, 2)


def test_tilde_orders_need_first_order_weight():
    G = cyclic(3)
    base = ko_row_triple(0, G)
    r = assemble_real_structure(build_crossed(base, G, Weight(G, [0.0, 1.0, 5.0]), PI2_GAMMA), TILDE)
    assert check_crossed_order_conditions(r, 0).passed
    with pytest.raises(HypothesisNotMet):
        check_crossed_order_conditions(r, 1)


def test_hat_dual_action_commutes(torus_real):
    rep = check_J_dual_action(torus_real)
    assert rep.passed
    assert rep.get("J_out: j v_chi = v_chi j").passed


def test_hat_dual_action_twisted_form_fails_off_real_characters(torus_real):
    rep = check_J_dual_action(torus_real, twisted=True)
    chk = rep.get("J_out: j v_chi = v_chi* j")
    assert not chk.passed and chk.witness["character"] != "phi=0"


def test_tilde_dual_action_twisted(even_tilde_real):
    rep = check_J_coaction_equivariance(even_tilde_real)
    assert rep.passed
    assert rep.get("j: j v_chi = v_chi* j").passed


def test_hat_coaction_equivariance_finite(z2_real):
    rep = check_J_coaction_equivariance(z2_real)
    assert rep.passed, [c.line() for c in rep.failures()]


@given(st.integers(0, 2 ** 16), st.sampled_from([1, 3, 5, 7]))
@settings(max_examples=30, deadline=None)
def test_necessity_bound_on_perturbed_unitaries(seed, n):
    t = ko_row_triple(n)
    u = ComplexOperator(unitary_group.rvs(2, random_state=seed))
    lhs, rhs = necessity_bound(t.D, t.J, u, KO_TABLE[n][1])
    assert lhs <= rhs + 1e-9


def test_necessity_bound_vanishes_for_commuting_unitary():
    t = ko_row_triple(5)
    u = ComplexOperator(np.eye(2) * np.exp(0.4j))
    lhs, rhs = necessity_bound(t.D, t.J, u, KO_TABLE[5][1])
    assert lhs == pytest.approx(0, abs=1e-12) and rhs == pytest.approx(0, abs=1e-12)
