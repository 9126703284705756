from fractions import Fraction

import pytest

from ncdc import (GR_I, GR_ONE, INF, DimensionMismatch, MatrixSeries,
                  MomentumPolynomial, OrderError, PreconditionError,
                  SuperStructure, bernoulli_psi_coeffs, build_kappa,
                  build_momentum_matrix, build_super_tilde,
                  check_momentum_identity, exp_coeffs, exp_flow_check,
                  flow_coeffs, gaussian, matrix_function,
                  matrix_inverse_series, solve_lambda)
from oracles import f_block_straight_line, lambda_by_recurrence, psi_coeffs_by_division

PSI_10 = (Fraction(1), Fraction(1, 2), Fraction(1, 12), Fraction(0),
          Fraction(-1, 720), Fraction(0), Fraction(1, 30240), Fraction(0),
          Fraction(-1, 1209600), Fraction(0), Fraction(1, 47900160))


# -- coefficient tables ----------------------------------------------------------

def test_psi_coefficients_frozen():
    assert bernoulli_psi_coeffs(10).coefficients == PSI_10


def test_psi_coefficients_match_division_oracle():
    assert tuple(psi_coeffs_by_division(10)) == PSI_10


def test_psi_rejects_negative_degree():
    with pytest.raises(PreconditionError):
        bernoulli_psi_coeffs(-1)


def test_exp_and_flow_tables():
    assert exp_coeffs(4) == (1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24))
    assert flow_coeffs(3) == (1, Fraction(-1, 2), Fraction(1, 6), Fraction(-1, 24))


# -- momentum polynomials ----------------------------------------------------------

def P(n=2, m=2):
    return MomentumPolynomial


def test_product_order_rule():
    d1 = MomentumPolynomial.momentum(2, 2, 1)
    one = MomentumPolynomial.const(2, 2, 1)
    # degree-1 factor shifts a finite order up by its minimum degree
    a = (one + d1).truncate(3)
    assert (d1 * a).order == 4
    # plain finite-by-finite with constant terms keeps the weaker order
    b = (one + d1).truncate(2)
    assert (a * b).order == 2
    # both factors bounded away from degree zero: min-degree shifts add
    c = (d1 * d1).truncate(2)  # minDeg 2, order 2
    e = d1.truncate(2)         # minDeg 1, order 2
    assert (c * e).order == 3


def test_product_of_two_q_terms_is_out_of_scope():
    qa = MomentumPolynomial.odd_unit(2, 2, 1)
    qb = MomentumPolynomial.odd_unit(2, 2, 2)
    with pytest.raises(PreconditionError):
        qa * qb


def test_q_linear_bookkeeping():
    qa = MomentumPolynomial.odd_unit(2, 2, 1)
    d1 = MomentumPolynomial.momentum(2, 2, 1)
    p = qa * d1 + MomentumPolynomial.const(2, 2, 5)
    assert p.has_q()
    assert p.q_component(1) == d1
    assert p.q_component(2).is_zero()
    assert p.q_free_part() == MomentumPolynomial.const(2, 2, 5)


def test_diff_and_truncate():
    d1 = MomentumPolynomial.momentum(2, 2, 1)
    p = (d1 * d1 * d1).truncate(3)
    dp = p.diff(1)
    assert dp.order == 2
    assert dp.coefficient((2, 0)) == gaussian(3)
    with pytest.raises(OrderError):
        dp.truncate(3)
    with pytest.raises(PreconditionError):
        p.diff(3)


def test_momentum_builders_validate_indices():
    with pytest.raises(PreconditionError):
        MomentumPolynomial.momentum(2, 2, 0)
    with pytest.raises(PreconditionError):
        MomentumPolynomial.odd_unit(2, 2, 3)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        MomentumPolynomial.momentum(2, 2, 1) + MomentumPolynomial.momentum(3, 3, 1)


# -- matrix series ------------------------------------------------------------------

def test_momentum_matrix_sol2(sol2):
    cc = build_momentum_matrix(sol2, "C")
    d1 = MomentumPolynomial.momentum(2, 2, 1)
    d2 = MomentumPolynomial.momentum(2, 2, 2)
    assert cc.at(1, 1).is_zero()
    assert cc.at(1, 2) == d2
    assert cc.at(2, 1).is_zero()
    assert cc.at(2, 2) == -d1
    kk = build_momentum_matrix(sol2, "K")
    assert kk.at(1, 1).is_zero()
    assert kk.at(1, 2).is_zero()
    assert kk.at(2, 2) == d1
    assert kk.at(2, 1) == -d2
    with pytest.raises(PreconditionError):
        build_momentum_matrix(sol2, "Z")


def test_psi_of_c_sol2_frozen(sol2):
    # order-2 image of the connection matrix under the Bernoulli series
    psi = matrix_function(bernoulli_psi_coeffs(2), build_momentum_matrix(sol2, "C"), 2)
    half = gaussian(Fraction(1, 2))
    twelfth = gaussian(Fraction(1, 12))
    assert psi.at(1, 1) == MomentumPolynomial.const(2, 2, 1).truncate(2)
    assert psi.at(2, 1).is_zero()
    e12 = psi.at(1, 2)
    assert e12.coefficient((0, 1)) == half
    assert e12.coefficient((1, 1)) == -twelfth
    e22 = psi.at(2, 2)
    assert e22.constant_coefficient() == GR_ONE
    assert e22.coefficient((1, 0)) == -half
    assert e22.coefficient((2, 0)) == twelfth


def test_matrix_function_preconditions(kappa2):
    cc = build_momentum_matrix(kappa2, "C")
    with pytest.raises(PreconditionError):
        matrix_function(bernoulli_psi_coeffs(2), cc, 4)  # too few coefficients
    ident = MatrixSeries.identity(2, 2, 2)
    with pytest.raises(PreconditionError):
        matrix_function(bernoulli_psi_coeffs(4), ident, 3)  # constant entries
    with pytest.raises(DimensionMismatch):
        matrix_function(bernoulli_psi_coeffs(4), cc.block(0, 1, 0, 2), 1)


def test_matrix_function_q_content_needs_one_more_coefficient(kappa2):
    tilde, _, _ = build_super_tilde(kappa2, 4)
    assert tilde.has_q()
    with pytest.raises(PreconditionError):
        matrix_function(bernoulli_psi_coeffs(4), tilde, 4)
    matrix_function(bernoulli_psi_coeffs(5), tilde, 4)  # and this succeeds


def test_matrix_inverse_series(kappa2, sol2):
    for s in (kappa2, sol2):
        d = 5
        psi = matrix_function(bernoulli_psi_coeffs(d), build_momentum_matrix(s, "C"), d)
        inv = matrix_inverse_series(psi, d)
        prod = (psi * inv).truncate(d)
        assert prod == MatrixSeries.identity(s.n, s.n, s.m, d)
        assert (inv * psi).truncate(d) == MatrixSeries.identity(s.n, s.n, s.m, d)


def test_matrix_inverse_needs_identity_constant_block(kappa2):
    cc = build_momentum_matrix(kappa2, "C")
    with pytest.raises(PreconditionError):
        matrix_inverse_series(cc, 3)


# -- merged block matrix ----------------------------------------------------------

def test_super_tilde_blocks(kappa2, kappa3, sol2):
    for s in (kappa2, kappa3, sol2):
        n, m = s.n, s.m
        d = 4
        tilde, psi, fb = build_super_tilde(s, d)
        assert tilde.block(0, n, 0, n) == build_momentum_matrix(s, "C")
        assert tilde.block(n, n + m, n, n + m) == build_momentum_matrix(s, "K")
        assert tilde.block(n, n + m, 0, n).is_zero()
        # upper-right block is q-linear with entries -sum_b K_{b mu a} q_b
        for mu in range(1, n + 1):
            for a in range(1, m + 1):
                e = tilde.at(mu, n + a)
                assert e.q_free_part().is_zero()
                for b in range(1, m + 1):
                    assert e.q_component(b) == MomentumPolynomial.const(
                        n, m, -s.K(b, mu, a))


def test_f_block_zeroth_order_is_half_k(kappa2, kappa3, sol2):
    for s in (kappa2, kappa3, sol2):
        n, m = s.n, s.m
        _, _, fb = build_super_tilde(s, 3)
        for mu in range(1, n + 1):
            for a in range(1, m + 1):
                for b in range(1, m + 1):
                    got = fb.at(mu, a).q_component(b).constant_coefficient()
                    assert got == -s.K(b, mu, a) / gaussian(2)


def test_f_block_matches_straight_line_oracle(kappa2, kappa3, sol2):
    for s in (kappa2, kappa3, sol2):
        d = 5
        _, _, fb = build_super_tilde(s, d)
        fo = f_block_straight_line(s, d)
        for mu in range(1, s.n + 1):
            for a in range(1, s.m + 1):
                assert (fb.at(mu, a) - fo.at(mu, a)).truncate(d).is_zero()


# -- exterior-derivative momentum components ------------------------------------------

def test_lambda_abelian_is_plain_momentum(abelian):
    lam = solve_lambda(abelian, 6)
    for al in range(1, 3):
        assert lam[al - 1] == MomentumPolynomial.momentum(2, 2, al).truncate(6)


def test_lambda_kappa_closed_form(kappa2):
    # K-matrix is -A times the identity, so the flow series telescopes to
    # (e^A - 1)/A applied to each momentum
    d = 6
    lam = solve_lambda(kappa2, d)
    A = MomentumPolynomial.momentum(2, 2, 2).scale(GR_I)
    for al in (1, 2):
        want = MomentumPolynomial.zero(2, 2)
        power = MomentumPolynomial.const(2, 2, 1)
        fact = 1
        for k in range(0, d + 1):
            if k:
                fact *= (k + 1)
            want = want + power.scale(gaussian(Fraction(1, fact)))
            power = power * A
        want = (want * MomentumPolynomial.momentum(2, 2, al)).truncate(d)
        assert lam[al - 1].truncate(d) == want


def test_lambda_matches_recurrence_oracle(kappa2, kappa3):
    for s in (kappa2, kappa3):
        d = 6
        lam = solve_lambda(s, d)
        oracle = lambda_by_recurrence(s, d)
        for al in range(s.n):
            assert (lam[al] - oracle[al]).truncate(d).is_zero()


def test_lambda_solves_derivation_equation(kappa2, kappa3):
    # sum_be dLambda_al/d(d_be) psi(C)_{mu be} + sum_be K_{be mu al} Lambda_be
    # equals delta_{al mu}, one order below the build order
    for s in (kappa2, kappa3):
        n, m = s.n, s.m
        d = 6
        lam = solve_lambda(s, d)
        psi = matrix_function(bernoulli_psi_coeffs(d), build_momentum_matrix(s, "C"), d)
        for al in range(1, n + 1):
            for mu in range(1, n + 1):
                res = MomentumPolynomial.zero(n, m)
                for be in range(1, n + 1):
                    res = res + lam[al - 1].diff(be) * psi.at(mu, be)
                for be in range(1, n + 1):
                    kv = s.K(be, mu, al)
                    if kv:
                        res = res + lam[be - 1].scale(kv)
                res = res - MomentumPolynomial.const(n, m, 1 if al == mu else 0)
                assert res.truncate(min(d - 1, res.order)).is_zero()


def test_lambda_preconditions(sol2):
    with pytest.raises(PreconditionError):
        solve_lambda(SuperStructure(2, 1, {}, {}), 4)
    with pytest.raises(PreconditionError) as exc:
        solve_lambda(sol2, 4)
    assert "leibniz-compat" in str(exc.value)


# -- structural identities -------------------------------------------------------------

def test_momentum_identity_all_fixtures(abelian, kappa2, kappa3, sol2):
    for s in (abelian, kappa2, kappa3, sol2):
        assert check_momentum_identity(s, 5).passed


def test_exp_flow_identity(abelian, kappa2, kappa3, sol2):
    for s in (abelian, kappa2, kappa3, sol2):
        assert exp_flow_check(s, 5).passed


def test_exp_flow_detects_broken_structure(kappa3):
    # [DERIVED] perturbing K at (1,1,1) leaves the zeroth order of the flow
    # identity intact but shifts its first order by -(i/2) d_3, because
    # psi(C)_{11} = 1 - (i/2) d_3 + ... multiplies the new constant K term
    K = dict(kappa3.k_items())
    K[(1, 1, 1)] = gaussian(1)
    pert = SuperStructure(3, 3, dict(kappa3.c_canonical_items()), K)
    rep = exp_flow_check(pert, 4)
    assert not rep.passed
    name, idx, res = rep.violations[0]
    assert (name, idx) == ("exp-flow", (1, 1, 1))
    assert res == GR_I * Fraction(-1, 2)
