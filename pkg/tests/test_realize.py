import json
from fractions import Fraction

import pytest

from ncdc import (GR_I, GR_ONE, ParityError, PreconditionError, WeylAlgebra,
                  check_d_properties, conjecture_test, exterior_derivative,
                  gaussian, h_tensor, kappa_closed_forms, normal_product,
                  shift_realization, similarity_transform, super_commutator,
                  truncate, verify_realization, weyl_linear_realization,
                  write_realization)
from ncdc.realize import Realization


# -- linear realization -------------------------------------------------------------

def test_abelian_realization_is_classical(abelian):
    r = weyl_linear_realization(abelian, 4)
    alg = WeylAlgebra(2, 2)
    for mu in (1, 2):
        assert r.x_image(mu) == truncate(alg.x(mu), 4)
    for a in (1, 2):
        assert r.theta_image(a) == alg.xi(a)
    assert verify_realization(r, abelian).passed
    assert not r.has_shifts


def test_kappa2_coordinate_images(kappa2):
    r = weyl_linear_realization(kappa2, 4)
    alg = WeylAlgebra(2, 2)
    zx = (0, 0)
    # the x-hat_2 image carries -K_{b 2 a} xi_a q_b = +i (xi_1 q_1 + xi_2 q_2)
    x2 = r.x_image(2)
    assert x2.coefficient((zx, (1,), (0, 0), (1,))) == GR_I
    assert x2.coefficient((zx, (2,), (0, 0), (2,))) == GR_I
    assert x2.coefficient((zx, (1,), (0, 0), (2,))) == gaussian(0)
    x1 = r.x_image(1)
    for a in (1, 2):
        for b in (1, 2):
            assert x1.coefficient((zx, (a,), (0, 0), (b,))) == gaussian(0)


def test_sol2_x1_image_order2(sol2):
    # x-hat_1 = x_1 + x_2 (d_2/2 - d_1 d_2/12) - xi_2 q_2 at order 2
    r = weyl_linear_realization(sol2, 2)
    x1 = r.x_image(1)
    assert x1.coefficient(((1, 0), (), (0, 0), ())) == GR_ONE
    assert x1.coefficient(((0, 1), (), (0, 1), ())) == gaussian(Fraction(1, 2))
    assert x1.coefficient(((0, 1), (), (1, 1), ())) == gaussian(Fraction(-1, 12))
    assert x1.coefficient(((0, 0), (2,), (0, 0), (2,))) == gaussian(-1)
    assert x1.coefficient(((0, 0), (1,), (0, 0), (1,))) == gaussian(0)
    assert len(x1.terms) == 4


def test_linear_realization_brackets(kappa2, kappa3, sol2):
    for s in (kappa2, kappa3, sol2):
        rep = verify_realization(weyl_linear_realization(s, 6), s)
        assert rep.passed


# -- shift realization ------------------------------------------------------------

def test_shift_realization_full_verify(kappa2, sol2):
    for s in (kappa2, sol2):
        r = shift_realization(s, 6)
        assert r.has_shifts
        rep = verify_realization(r, s)
        assert rep.passed


def test_verify_covers_all_bracket_families(kappa2):
    rep = verify_realization(shift_realization(kappa2, 5), kappa2)
    assert rep.passed
    assert rep.violations == []


def test_abelian_shift_realization_is_trivial(abelian):
    r = shift_realization(abelian, 3)
    alg = WeylAlgebra(2, 2)
    for mu in (1, 2):
        for nu in (1, 2):
            want = truncate(alg.one() if mu == nu else alg.zero(), 3)
            assert r.t1(mu, nu) == want
            assert r.t4(mu, nu) == want
            assert r.t2(mu, nu).is_zero()


def test_verify_rejects_foreign_structure(kappa2, kappa3):
    r = weyl_linear_realization(kappa2, 3)
    with pytest.raises(PreconditionError):
        verify_realization(r, kappa3)


def test_verify_detects_transposed_k(sol2):
    # same masses, wrong slot order in the one-form correction term:
    # the coordinate brackets survive but the theta-x brackets break
    alg = WeylAlgebra(2, 2)
    good = weyl_linear_realization(sol2, 4)
    images = dict(good.images)
    for mu in (1, 2):
        acc = truncate(alg.zero(), 4)
        for mono, c in good.x_image(mu).terms.items():
            if not mono[1]:
                acc = acc + alg.element({mono: c}, order=4)
        for a in (1, 2):
            for b in (1, 2):
                kv = sol2.K(a, mu, b)  # transposed slots
                if kv:
                    acc = acc - normal_product(alg.xi(a), alg.q(b)).scale(kv)
        images[f"X{mu}"] = acc
    bad = Realization(sol2, 4, images)
    rep = verify_realization(bad, sol2)
    assert not rep.passed
    names = {v[0] for v in rep.violations}
    assert names == {"bracket-xx", "bracket-theta-x"}
    theta_hits = [v[1] for v in rep.violations if v[0] == "bracket-theta-x"]
    assert theta_hits == [(1, 2), (2, 2)]


def test_realization_parity_enforced(kappa2):
    alg = WeylAlgebra(2, 2)
    with pytest.raises(ParityError):
        Realization(kappa2, 3, {"X1": alg.xi(1)})
    with pytest.raises(ParityError):
        Realization(kappa2, 3, {"theta1": truncate(alg.x(1), 3)})


# -- exterior derivative ---------------------------------------------------------------

def test_abelian_d_hat(abelian):
    dop = exterior_derivative(abelian, 5)
    alg = WeylAlgebra(2, 2)
    want = truncate(normal_product(alg.xi(1), alg.d(1))
                    + normal_product(alg.xi(2), alg.d(2)), 5)
    assert dop.d_hat == want


def test_d_properties(kappa2, kappa3):
    for s in (kappa2, kappa3):
        dop = exterior_derivative(s, 6)
        r = weyl_linear_realization(s, 6)
        rep = check_d_properties(dop, r)
        assert rep.passed


def test_d_coordinate_bracket_direct(kappa2):
    dop = exterior_derivative(kappa2, 6)
    r = weyl_linear_realization(kappa2, 6)
    alg = WeylAlgebra(2, 2)
    for mu in (1, 2):
        res = super_commutator(dop.d_hat, r.x_image(mu)) - alg.xi(mu)
        assert res.is_zero() and res.order >= 5


def test_d_hat_refused_without_calculus(sol2):
    with pytest.raises(PreconditionError) as exc:
        exterior_derivative(sol2, 4)
    assert "leibniz-compat" in str(exc.value)


def test_d_properties_structure_mismatch(kappa2, kappa3):
    dop = exterior_derivative(kappa2, 4)
    r = weyl_linear_realization(kappa3, 4)
    with pytest.raises(PreconditionError):
        check_d_properties(dop, r)


# -- conjugation tensor -----------------------------------------------------------------

def test_h_zeroth_order(abelian, kappa2, kappa3, sol2):
    for s in (abelian, kappa2, kappa3, sol2):
        h = h_tensor(s, 3)
        for (b, mu, a), val in h.items():
            assert val.constant_coefficient() == -s.K(b, mu, a) / gaussian(2)


def test_h_first_order(kappa2, sol2):
    # first-order coefficient of d_al in H_{b mu a}:
    # -(1/12) (sum_rho C_{mu al rho} K_{b rho a} + sum_c K_{b mu c} K_{c al a})
    for s in (kappa2, sol2):
        h = h_tensor(s, 3)
        n, m = s.n, s.m
        for b in range(1, m + 1):
            for mu in range(1, n + 1):
                for a in range(1, m + 1):
                    for al in range(1, n + 1):
                        want = gaussian(0)
                        for rho in range(1, n + 1):
                            want = want + s.C(mu, al, rho) * s.K(b, rho, a)
                        for c in range(1, m + 1):
                            want = want + s.K(b, mu, c) * s.K(c, al, a)
                        want = want * Fraction(-1, 12)
                        dpow = tuple(1 if t == al else 0 for t in range(1, n + 1))
                        assert h[(b, mu, a)].coefficient(dpow) == want


def test_similarity_transform_verifies(kappa2, sol2):
    for s in (kappa2, sol2):
        rep = verify_realization(similarity_transform(s, 5), s)
        assert rep.passed


def test_conjecture_agreement_measured(kappa2, sol2):
    # measured agreement, not an assumption: at order 4 the conjugation
    # tensor and the merged-block tensor coincide on every slot
    for s in (kappa2, sol2):
        rep = conjecture_test(s, 4)
        assert rep.order == 4
        assert rep.agreement_order == 4
        assert rep.first_mismatch is None
        assert rep.theta_image_ok
        assert set(rep.h) == set(rep.p)


# -- closed forms ----------------------------------------------------------------------

def test_kappa_closed_forms_match_generic():
    d = 6
    closed = kappa_closed_forms(2, 0, [0, 1], "S1", d)
    generic = shift_realization(closed.structure, d)
    assert set(closed.images) == set(generic.images)
    for label in closed.images:
        assert closed.images[label] == generic.images[label], label


def test_kappa_closed_forms_off_axis_vector():
    d = 5
    closed = kappa_closed_forms(2, 0, [1, 1], "S1", d)
    generic = shift_realization(closed.structure, d)
    for label in closed.images:
        assert closed.images[label] == generic.images[label], label


def test_kappa_closed_forms_preconditions():
    with pytest.raises(PreconditionError):
        kappa_closed_forms(2, 0, [0, 1], "S2", 4)
    with pytest.raises(PreconditionError):
        kappa_closed_forms(2, 1, [0, 1], "S1", 4)
    with pytest.raises(PreconditionError):
        kappa_closed_forms(2, 0, [0.0, 1.0], "S1", 4)


# -- export -----------------------------------------------------------------------------

def test_write_realization_shape(tmp_path, kappa2):
    r = shift_realization(kappa2, 3)
    out = tmp_path / "real.json"
    write_realization(out, r)
    doc = json.loads(out.read_text())
    assert doc["format"] == "ncdc-realization/1"
    assert doc["order"] == 3
    labels = [img["gen"] for img in doc["images"]]
    assert labels[0] == "X1"
    assert labels == sorted(
        labels, key=lambda s: (("X", "theta", "T1", "T2", "T4").index(
            s.split("_")[0] if s.startswith("T") else ("X" if s[0] == "X" else "theta")),
            s))
    by_gen = {img["gen"]: img for img in doc["images"]}
    x2 = by_gen["X2"]
    assert {"x": [0, 0], "xi": [1], "d": [0, 0], "q": [1], "val": "i"} in x2["terms"]
    # terms appear in sorted monomial order and parse back
    for img in doc["images"]:
        keys = [(tuple(t["x"]), tuple(t["xi"]), tuple(t["d"]), tuple(t["q"]))
                for t in img["terms"]]
        assert keys == sorted(keys)


def test_write_realization_deterministic(tmp_path, kappa2):
    r = shift_realization(kappa2, 3)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_realization(p1, r)
    write_realization(p2, r)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_realization_extras_appended(tmp_path, kappa2):
    r = weyl_linear_realization(kappa2, 3)
    dop = exterior_derivative(kappa2, 3)
    alg = WeylAlgebra(2, 2)
    extra = {"d": dop.d_hat,
             "Lambda1": dop.lam[0].to_weyl(alg),
             "Lambda2": dop.lam[1].to_weyl(alg)}
    out = tmp_path / "with_d.json"
    write_realization(out, r, extra=extra)
    doc = json.loads(out.read_text())
    labels = [img["gen"] for img in doc["images"]]
    assert labels[-3:] == ["Lambda1", "Lambda2", "d"]
