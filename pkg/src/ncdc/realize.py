"""Realizations of the deformed generators inside the Weyl superalgebra.

``weyl_linear_realization`` sends each coordinate to an x-degree-one
element built from psi of the momentum matrix plus a xi-q correction
carrying the odd structure constants; ``shift_realization`` extends it
with the three shift blocks (matrix exponentials of the momentum
matrices, with a q factor on the mixed block).  ``verify_realization``
replays every defining bracket against the images and reports residuals
instead of raising.

The exterior derivative is assembled from ``solve_lambda``; nilpotency,
the action on coordinates, and the Leibniz rule on sampled products are
property checks over the finished operator, not construction steps.

``similarity_transform`` and ``conjecture_test`` compute the tensor
H_{b mu a} two ways: directly from the psi-matrix formula, and as the
q-linear block of psi applied to the merged table.  Agreement beyond
first order is measured and reported, never assumed.
"""

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import ParityError, PreconditionError
from .scalars import GR_I, format_value, gaussian
from .structure import StructureReport, SuperStructure, build_kappa, _rat
from .weyl import WeylAlgebra, WeylElement, normal_product, super_commutator
from .weyl import truncate as weyl_truncate
from .matseries import (MomentumPolynomial, bernoulli_psi_coeffs,
                        build_momentum_matrix, build_super_tilde, exp_coeffs,
                        flow_coeffs, matrix_function, matrix_inverse_series,
                        solve_lambda)

_KIND_PARITY = {"X": 0, "theta": 1, "T1": 0, "T2": 1, "T4": 0}


def _label_kind(label):
    if label.startswith("theta"):
        return "theta"
    if label.startswith("T"):
        return label.split("_", 1)[0]
    return "X"


def _label_key(label):
    """Sort key: coordinates, one-forms, then the three shift blocks."""
    kind = _label_kind(label)
    if kind == "X":
        return (0, int(label[1:]), 0)
    if kind == "theta":
        return (1, int(label[5:]), 0)
    rank = {"T1": 2, "T2": 3, "T4": 4}[kind]
    _, i, j = label.split("_")
    return (rank, int(i), int(j))


def _first_term(e: WeylElement):
    k = min(e.terms)
    return (k, format_value(e.terms[k]))


@dataclass(frozen=True)
class Realization:
    """Images of the generators inside a fixed Weyl superalgebra.

    Keys are labels like ``X1``, ``theta2``, ``T1_1_2``, ``T2_2_1``,
    ``T4_1_1``; every image is valid to at least ``order``.
    """

    structure: SuperStructure
    order: int
    images: dict

    def __post_init__(self):
        for label, img in self.images.items():
            want = _KIND_PARITY[_label_kind(label)]
            if not img.is_zero() and img.parity() != want:
                raise ParityError(
                    f"image {label} has parity {img.parity()}, expected {want}")

    def x_image(self, mu):
        return self.images[f"X{mu}"]

    def theta_image(self, a):
        return self.images[f"theta{a}"]

    def t1(self, mu, nu):
        return self.images[f"T1_{mu}_{nu}"]

    def t2(self, mu, a):
        return self.images[f"T2_{mu}_{a}"]

    def t4(self, a, b):
        return self.images[f"T4_{a}_{b}"]

    @property
    def has_shifts(self):
        return any(k.startswith("T1_") for k in self.images)


@dataclass(frozen=True)
class DerivativeOperator:
    """d-hat = sum_al xi_al Lambda_al; lam holds the momentum components."""

    structure: SuperStructure
    order: int
    d_hat: WeylElement
    lam: tuple


@dataclass(frozen=True)
class ConjectureReport:
    order: int
    h: dict
    p: dict
    agreement_order: int
    first_mismatch: object
    theta_image_ok: bool


def weyl_linear_realization(s: SuperStructure, d: int) -> Realization:
    """x-degree-one realization of the coordinate relations.

    X_mu -> sum_al x_al psi(C-matrix)_{mu al} - sum_{a,b} K_{b mu a} xi_a q_b
    truncated at order d; theta_a -> xi_a exactly.
    """
    alg = WeylAlgebra(s.n, s.m)
    cc = build_momentum_matrix(s, "C")
    psi = matrix_function(bernoulli_psi_coeffs(d), cc, d)
    images = {}
    for mu in range(1, s.n + 1):
        acc = alg.zero(d)
        for al in range(1, s.n + 1):
            entry = psi.at(mu, al)
            if not entry.is_zero():
                acc = acc + normal_product(alg.x(al), entry.to_weyl(alg))
        for a in range(1, s.m + 1):
            for b in range(1, s.m + 1):
                kv = s.K(b, mu, a)
                if kv:
                    acc = acc - normal_product(alg.xi(a), alg.q(b)).scale(kv)
        images[f"X{mu}"] = acc
    for a in range(1, s.m + 1):
        images[f"theta{a}"] = alg.xi(a)
    return Realization(s, d, images)


def shift_realization(s: SuperStructure, d: int) -> Realization:
    """Linear realization plus the three shift blocks.

    T1 = e^{C-matrix}; T2_{mu a} = -sum_{b,c} K_{b mu c} (e^{K-matrix})_{c a} q_b;
    T4 = e^{K-matrix}.
    """
    base = weyl_linear_realization(s, d)
    alg = WeylAlgebra(s.n, s.m)
    ec = matrix_function(exp_coeffs(d), build_momentum_matrix(s, "C"), d)
    ek = matrix_function(exp_coeffs(d), build_momentum_matrix(s, "K"), d)
    images = dict(base.images)
    for mu in range(1, s.n + 1):
        for nu in range(1, s.n + 1):
            images[f"T1_{mu}_{nu}"] = ec.at(mu, nu).to_weyl(alg)
    for mu in range(1, s.n + 1):
        for a in range(1, s.m + 1):
            acc = alg.zero(d)
            for b in range(1, s.m + 1):
                for c in range(1, s.m + 1):
                    kv = s.K(b, mu, c)
                    if kv:
                        acc = acc - normal_product(
                            ek.at(c, a).to_weyl(alg), alg.q(b)).scale(kv)
            images[f"T2_{mu}_{a}"] = acc
    for a in range(1, s.m + 1):
        for b in range(1, s.m + 1):
            images[f"T4_{a}_{b}"] = ek.at(a, b).to_weyl(alg)
    return Realization(s, d, images)


def verify_realization(r: Realization, s: SuperStructure) -> StructureReport:
    """Replay every defining bracket on the images.

    Coordinate-coordinate, one-form-coordinate and one-form pairs always;
    when shift images are present also the six shift brackets and the
    mutual commutativity of all shift images.  Residuals are checked to
    the order the product arithmetic actually supports (a commutator
    with an x-degree-one image costs one order) and reported as
    violations, never raised.
    """
    if r.structure != s:
        raise PreconditionError("realization was built over a different structure")
    n, m = s.n, s.m
    bad = []
    for mu in range(1, n + 1):
        for nu in range(mu + 1, n + 1):
            res = super_commutator(r.x_image(mu), r.x_image(nu))
            for rho in range(1, n + 1):
                cv = s.C(mu, nu, rho)
                if cv:
                    res = res - r.x_image(rho).scale(cv)
            if not res.is_zero():
                bad.append(("bracket-xx", (mu, nu), _first_term(res)))
    for a in range(1, m + 1):
        for mu in range(1, n + 1):
            res = super_commutator(r.theta_image(a), r.x_image(mu))
            for b in range(1, m + 1):
                kv = s.K(a, mu, b)
                if kv:
                    res = res - r.theta_image(b).scale(kv)
            if not res.is_zero():
                bad.append(("bracket-theta-x", (a, mu), _first_term(res)))
    for a in range(1, m + 1):
        for b in range(a, m + 1):
            res = super_commutator(r.theta_image(a), r.theta_image(b))
            if not res.is_zero():
                bad.append(("bracket-theta-theta", (a, b), _first_term(res)))
    if r.has_shifts:
        _verify_shifts(r, s, bad)
    return StructureReport.collect(bad)


def _verify_shifts(r, s, bad):
    n, m = s.n, s.m
    for mu in range(1, n + 1):
        for nu in range(1, n + 1):
            for lam in range(1, n + 1):
                res = super_commutator(r.t1(mu, nu), r.x_image(lam))
                for rho in range(1, n + 1):
                    cv = s.C(mu, lam, rho)
                    if cv:
                        res = res - r.t1(rho, nu).scale(cv)
                if not res.is_zero():
                    bad.append(("bracket-t1-x", (mu, nu, lam), _first_term(res)))
            for a in range(1, m + 1):
                res = super_commutator(r.t1(mu, nu), r.theta_image(a))
                if not res.is_zero():
                    bad.append(("bracket-t1-theta", (mu, nu, a), _first_term(res)))
    for mu in range(1, n + 1):
        for a in range(1, m + 1):
            for lam in range(1, n + 1):
                res = super_commutator(r.t2(mu, a), r.x_image(lam))
                for rho in range(1, n + 1):
                    cv = s.C(mu, lam, rho)
                    if cv:
                        res = res - r.t2(rho, a).scale(cv)
                if not res.is_zero():
                    bad.append(("bracket-t2-x", (mu, a, lam), _first_term(res)))
            for b in range(1, m + 1):
                # both operands odd, so this is the anticommutator
                res = super_commutator(r.t2(mu, a), r.theta_image(b))
                for c in range(1, m + 1):
                    kv = s.K(b, mu, c)
                    if kv:
                        res = res + r.t4(c, a).scale(kv)
                if not res.is_zero():
                    bad.append(("bracket-t2-theta", (mu, a, b), _first_term(res)))
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            for lam in range(1, n + 1):
                res = super_commutator(r.t4(a, b), r.x_image(lam))
                for c in range(1, m + 1):
                    kv = s.K(a, lam, c)
                    if kv:
                        res = res - r.t4(c, b).scale(kv)
                if not res.is_zero():
                    bad.append(("bracket-t4-x", (a, b, lam), _first_term(res)))
            for c in range(1, m + 1):
                res = super_commutator(r.t4(a, b), r.theta_image(c))
                if not res.is_zero():
                    bad.append(("bracket-t4-theta", (a, b, c), _first_term(res)))
    shift_labels = sorted(
        (k for k in r.images if _label_kind(k) in ("T1", "T2", "T4")),
        key=_label_key)
    for i, la in enumerate(shift_labels):
        for lb in shift_labels[i:]:
            res = super_commutator(r.images[la], r.images[lb])
            if not res.is_zero():
                bad.append(("bracket-tt", (la, lb), _first_term(res)))


def exterior_derivative(s: SuperStructure, d: int) -> DerivativeOperator:
    """d-hat = sum_al xi_al Lambda_al, x-free and q-free by construction.

    Requires n = m and the Leibniz-compatibility law (enforced by
    solve_lambda).
    """
    lam = solve_lambda(s, d)
    alg = WeylAlgebra(s.n, s.m)
    acc = alg.zero(d)
    for al in range(1, s.n + 1):
        acc = acc + normal_product(alg.xi(al), lam[al - 1].to_weyl(alg))
    return DerivativeOperator(s, d, acc, tuple(lam))


def check_d_properties(dop: DerivativeOperator, r: Realization,
                       samples: int = 16, seed: int = 1) -> StructureReport:
    """Property checks over the exterior derivative.

    dhat-nilpotent:  d-hat * d-hat = 0 with exact term cancellation.
    dhat-coordinate: [d-hat, X-image] = xi, valid one order below the build.
    dhat-oneform:    the anticommutator with each theta image vanishes
                     (observed property of the linear realization).
    dhat-leibniz:    d(fg) = (df)g + f(dg) on seeded random products of
                     coordinate-image monomials of degree <= 3.
    """
    if dop.structure != r.structure:
        raise PreconditionError("operator and realization use different structures")
    s = dop.structure
    alg = WeylAlgebra(s.n, s.m)
    dh = dop.d_hat
    bad = []
    sq = normal_product(dh, dh)
    if not sq.is_zero():
        bad.append(("dhat-nilpotent", (), _first_term(sq)))
    for mu in range(1, s.n + 1):
        res = super_commutator(dh, r.x_image(mu)) - alg.xi(mu)
        if not res.is_zero():
            bad.append(("dhat-coordinate", (mu,), _first_term(res)))
    for a in range(1, s.m + 1):
        res = super_commutator(dh, r.theta_image(a))
        if not res.is_zero():
            bad.append(("dhat-oneform", (a,), _first_term(res)))
    rng = random.Random(seed)
    for t in range(samples):
        f = _random_x_monomial(rng, r, alg)
        g = _random_x_monomial(rng, r, alg)
        lhs = super_commutator(dh, normal_product(f, g))
        rhs = (normal_product(super_commutator(dh, f), g)
               + normal_product(f, super_commutator(dh, g)))
        res = lhs - rhs
        if not res.is_zero():
            bad.append(("dhat-leibniz", (t,), _first_term(res)))
    return StructureReport.collect(bad)


def _random_x_monomial(rng, r, alg):
    deg = rng.randint(1, 3)
    out = alg.one()
    for _ in range(deg):
        out = normal_product(out, r.x_image(rng.randint(1, r.structure.n)))
    return out


def h_tensor(s: SuperStructure, d: int) -> dict:
    """Conjugation tensor H_{b mu a}, valid to order d.

    H = M^{-1} (dM/d(momentum) . psi(C-matrix) - K . M) with M = psi(K-matrix).
    Internals run one order higher because the momentum derivative costs one.
    """
    dd = d + 1
    psi_c = matrix_function(bernoulli_psi_coeffs(dd),
                            build_momentum_matrix(s, "C"), dd)
    mmat = matrix_function(bernoulli_psi_coeffs(dd),
                           build_momentum_matrix(s, "K"), dd)
    minv = matrix_inverse_series(mmat, dd)
    out = {}
    for b in range(1, s.m + 1):
        for mu in range(1, s.n + 1):
            for a in range(1, s.m + 1):
                total = MomentumPolynomial.zero(s.n, s.m)
                for c in range(1, s.m + 1):
                    inner = MomentumPolynomial.zero(s.n, s.m)
                    for rho in range(1, s.n + 1):
                        inner = inner + mmat.at(c, a).diff(rho) * psi_c.at(mu, rho)
                    for e in range(1, s.m + 1):
                        kv = s.K(c, mu, e)
                        if kv:
                            inner = inner - mmat.at(e, a).scale(kv)
                    total = total + minv.at(b, c) * inner
                out[(b, mu, a)] = total.truncate(min(d, total.order))
    return out


def similarity_transform(s: SuperStructure, d: int) -> Realization:
    """Coordinate images after conjugating the linear realization.

    X_mu -> sum_al x_al psi(C-matrix)_{mu al} + sum_{a,b} xi_a q_b H_{b mu a};
    theta_a -> sum_b xi_b M_{ab} with M = psi(K-matrix).
    """
    alg = WeylAlgebra(s.n, s.m)
    psi_c = matrix_function(bernoulli_psi_coeffs(d),
                            build_momentum_matrix(s, "C"), d)
    mmat = matrix_function(bernoulli_psi_coeffs(d),
                           build_momentum_matrix(s, "K"), d)
    h = h_tensor(s, d)
    images = {}
    for mu in range(1, s.n + 1):
        acc = alg.zero(d)
        for al in range(1, s.n + 1):
            entry = psi_c.at(mu, al)
            if not entry.is_zero():
                acc = acc + normal_product(alg.x(al), entry.to_weyl(alg))
        for a in range(1, s.m + 1):
            for b in range(1, s.m + 1):
                hv = h[(b, mu, a)]
                if not hv.is_zero():
                    acc = acc + normal_product(
                        normal_product(alg.xi(a), hv.to_weyl(alg)), alg.q(b))
        images[f"X{mu}"] = acc
    for a in range(1, s.m + 1):
        acc = alg.zero(d)
        for b in range(1, s.m + 1):
            entry = mmat.at(a, b)
            if not entry.is_zero():
                acc = acc + normal_product(alg.xi(b), entry.to_weyl(alg))
        images[f"theta{a}"] = acc
    return Realization(s, d, images)


def conjecture_test(s: SuperStructure, d: int) -> ConjectureReport:
    """Measure how far H agrees with the q-linear block of the merged psi.

    agreement_order is the highest momentum degree at which every slot of
    H equals the corresponding slot of P; a first mismatch, when present,
    is reported as ((b, mu, a), degree, coefficient).  Also confirms that
    the one-form block of the merged psi equals standalone psi(K-matrix).
    """
    h = h_tensor(s, d)
    _, psi_tilde, fblock = build_super_tilde(s, d)
    p = {}
    for mu in range(1, s.n + 1):
        for a in range(1, s.m + 1):
            entry = fblock.at(mu, a)
            for b in range(1, s.m + 1):
                p[(b, mu, a)] = entry.q_component(b)
    agreement = d
    mismatch = None
    for deg in range(0, d + 1):
        for key in sorted(h):
            delta = h[key] - p[key]
            hits = sorted(k for k in delta.terms if sum(k[0]) == deg)
            if hits:
                mismatch = (key, deg, format_value(delta.terms[hits[0]]))
                agreement = deg - 1
                break
        if mismatch:
            break
    kk = build_momentum_matrix(s, "K")
    standalone = matrix_function(bernoulli_psi_coeffs(d), kk, d)
    block = psi_tilde.block(s.n, s.n + s.m, s.n, s.n + s.m)
    theta_ok = block == standalone
    return ConjectureReport(d, h, p, agreement, mismatch, theta_ok)


def kappa_closed_forms(n: int, c, a, family: str, d: int) -> Realization:
    """Closed-form realization on the deformed space, family S1 with c = 0.

    All images are series in A = i sum a_nu d_nu:

        X_mu  -> x_mu psi(-A) + i a_mu (x.d) h(A) + i a_mu sum_al xi_al q_al
        T1    -> delta e^{-A} + i a_mu d_nu (1 - e^{-A})/A
        T2    -> i a_mu e^{-A} q_nu
        T4    -> delta e^{-A}

    with h(t) = 1/t - 1/(e^t - 1); every bracketed function is analytic
    at zero, so plain truncated series suffice.  The gradient term of T1
    carries (1 - e^{-A})/A: that is what direct exponentiation of the
    momentum matrix produces, and the dual-path tests hold this form
    against the generic construction.
    """
    if family != "S1" or _rat(c, "deformation parameter c") != 0:
        raise PreconditionError(
            "closed forms cover family S1 with c = 0 only; "
            "use shift_realization for anything else")
    s = build_kappa(n, family, c, a)
    avec = [_rat(v, "deformation vector entry") for v in a]
    alg = WeylAlgebra(n, n)
    amom = MomentumPolynomial.zero(n, n)
    for nu in range(1, n + 1):
        if avec[nu - 1]:
            amom = amom + MomentumPolynomial.momentum(n, n, nu).scale(
                GR_I * gaussian(avec[nu - 1]))
    cs = bernoulli_psi_coeffs(d + 1).coefficients
    psi_neg = [cs[k] * (-1) ** k for k in range(d + 1)]
    h_co = [cs[j + 1] * (-1) ** j for j in range(d)]
    em = [Fraction((-1) ** k, factorial(k)) for k in range(d + 1)]
    g_co = flow_coeffs(d - 1) if d >= 1 else []

    def series(coeffs, order):
        acc = MomentumPolynomial.const(n, n, 0, order)
        power = MomentumPolynomial.const(n, n, 1)
        for k, co in enumerate(coeffs):
            if k:
                power = power * amom
            if co:
                acc = acc + power.scale(co).truncate(order)
        return acc

    p_ser = series(psi_neg, d)
    h_ser = series(h_co, d - 1) if d >= 1 else MomentumPolynomial.zero(n, n)
    e_ser = series(em, d)
    g_ser = series(g_co, d - 1) if d >= 1 else MomentumPolynomial.zero(n, n)

    images = {}
    for mu in range(1, n + 1):
        acc = normal_product(alg.x(mu), p_ser.to_weyl(alg))
        ia = GR_I * gaussian(avec[mu - 1])
        if ia:
            for al in range(1, n + 1):
                grad = MomentumPolynomial.momentum(n, n, al) * h_ser
                acc = acc + normal_product(alg.x(al), grad.to_weyl(alg)).scale(ia)
            for al in range(1, n + 1):
                acc = acc + normal_product(alg.xi(al), alg.q(al)).scale(ia)
        images[f"X{mu}"] = weyl_truncate(acc, d)
    for al in range(1, n + 1):
        images[f"theta{al}"] = alg.xi(al)
    ew = e_ser.to_weyl(alg)
    for mu in range(1, n + 1):
        ia = GR_I * gaussian(avec[mu - 1])
        for nu in range(1, n + 1):
            acc = alg.zero(d)
            if mu == nu:
                acc = acc + ew
            if ia:
                grad = MomentumPolynomial.momentum(n, n, nu) * g_ser
                acc = acc + grad.to_weyl(alg).scale(ia)
            images[f"T1_{mu}_{nu}"] = weyl_truncate(acc, d)
            t2 = normal_product(ew, alg.q(nu)).scale(ia) if ia else alg.zero(d)
            images[f"T2_{mu}_{nu}"] = weyl_truncate(t2, d)
            images[f"T4_{mu}_{nu}"] = weyl_truncate(ew, d) if mu == nu else alg.zero(d)
    return Realization(s, d, images)


def write_realization(path, r: Realization, extra=None):
    """Serialize a realization; one record per generator, terms sorted.

    ``extra`` may carry additional labeled elements (the exterior
    derivative and its momentum components); they are appended after the
    generator images in name order.
    """
    images = []
    labels = sorted(r.images, key=_label_key)
    pairs = [(lab, r.images[lab]) for lab in labels]
    if extra:
        pairs += [(lab, extra[lab]) for lab in sorted(extra)]
    for label, img in pairs:
        terms = []
        for mono in sorted(img.terms):
            x, xi, dp, q = mono
            terms.append({"x": list(x), "xi": list(xi), "d": list(dp),
                          "q": list(q), "val": format_value(img.terms[mono])})
        images.append({"gen": label, "terms": terms})
    doc = {"format": "ncdc-realization/1", "order": r.order, "images": images}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
