"""Matrix-valued power series in the momenta.

Entries are polynomials in the commuting momenta d_1..d_n carrying at most
one odd factor q_a.  One q suffices: the block matrix built from the merged
bracket table is upper triangular with a q-linear off-diagonal block, so no
product in scope ever meets q twice.  That restriction is asserted, not
silently zeroed, to catch misuse.

Validity order counts d-degree only.  Products use the sharp commutative
rule: unknown terms of A have degree > order(A), so

    order(A B) = min(minDeg(A) + order(B), order(A) + minDeg(B),
                     order(A) + order(B) + 1)

with minDeg the least d-degree among known terms (infinite for zero).
Truncated matrix functions sum coefficient-weighted powers; a matrix with
q-linear entries needs one extra series coefficient because a single q can
stand in for one unit of d-degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, OrderError, PreconditionError
from .scalars import GR_ONE, GaussianRational, gaussian
from .structure import StructureReport, SuperStructure, check_calculus_condition, merge_table
from .weyl import INF, WeylAlgebra, WeylElement

_ZERO = GaussianRational()


class MomentumPolynomial:
    """Sparse series in d_1..d_n, q-free or q-linear per term."""

    __slots__ = ("n", "m", "terms", "order")

    def __init__(self, n, m, terms, order=INF):
        self.n = n
        self.m = m
        self.terms = terms
        self.order = order

    # -- builders -------------------------------------------------------------

    @classmethod
    def zero(cls, n, m, order=INF):
        return cls(n, m, {}, order)

    @classmethod
    def const(cls, n, m, c, order=INF):
        c = c if type(c) is GaussianRational else gaussian(c)
        if not c:
            return cls(n, m, {}, order)
        return cls(n, m, {((0,) * n, 0): c}, order)

    @classmethod
    def momentum(cls, n, m, rho):
        if not 1 <= rho <= n:
            raise PreconditionError(f"momentum index {rho} out of range 1..{n}")
        d = tuple(1 if i == rho else 0 for i in range(1, n + 1))
        return cls(n, m, {(d, 0): GR_ONE})

    @classmethod
    def odd_unit(cls, n, m, a):
        if not 1 <= a <= m:
            raise PreconditionError(f"odd index {a} out of range 1..{m}")
        return cls(n, m, {((0,) * n, a): GR_ONE})

    # -- queries ---------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def min_degree(self):
        return min((sum(k[0]) for k in self.terms), default=INF)

    def has_q(self):
        return any(k[1] for k in self.terms)

    def constant_coefficient(self):
        return self.terms.get(((0,) * self.n, 0), _ZERO)

    def coefficient(self, dpow, q=0):
        return self.terms.get((tuple(dpow), q), _ZERO)

    def q_component(self, b):
        """Coefficient polynomial of q_b; q-free result, same order."""
        out = {(d, 0): c for (d, q), c in self.terms.items() if q == b}
        return MomentumPolynomial(self.n, self.m, out, self.order)

    def q_free_part(self):
        out = {k: c for k, c in self.terms.items() if not k[1]}
        return MomentumPolynomial(self.n, self.m, out, self.order)

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other):
        _same(self, other)
        order = min(self.order, other.order)
        out = {k: v for k, v in self.terms.items() if sum(k[0]) <= order}
        for k, v in other.terms.items():
            if sum(k[0]) > order:
                continue
            cur = out.get(k)
            s = v if cur is None else cur + v
            if s:
                out[k] = s
            elif cur is not None:
                del out[k]
        return MomentumPolynomial(self.n, self.m, out, order)

    def __neg__(self):
        return MomentumPolynomial(self.n, self.m,
                                  {k: -v for k, v in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = c if type(c) is GaussianRational else gaussian(c)
        if not c:
            return MomentumPolynomial(self.n, self.m, {}, self.order)
        return MomentumPolynomial(self.n, self.m,
                                  {k: v * c for k, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        _same(self, other)
        order = min(self.min_degree() + other.order,
                    self.order + other.min_degree(),
                    self.order + other.order + 1)
        out = {}
        for (d1, q1), c1 in self.terms.items():
            deg1 = sum(d1)
            for (d2, q2), c2 in other.terms.items():
                if q1 and q2:
                    raise PreconditionError(
                        "product of two q-linear momentum polynomials is out of scope")
                if deg1 + sum(d2) > order:
                    continue
                key = (tuple(a + b for a, b in zip(d1, d2)), q1 or q2)
                v = c1 * c2
                cur = out.get(key)
                s = v if cur is None else cur + v
                if s:
                    out[key] = s
                elif cur is not None:
                    del out[key]
        return MomentumPolynomial(self.n, self.m, out, order)

    def diff(self, rho: int):
        """d/d(d_rho); one order is lost when finite."""
        if not 1 <= rho <= self.n:
            raise PreconditionError(f"momentum index {rho} out of range 1..{self.n}")
        i = rho - 1
        out = {}
        for (d, q), c in self.terms.items():
            k = d[i]
            if not k:
                continue
            out[(d[:i] + (k - 1,) + d[i + 1:], q)] = c * k
        order = self.order if self.order == INF else self.order - 1
        return MomentumPolynomial(self.n, self.m, out, order)

    def truncate(self, order):
        if order > self.order:
            raise OrderError(f"cannot extend validity from order {self.order} to {order}")
        if order == self.order:
            return self
        out = {k: v for k, v in self.terms.items() if sum(k[0]) <= order}
        return MomentumPolynomial(self.n, self.m, out, order)

    def to_weyl(self, alg: WeylAlgebra) -> WeylElement:
        if alg.n != self.n or alg.m != self.m:
            raise DimensionMismatch("algebra dimensions do not match polynomial")
        zx = (0,) * self.n
        terms = {}
        for (d, q), c in self.terms.items():
            terms[(zx, (), d, (q,) if q else ())] = c
        return WeylElement(self.n, self.m, terms, self.order)

    def __eq__(self, other):
        if not isinstance(other, MomentumPolynomial):
            return NotImplemented
        return ((self.n, self.m, self.order) == (other.n, other.m, other.order)
                and self.terms == other.terms)

    __hash__ = None

    def __repr__(self):
        return f"<MomentumPolynomial n={self.n} m={self.m} order={self.order} terms={len(self.terms)}>"


def _same(a, b):
    if a.n != b.n or a.m != b.m:
        raise DimensionMismatch("momentum polynomials over different spaces")


class MatrixSeries:
    """Dense rows x cols grid of momentum polynomials at one validity order."""

    __slots__ = ("rows", "cols", "n", "m", "entries", "order")

    def __init__(self, entries, order=None):
        entries = [list(row) for row in entries]
        if not entries or not entries[0]:
            raise PreconditionError("matrix needs at least one entry")
        self.rows = len(entries)
        self.cols = len(entries[0])
        first = entries[0][0]
        self.n, self.m = first.n, first.m
        if any(len(row) != self.cols for row in entries):
            raise PreconditionError("ragged matrix")
        if order is None:
            order = min(e.order for row in entries for e in row)
        for row in entries:
            for e in row:
                if e.n != self.n or e.m != self.m:
                    raise DimensionMismatch("mixed entry spaces in matrix")
                if e.order < order:
                    raise OrderError("entry order below declared matrix order")
        self.entries = [[e.truncate(order) if e.order != order else e for e in row]
                        for row in entries]
        self.order = order

    @classmethod
    def identity(cls, size, n, m, order=INF):
        one = MomentumPolynomial.const(n, m, 1)
        zero = MomentumPolynomial.zero(n, m)
        return cls([[one if i == j else zero for j in range(size)] for i in range(size)],
                   order)

    @classmethod
    def zeros(cls, rows, cols, n, m, order=INF):
        zero = MomentumPolynomial.zero(n, m)
        return cls([[zero] * cols for _ in range(rows)], order)

    def at(self, i, j) -> MomentumPolynomial:
        """1-based entry accessor matching index conventions in formulas."""
        return self.entries[i - 1][j - 1]

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix shapes differ")
        return MatrixSeries([[a + b for a, b in zip(r1, r2)]
                             for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return MatrixSeries([[e.scale(c) for e in row] for row in self.entries], self.order)

    def __mul__(self, other):
        if self.cols != other.rows:
            raise DimensionMismatch("matrix shapes do not compose")
        zero = MomentumPolynomial.zero(self.n, self.m)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.is_zero() and a.order == INF:
                        continue
                    if b.is_zero() and b.order == INF:
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixSeries(out)

    def truncate(self, order):
        return MatrixSeries([[e.truncate(min(order, e.order)) for e in row]
                             for row in self.entries], order)

    def block(self, r0, r1, c0, c1):
        """0-based half-open row/col slice."""
        return MatrixSeries([row[c0:c1] for row in self.entries[r0:r1]], self.order)

    def is_zero(self):
        return all(e.is_zero() for row in self.entries for e in row)

    def has_q(self):
        return any(e.has_q() for row in self.entries for e in row)

    def __eq__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return (self.rows, self.cols, self.order) == (other.rows, other.cols, other.order) \
            and self.entries == other.entries

    __hash__ = None

    def __repr__(self):
        return f"<MatrixSeries {self.rows}x{self.cols} order={self.order}>"


# ---------------------------------------------------------------------------
# series coefficient tables


@dataclass(frozen=True)
class BernoulliTable:
    """Taylor coefficients of t/(1-e^{-t}); entry k multiplies t^k."""

    coefficients: tuple


def bernoulli_psi_coeffs(d: int) -> BernoulliTable:
    """Exact coefficients through degree d via the Akiyama-Tanigawa scheme."""
    if d < 0:
        raise PreconditionError("degree must be non-negative")
    out = []
    fact = 1
    row = []
    for k in range(d + 1):
        row.append(Fraction(1, k + 1))
        for j in range(k, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        if k:
            fact *= k
        out.append(row[0] / fact)
    return BernoulliTable(tuple(out))


def exp_coeffs(d: int):
    """1/k! through degree d."""
    out = [Fraction(1)]
    for k in range(1, d + 1):
        out.append(out[-1] / k)
    return tuple(out)


def flow_coeffs(d: int):
    """(1-e^{-t})/t = sum (-1)^k t^k/(k+1)! through degree d."""
    out = []
    fct = 1
    for k in range(d + 1):
        fct *= (k + 1)
        out.append(Fraction((-1) ** k, fct))
    return tuple(out)


# ---------------------------------------------------------------------------
# matrix construction and functions


def build_momentum_matrix(s: SuperStructure, which: str) -> MatrixSeries:
    """Degree-1 matrices: C-matrix[mu][nu] = sum C_{mu al nu} d_al,
    K-matrix[a][b] = sum K_{a rho b} d_rho."""
    n, m = s.n, s.m
    if which == "C":
        size = n
    elif which == "K":
        size = m
    else:
        raise PreconditionError(f'which must be "C" or "K", got {which!r}')
    rows = []
    for i in range(1, size + 1):
        row = []
        for j in range(1, size + 1):
            terms = {}
            for rho in range(1, n + 1):
                v = s.C(i, rho, j) if which == "C" else s.K(i, rho, j)
                if v:
                    d = tuple(1 if t == rho else 0 for t in range(1, n + 1))
                    terms[(d, 0)] = v
            row.append(MomentumPolynomial(n, m, terms))
        rows.append(row)
    return MatrixSeries(rows, INF)


def matrix_function(coeffs, mat: MatrixSeries, d: int) -> MatrixSeries:
    """sum_k coeffs[k] mat^k valid to order d; mat must have no constant term."""
    if isinstance(coeffs, BernoulliTable):
        coeffs = coeffs.coefficients
    for row in mat.entries:
        for e in row:
            if e.constant_coefficient():
                raise PreconditionError(
                    "matrix function needs entries without constant term")
    kmax = d + 1 if mat.has_q() else d
    if len(coeffs) <= kmax:
        raise PreconditionError(
            f"need series coefficients through degree {kmax}, got {len(coeffs) - 1}")
    if mat.rows != mat.cols:
        raise DimensionMismatch("matrix function needs a square matrix")
    acc = MatrixSeries.identity(mat.rows, mat.n, mat.m, d).scale(coeffs[0])
    power = MatrixSeries.identity(mat.rows, mat.n, mat.m, INF)
    for k in range(1, kmax + 1):
        power = (power * mat).truncate(d)
        if power.is_zero():
            break
        if coeffs[k]:
            acc = acc + power.scale(coeffs[k])
    return acc.truncate(d)


def matrix_inverse_series(mat: MatrixSeries, d: int) -> MatrixSeries:
    """Geometric series for (I + N)^{-1}; constant block must be the identity."""
    if mat.rows != mat.cols:
        raise DimensionMismatch("inverse needs a square matrix")
    for i in range(mat.rows):
        for j in range(mat.cols):
            want = GR_ONE if i == j else _ZERO
            if mat.entries[i][j].constant_coefficient() != want:
                raise PreconditionError("constant block is not the identity")
    ident = MatrixSeries.identity(mat.rows, mat.n, mat.m, INF)
    n_part = mat - ident.truncate(mat.order)
    kmax = d + 1 if n_part.has_q() else d
    acc = MatrixSeries.identity(mat.rows, mat.n, mat.m, d)
    power = MatrixSeries.identity(mat.rows, mat.n, mat.m, INF)
    for _ in range(1, kmax + 1):
        power = (power * n_part.scale(-1)).truncate(d)
        if power.is_zero():
            break
        acc = acc + power
    return acc.truncate(d)


def build_super_tilde(s: SuperStructure, d: int):
    """Merged-table block matrix, its psi image, and the q-linear corner.

    Returns (tilde, psi(tilde), F) where tilde[A][B] = sum_J table[A,J,B] u_J
    with u_J = d_J for J <= n and q_{J-n} above, psi is the Bernoulli series,
    and F is the n x m upper-right block of psi(tilde).
    """
    n, m = s.n, s.m
    table = merge_table(s)
    size = n + m
    grid = [[dict() for _ in range(size)] for _ in range(size)]
    for (a, j, b), v in table.entries.items():
        if j <= n:
            key = (tuple(1 if t == j else 0 for t in range(1, n + 1)), 0)
        else:
            key = ((0,) * n, j - n)
        cur = grid[a - 1][b - 1].get(key)
        grid[a - 1][b - 1][key] = v if cur is None else cur + v
    tilde = MatrixSeries([[MomentumPolynomial(n, m, terms) for terms in row]
                          for row in grid], INF)
    psi = matrix_function(bernoulli_psi_coeffs(d + 1), tilde, d)
    f_block = psi.block(0, n, n, size)
    return tilde, psi, f_block


def solve_lambda(s: SuperStructure, d: int):
    """Momentum components of the exterior derivative.

    Lambda_al = sum_be g(K-matrix)_{be al} d_be with g(t) = (1-e^{-t})/t,
    valid to order d.  Requires n = m and the Leibniz-compatibility law.
    """
    if s.n != s.m:
        raise PreconditionError("exterior derivative needs matching generator counts")
    rep = check_calculus_condition(s)
    if not rep.passed:
        name, idx, res = rep.violations[0]
        raise PreconditionError(
            f"structure violates {name} at {idx} (residual {res}); no calculus exists")
    n = s.n
    kk = build_momentum_matrix(s, "K")
    g = matrix_function(flow_coeffs(d), kk, d)
    out = []
    for al in range(1, n + 1):
        acc = MomentumPolynomial.zero(n, s.m)
        for be in range(1, n + 1):
            acc = acc + g.at(be, al) * MomentumPolynomial.momentum(n, s.m, be)
        out.append(acc.truncate(min(d, acc.order)))
    return out


# ---------------------------------------------------------------------------
# identity checks


def _first_coeff(p: MomentumPolynomial):
    key = min(p.terms)
    return p.terms[key]


def check_momentum_identity(s: SuperStructure, d: int) -> StructureReport:
    """Power sums sum_mu (C-matrix^k)_{mu be} d_mu vanish; the psi-weighted
    sum returns d_be.  Checked to order d."""
    n, m = s.n, s.m
    bad = []
    cc = build_momentum_matrix(s, "C")
    dvars = [MomentumPolynomial.momentum(n, m, mu) for mu in range(1, n + 1)]
    power = MatrixSeries.identity(n, n, m, INF)
    for k in range(1, d + 1):
        power = (power * cc).truncate(d)
        for be in range(1, n + 1):
            # C^k is homogeneous of degree k <= d, so nothing was cut and
            # the full degree-(k+1) residual can be checked exactly
            acc = MomentumPolynomial.zero(n, m)
            for mu in range(1, n + 1):
                acc = acc + power.at(mu, be) * dvars[mu - 1]
            if not acc.is_zero():
                bad.append(("momentum-power-sum", (k, be), _first_coeff(acc)))
    psi = matrix_function(bernoulli_psi_coeffs(d), cc, d)
    for be in range(1, n + 1):
        acc = MomentumPolynomial.zero(n, m)
        for mu in range(1, n + 1):
            acc = acc + psi.at(mu, be) * dvars[mu - 1]
        acc = (acc - dvars[be - 1]).truncate(d)
        if not acc.is_zero():
            bad.append(("momentum-psi-sum", (be,), _first_coeff(acc)))
    return StructureReport.collect(bad)


def exp_flow_check(s: SuperStructure, d: int) -> StructureReport:
    """Flow identity for the exponential of the K-matrix:

        sum_al  d(e^K)_{ab}/d(d_al) psi(C)_{lam al} = sum_c K_{a lam c} (e^K)_{cb}

    holds to order d-1 (the derivative costs one order)."""
    n, m = s.n, s.m
    bad = []
    kk = build_momentum_matrix(s, "K")
    cc = build_momentum_matrix(s, "C")
    ek = matrix_function(exp_coeffs(d), kk, d)
    psi = matrix_function(bernoulli_psi_coeffs(d), cc, d)
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            for lam in range(1, n + 1):
                lhs = MomentumPolynomial.zero(n, m)
                for al in range(1, n + 1):
                    lhs = lhs + ek.at(a, b).diff(al) * psi.at(lam, al)
                rhs = MomentumPolynomial.zero(n, m)
                for c in range(1, m + 1):
                    kv = s.K(a, lam, c)
                    if kv:
                        rhs = rhs + ek.at(c, b).scale(kv)
                res = lhs - rhs
                res = res.truncate(min(d - 1, res.order))
                if not res.is_zero():
                    bad.append(("exp-flow", (a, b, lam), _first_coeff(res)))
    return StructureReport.collect(bad)
