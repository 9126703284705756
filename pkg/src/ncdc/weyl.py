"""Normal-ordered arithmetic in a semicompleted Weyl superalgebra.

Generators: n even pairs (x_i, d_i) with d_i x_j - x_j d_i = delta_ij, and
m odd pairs (xi_a, q_a) with q_a xi_b + xi_b q_a = delta_ab and
xi_a^2 = q_a^2 = 0.  All other pairs of generators supercommute.  Elements
are polynomial in x and xi and formal power series in d and q; since the
q_a are nilpotent, only the d-direction is ever truncated.

A monomial is stored in normal order as a 4-tuple

    (x exponents, ascending xi indices, d exponents, ascending q indices)

with the exponent tuples of length n and the index tuples 1-based.  An
element is a sparse map monomial -> GaussianRational together with a
validity order: the d-degree up to which its coefficients are exact.  An
order of ``INF`` marks an exact polynomial.  The product propagates

    order(A * B) = min(order(A) - max_x_degree(B), order(B))

because unknown d-terms of A can lose at most max_x_degree(B) powers of d
to contractions, while unknown terms of B keep their own d-degree.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as _iproduct
from math import comb, factorial

from .errors import DimensionMismatch, OrderError, ParityError, PreconditionError
from .scalars import GR_ONE, GaussianRational, gaussian

INF = float("inf")


# ---------------------------------------------------------------------------
# monomial helpers


@lru_cache(maxsize=None)
def _fermi_move(t: tuple, s: tuple):
    """Rewrite q_t xi_s as a signed sum of xi_s' q_t' terms.

    Returns a tuple of (sign, remaining xi word, remaining q word); both
    input words are ascending and the outputs are subsequences, hence
    ascending as well.
    """
    if not t or not s:
        return ((1, s, t),)
    last = t[-1]
    head = t[:-1]
    out = []
    # q_last passes the whole xi word
    pass_sign = -1 if len(s) & 1 else 1
    for sg, s2, t2 in _fermi_move(head, s):
        out.append((sg * pass_sign, s2, t2 + (last,)))
    # or contracts against an equal index (at most one can match)
    for j, sv in enumerate(s):
        if sv == last:
            csign = -1 if j & 1 else 1
            reduced = s[:j] + s[j + 1:]
            for sg, s2, t2 in _fermi_move(head, reduced):
                out.append((sg * csign, s2, t2))
            break
    return tuple(out)


@lru_cache(maxsize=None)
def _merge_odd(p: tuple, r: tuple):
    """Merge two ascending odd-index words; None if they collide (square = 0)."""
    if not p:
        return 1, r
    if not r:
        return 1, p
    inv = 0
    for a in p:
        for b in r:
            if a == b:
                return None
            if a > b:
                inv += 1
    return (1 if inv % 2 == 0 else -1), tuple(sorted(p + r))


@lru_cache(maxsize=None)
def _boson_options(d1: tuple, x2: tuple):
    """All contraction choices for moving d^{d1} past x^{x2}.

    Yields (integer coefficient, j) over 0 <= j <= min(d1, x2) slotwise,
    with coefficient prod_i C(d1_i, j_i) C(x2_i, j_i) j_i!.
    """
    ranges = [range(min(a, b) + 1) for a, b in zip(d1, x2)]
    out = []
    for j in _iproduct(*ranges):
        coef = 1
        for a, b, ji in zip(d1, x2, j):
            if ji:
                coef *= comb(a, ji) * comb(b, ji) * factorial(ji)
        out.append((coef, j))
    return tuple(out)


def _mono_parity(mono) -> int:
    return (len(mono[1]) + len(mono[3])) & 1


# ---------------------------------------------------------------------------


class WeylElement:
    """Immutable-by-convention sparse element; build via WeylAlgebra or ops."""

    __slots__ = ("n", "m", "terms", "order")

    def __init__(self, n, m, terms, order):
        self.n = n
        self.m = m
        self.terms = terms
        self.order = order

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def max_x_degree(self) -> int:
        return max((sum(k[0]) for k in self.terms), default=0)

    def max_d_degree(self) -> int:
        return max((sum(k[2]) for k in self.terms), default=0)

    def parity(self):
        """0 or 1 when homogeneous (zero counts as even), None when mixed."""
        p = None
        for mono in self.terms:
            mp = _mono_parity(mono)
            if p is None:
                p = mp
            elif p != mp:
                return None
        return 0 if p is None else p

    def coefficient(self, mono) -> GaussianRational:
        return self.terms.get(mono, GaussianRational())

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        _check_same(self, other)
        order = min(self.order, other.order)
        out = dict(_filtered(self.terms, order))
        for k, v in other.terms.items():
            if sum(k[2]) > order:
                continue
            cur = out.get(k)
            s = v if cur is None else cur + v
            if s:
                out[k] = s
            elif cur is not None:
                del out[k]
        return WeylElement(self.n, self.m, out, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return WeylElement(self.n, self.m, {k: -v for k, v in self.terms.items()}, self.order)

    def scale(self, c):
        c = gaussian(c) if type(c) is not GaussianRational else c
        if not c:
            return WeylElement(self.n, self.m, {}, self.order)
        return WeylElement(self.n, self.m, {k: v * c for k, v in self.terms.items()}, self.order)

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return (self.n, self.m, self.order) == (other.n, other.m, other.order) \
            and self.terms == other.terms

    __hash__ = None

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            bits.append(f"{c} * {_mono_str(mono)}")
        return " + ".join(bits)

    def __repr__(self):
        return f"<WeylElement n={self.n} m={self.m} order={self.order} terms={len(self.terms)}>"


def _mono_str(mono):
    x, s, d, t = mono
    parts = []
    for i, k in enumerate(x, 1):
        if k:
            parts.append(f"x{i}" + (f"^{k}" if k > 1 else ""))
    parts.extend(f"xi{a}" for a in s)
    for i, k in enumerate(d, 1):
        if k:
            parts.append(f"d{i}" + (f"^{k}" if k > 1 else ""))
    parts.extend(f"q{a}" for a in t)
    return " ".join(parts) if parts else "1"


def _filtered(terms, order):
    if order == INF:
        return terms.items()
    return ((k, v) for k, v in terms.items() if sum(k[2]) <= order)


def _check_same(a, b):
    if a.n != b.n or a.m != b.m:
        raise DimensionMismatch(
            f"elements over (n={a.n}, m={a.m}) and (n={b.n}, m={b.m}) cannot be combined")


class WeylAlgebra:
    """Factory for elements over fixed generator counts (n even, m odd pairs)."""

    __slots__ = ("n", "m")

    def __init__(self, n: int, m: int):
        if n < 0 or m < 0:
            raise PreconditionError("generator counts must be non-negative")
        self.n = n
        self.m = m

    def _zx(self):
        return (0,) * self.n

    def zero(self, order=INF):
        return WeylElement(self.n, self.m, {}, order)

    def const(self, c, order=INF):
        c = gaussian(c) if type(c) is not GaussianRational else c
        if not c:
            return self.zero(order)
        return WeylElement(self.n, self.m, {(self._zx(), (), self._zx(), ()): c}, order)

    def one(self, order=INF):
        return self.const(1, order)

    def x(self, i, power=1):
        self._check_even(i)
        e = tuple(power if j == i else 0 for j in range(1, self.n + 1))
        return WeylElement(self.n, self.m, {(e, (), self._zx(), ()): GR_ONE}, INF)

    def d(self, i, power=1):
        self._check_even(i)
        e = tuple(power if j == i else 0 for j in range(1, self.n + 1))
        return WeylElement(self.n, self.m, {(self._zx(), (), e, ()): GR_ONE}, INF)

    def xi(self, a):
        self._check_odd(a)
        return WeylElement(self.n, self.m, {(self._zx(), (a,), self._zx(), ()): GR_ONE}, INF)

    def q(self, a):
        self._check_odd(a)
        return WeylElement(self.n, self.m, {(self._zx(), (), self._zx(), (a,)): GR_ONE}, INF)

    def element(self, terms, order=INF):
        """Validating constructor from a {monomial: coefficient} mapping."""
        n = self.n
        clean = {}
        for mono, c in terms.items():
            x, s, d, t = mono
            if len(x) != n or len(d) != n:
                raise DimensionMismatch("exponent tuples must have length n")
            if any(k < 0 for k in x) or any(k < 0 for k in d):
                raise PreconditionError("negative exponent")
            for word in (s, t):
                if tuple(sorted(set(word))) != tuple(word):
                    raise PreconditionError("odd index words must be strictly ascending")
                if word and not (1 <= word[0] and word[-1] <= self.m):
                    raise PreconditionError("odd index out of range")
            c = gaussian(c) if type(c) is not GaussianRational else c
            if c:
                clean[(tuple(x), tuple(s), tuple(d), tuple(t))] = c
        if order != INF:
            clean = {k: v for k, v in clean.items() if sum(k[2]) <= order}
        return WeylElement(n, self.m, clean, order)

    def _check_even(self, i):
        if not 1 <= i <= self.n:
            raise PreconditionError(f"even index {i} out of range 1..{self.n}")

    def _check_odd(self, a):
        if not 1 <= a <= self.m:
            raise PreconditionError(f"odd index {a} out of range 1..{self.m}")


# ---------------------------------------------------------------------------
# operations


def normal_product(a: WeylElement, b: WeylElement) -> WeylElement:
    """Normal-ordered product with sound validity-order propagation."""
    _check_same(a, b)
    order = b.order if a.order == INF else min(a.order - b.max_x_degree(), b.order)
    out = {}
    bterms = b.terms
    finite = order != INF
    for m1, c1 in a.terms.items():
        x1, s1, d1, t1 = m1
        deg1 = sum(d1)
        for m2, c2 in bterms.items():
            x2, s2, d2, t2 = m2
            base = deg1 + sum(d2)
            if finite:
                # least reachable d-degree after maximal contraction
                room = sum(min(u, v) for u, v in zip(d1, x2))
                if base - room > order:
                    continue
            coeff = c1 * c2
            for fsign, s2r, t1r in _fermi_move(t1, s2):
                mxi = _merge_odd(s1, s2r)
                if mxi is None:
                    continue
                mq = _merge_odd(t1r, t2)
                if mq is None:
                    continue
                sgn = fsign * mxi[0] * mq[0]
                c0 = coeff if sgn > 0 else -coeff
                for bco, j in _boson_options(d1, x2):
                    if finite and base - sum(j) > order:
                        continue
                    xr = tuple(u + v - w for u, v, w in zip(x1, x2, j))
                    dr = tuple(u - w + v for u, v, w in zip(d1, d2, j))
                    key = (xr, mxi[1], dr, mq[1])
                    c = c0 * bco if bco != 1 else c0
                    cur = out.get(key)
                    s = c if cur is None else cur + c
                    if s:
                        out[key] = s
                    elif cur is not None:
                        del out[key]
    return WeylElement(a.n, a.m, out, order)


def super_commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    """[a, b] = a b - (-1)^{|a||b|} b a; requires homogeneous operands."""
    pa = a.parity()
    pb = b.parity()
    if pa is None or pb is None:
        raise ParityError("super commutator needs homogeneous-parity operands")
    ab = normal_product(a, b)
    ba = normal_product(b, a)
    if pa and pb:
        return ab + ba
    return ab - ba


def truncate(a: WeylElement, order) -> WeylElement:
    """Weaken a to the given validity order (never strengthens)."""
    if order > a.order:
        raise OrderError(f"cannot extend validity from order {a.order} to {order}")
    if order == a.order:
        return a
    return WeylElement(a.n, a.m, dict(_filtered(a.terms, order)), order)


def partial_wrt_momentum(a: WeylElement, rho: int) -> WeylElement:
    """Formal coefficientwise derivative with respect to d_rho."""
    if not 1 <= rho <= a.n:
        raise PreconditionError(f"momentum index {rho} out of range 1..{a.n}")
    i = rho - 1
    out = {}
    for (x, s, d, t), c in a.terms.items():
        k = d[i]
        if not k:
            continue
        nd = d[:i] + (k - 1,) + d[i + 1:]
        key = (x, s, nd, t)
        v = c * k
        cur = out.get(key)
        sm = v if cur is None else cur + v
        if sm:
            out[key] = sm
        elif cur is not None:
            del out[key]
    order = a.order if a.order == INF else a.order - 1
    return WeylElement(a.n, a.m, out, order)


def vacuum_project(a: WeylElement) -> WeylElement:
    """Keep only d-free, q-free terms; those coefficients are exact."""
    out = {k: v for k, v in a.terms.items() if not any(k[2]) and not k[3]}
    return WeylElement(a.n, a.m, out, INF)
