"""PBW normal forms in the enveloping algebra and the two shift actions.

Generators are numbered 1..n for the coordinates X and n+1..n+m for the
one-forms theta.  The canonical basis consists of monomials

    X_1^{k_1} ... X_n^{k_n} theta_{a_1} ... theta_{a_l},   a_1 < ... < a_l

keyed as (k-tuple, ascending theta tuple).  Rewriting uses the merged
bracket table: swapping an out-of-order adjacent pair Z_u Z_v costs the
supercommutator correction sum_J table[u,v,J] Z_J, and an adjacent theta
square collapses to zero.  Each rewrite either removes an inversion or
lowers the word degree, so normalization terminates.

The left action moves a generator to the far right of a monomial,

    T[A,B] act (Z_C W) = sum_J table[A,C,J] (T[J,B] act W)
                         + (-1)^{par(T[A,B]) par(Z_C)} Z_C (T[A,B] act W)

with T[A,B] act 1 = delta.  The right action S moves it to the far left.
Its single-generator value is derived in three lines from the commutation
rule [S[A,B], Z_C] = -sum_J table[J,C,B] S[A,J]:

    S[A,B] act (Z_C W) = (S[A,B] Z_C) act W
                       = ((-1)^{par S par Z_C} Z_C S[A,B] + [S[A,B], Z_C]) act W
                       = (-1)^{par S par Z_C} Z_C (S[A,B] act W)
                         - sum_J table[J,C,B] (S[A,J] act W)

and W = 1 gives the base case S[A,B] act Z_C = (+-) delta_AB Z_C - table[A,C,B].
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, FormatError, PreconditionError
from .scalars import GR_ONE, GaussianRational, format_value, gaussian, parse_value
from .structure import SuperStructure, merge_table

_ZERO = GaussianRational()


@dataclass(frozen=True)
class ShiftIndex:
    """Names one entry of the shift-operator matrix; side is "T" or "S"."""

    A: int
    B: int
    side: str

    def __post_init__(self):
        if self.side not in ("T", "S"):
            raise PreconditionError(f'side must be "T" or "S", got {self.side!r}')
        if self.A < 1 or self.B < 1:
            raise PreconditionError("shift indices are 1-based")


class PBWElement:
    """Sparse element of U(g) over the canonical ordered basis."""

    __slots__ = ("n", "m", "terms")

    def __init__(self, n, m, terms):
        self.n = n
        self.m = m
        self.terms = terms

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((sum(k[0]) + len(k[1]) for k in self.terms), default=0)

    def theta_free(self):
        return all(not k[1] for k in self.terms)

    def parity(self):
        p = None
        for _, th in self.terms:
            mp = len(th) & 1
            if p is None:
                p = mp
            elif p != mp:
                return None
        return 0 if p is None else p

    def coefficient(self, key):
        return self.terms.get(key, _ZERO)

    def __add__(self, other):
        _same(self, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            s = v if cur is None else cur + v
            if s:
                out[k] = s
            elif cur is not None:
                del out[k]
        return PBWElement(self.n, self.m, out)

    def __neg__(self):
        return PBWElement(self.n, self.m, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return PBWElement(self.n, self.m, {})
        return PBWElement(self.n, self.m, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, PBWElement):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and self.terms == other.terms

    __hash__ = None

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"<PBWElement n={self.n} m={self.m} terms={len(self.terms)}>"


def _same(a, b):
    if a.n != b.n or a.m != b.m:
        raise DimensionMismatch(
            f"elements over (n={a.n}, m={a.m}) and (n={b.n}, m={b.m}) cannot be combined")


def _axpy(dst, src, c):
    for k, v in src.items():
        w = v * c
        cur = dst.get(k)
        s = w if cur is None else cur + w
        if s:
            dst[k] = s
        elif cur is not None:
            del dst[k]


class EnvelopingAlgebra:
    """Normalization and shift-action engine over a fixed structure."""

    def __init__(self, structure: SuperStructure):
        self.structure = structure
        self.n = structure.n
        self.m = structure.m
        table = merge_table(structure)
        self._par = [0] * (self.n + self.m + 1)
        for i, p in table.parity.items():
            self._par[i] = p
        # bracket corrections keyed two ways: (A,C) -> (J, table[A,C,J])
        # for normalization and the left action, (C,B) -> (J, table[J,C,B])
        # for the right action.
        adj_t = {}
        adj_s = {}
        for (a, c, j), v in table.entries.items():
            adj_t.setdefault((a, c), []).append((j, v))
            adj_s.setdefault((c, j), []).append((a, v))
        self._adj_t = {k: tuple(sorted(v)) for k, v in adj_t.items()}
        self._adj_s = {k: tuple(sorted(v)) for k, v in adj_s.items()}
        self._empty_key = ((0,) * self.n, ())
        self._norm_cache = {(): {self._empty_key: GR_ONE}}
        self._act_cache = {}

    # -- element builders -----------------------------------------------------

    def zero(self):
        return PBWElement(self.n, self.m, {})

    def one(self):
        return PBWElement(self.n, self.m, {self._empty_key: GR_ONE})

    def x(self, mu):
        self._check_gen(mu, self.n, "coordinate")
        xp = tuple(1 if i == mu else 0 for i in range(1, self.n + 1))
        return PBWElement(self.n, self.m, {(xp, ()): GR_ONE})

    def theta(self, a):
        self._check_gen(a, self.m, "one-form")
        return PBWElement(self.n, self.m, {((0,) * self.n, (a,)): GR_ONE})

    def generator(self, A):
        """Z_A for a merged index in 1..n+m."""
        if A <= self.n:
            return self.x(A)
        return self.theta(A - self.n)

    def from_terms(self, terms):
        out = {}
        for k, v in terms.items():
            if v:
                out[k] = v
        return PBWElement(self.n, self.m, out)

    def _check_gen(self, i, hi, what):
        if not 1 <= i <= hi:
            raise PreconditionError(f"{what} index {i} out of range 1..{hi}")

    # -- normalization ----------------------------------------------------------

    def pbw_normal_form(self, word, coeff=GR_ONE) -> PBWElement:
        """Normalize a product of generators given by merged indices."""
        word = tuple(word)
        top = self.n + self.m
        for g in word:
            if not 1 <= g <= top:
                raise PreconditionError(f"generator index {g} out of range 1..{top}")
        if type(coeff) is not GaussianRational:
            coeff = gaussian(coeff)
        res = self._norm(word)
        out = {}
        _axpy(out, res, coeff)
        return PBWElement(self.n, self.m, out)

    def _norm(self, word):
        cached = self._norm_cache.get(word)
        if cached is not None:
            return cached
        res = None
        for i in range(len(word) - 1):
            u, v = word[i], word[i + 1]
            if u < v:
                continue
            if u == v:
                if u <= self.n:
                    continue
                res = {}
                break
            head, tail = word[:i], word[i + 2:]
            acc = {}
            sign = -1 if self._par[u] and self._par[v] else 1
            _axpy(acc, self._norm(head + (v, u) + tail), sign)
            for j, cv in self._adj_t.get((u, v), ()):
                _axpy(acc, self._norm(head + (j,) + tail), cv)
            res = acc
            break
        if res is None:
            res = {self._word_key(word): GR_ONE}
        self._norm_cache[word] = res
        return res

    def _word_key(self, word):
        xp = [0] * self.n
        th = []
        for g in word:
            if g <= self.n:
                xp[g - 1] += 1
            else:
                th.append(g - self.n)
        return tuple(xp), tuple(th)

    def _expand(self, key):
        xp, th = key
        word = []
        for i, k in enumerate(xp, 1):
            word.extend([i] * k)
        word.extend(self.n + a for a in th)
        return tuple(word)

    def multiply(self, p: PBWElement, q: PBWElement) -> PBWElement:
        _same(p, q)
        out = {}
        for k1, c1 in p.terms.items():
            w1 = self._expand(k1)
            for k2, c2 in q.terms.items():
                _axpy(out, self._norm(w1 + self._expand(k2)), c1 * c2)
        return PBWElement(self.n, self.m, out)

    # -- shift actions ----------------------------------------------------------

    def _act(self, side, A, B, word):
        key = (side, A, B, word)
        cached = self._act_cache.get(key)
        if cached is not None:
            return cached
        if not word:
            res = {self._empty_key: GR_ONE} if A == B else {}
        else:
            C, rest = word[0], word[1:]
            acc = {}
            if side == "T":
                for J, v in self._adj_t.get((A, C), ()):
                    _axpy(acc, self._act(side, J, B, rest), v)
            else:
                for J, v in self._adj_s.get((C, B), ()):
                    _axpy(acc, self._act(side, A, J, rest), -v)
            sub = self._act(side, A, B, rest)
            neg = (self._par[A] ^ self._par[B]) and self._par[C]
            for k, c in sub.items():
                _axpy(acc, self._norm((C,) + self._expand(k)), -c if neg else c)
            res = acc
        self._act_cache[key] = res
        return res

    def _act_elem(self, side, A, B, p: PBWElement) -> PBWElement:
        top = self.n + self.m
        if not (1 <= A <= top and 1 <= B <= top):
            raise PreconditionError(f"shift index out of range 1..{top}")
        out = {}
        for k, c in p.terms.items():
            _axpy(out, self._act(side, A, B, self._expand(k)), c)
        return PBWElement(self.n, self.m, out)

    def shift_act_left(self, idx: ShiftIndex, p: PBWElement) -> PBWElement:
        if idx.side != "T":
            raise PreconditionError("left action takes a T-side index")
        return self._act_elem("T", idx.A, idx.B, p)

    def shift_act_right(self, idx: ShiftIndex, p: PBWElement) -> PBWElement:
        if idx.side != "S":
            raise PreconditionError("right action takes an S-side index")
        return self._act_elem("S", idx.A, idx.B, p)

    def shift_act_left_block(self, idx: ShiftIndex, p: PBWElement, q: PBWElement) -> PBWElement:
        """T[A,B] act (p q) assembled from the blockwise product rules."""
        if idx.side != "T":
            raise PreconditionError("block rules are stated for the left action")
        n, m = self.n, self.m
        A, B = idx.A, idx.B
        acc = self.zero()
        if A <= n and B <= n:
            for al in range(1, n + 1):
                acc = acc + self.multiply(self._act_elem("T", A, al, p),
                                          self._act_elem("T", al, B, q))
        elif A <= n < B:
            for a in range(n + 1, n + m + 1):
                acc = acc + self.multiply(self._act_elem("T", A, a, p),
                                          self._act_elem("T", a, B, q))
            # even part of p keeps its sign, odd part flips
            signed = {}
            for k, c in p.terms.items():
                signed[k] = -c if len(k[1]) & 1 else c
            psigned = PBWElement(n, m, signed)
            for al in range(1, n + 1):
                acc = acc + self.multiply(self._act_elem("T", A, al, psigned),
                                          self._act_elem("T", al, B, q))
        elif A > n and B > n:
            for b in range(n + 1, n + m + 1):
                acc = acc + self.multiply(self._act_elem("T", A, b, p),
                                          self._act_elem("T", b, B, q))
        # A > n >= B: zero block
        return acc

    # -- generator moves ---------------------------------------------------------

    def move_right(self, A: int, p: PBWElement):
        """Coefficients of Z_A p re-expressed with the generator on the right.

        Returns {B: T[A,B] act p} over all B; guarantee
        sum_B (T[A,B] act p) Z_B = Z_A p after normalization.
        """
        if not p.theta_free():
            raise PreconditionError("moves are defined for one-form-free elements only")
        return {B: self._act_elem("T", A, B, p) for B in range(1, self.n + self.m + 1)}

    def move_left(self, A: int, p: PBWElement):
        """Dual move: {B: S[A,B] act p} with sum_B Z_B (S[A,B] act p) = p Z_A."""
        if not p.theta_free():
            raise PreconditionError("moves are defined for one-form-free elements only")
        return {B: self._act_elem("S", A, B, p) for B in range(1, self.n + self.m + 1)}


# ---------------------------------------------------------------------------
# rendering and parsing


def _mono_str(key):
    xp, th = key
    parts = []
    for i, k in enumerate(xp, 1):
        if k:
            parts.append(f"X{i}" + (f"^{k}" if k > 1 else ""))
    parts.extend(f"theta{a}" for a in th)
    return " ".join(parts)


def render(p: PBWElement) -> str:
    """Human text form; descending degree, tie-broken by basis key."""
    if not p.terms:
        return "0"
    keys = sorted(p.terms, key=lambda k: (-(sum(k[0]) + len(k[1])), k))
    out = []
    for k in keys:
        c = p.terms[k]
        neg = c.re < 0 or (not c.re and c.im < 0)
        mag = -c if neg else c
        mono = _mono_str(k)
        if not mono:
            body = format_value(mag)
        elif mag == GR_ONE:
            body = mono
        elif mag.re and mag.im:
            body = f"({format_value(mag)}) {mono}"
        else:
            body = f"{format_value(mag)} {mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


_VALUE_CHARS = set("0123456789/i")


def parse_expression(alg: EnvelopingAlgebra, text: str) -> PBWElement:
    """Parse the sum-of-monomials grammar into a normalized element.

    expr := term (("+"|"-") term)* ; term := coeff? factor+ ;
    factor := ("X"|"theta") int ("^" int)? .  A coefficient is a value
    token (digits, "/", "i", optionally a leading "-"); interior "+" and
    "-" always separate terms, so a mixed value must either be split into
    two terms or wrapped in parentheses the way render() prints it.
    """
    pos = 0
    size = len(text)

    def skip_ws():
        nonlocal pos
        while pos < size and text[pos].isspace():
            pos += 1

    def read_int(what):
        nonlocal pos
        start = pos
        while pos < size and text[pos].isdigit():
            pos += 1
        if pos == start:
            raise FormatError(f"expected {what}", offset=start)
        return int(text[start:pos]), start

    def read_term(sign):
        nonlocal pos
        coeff = GR_ONE
        skip_ws()
        if pos + 1 < size and text[pos] == "-" and text[pos + 1] == "(":
            sign = -sign
            pos += 1
        if pos < size and text[pos] == "(":
            start = pos
            end = text.find(")", pos)
            if end < 0:
                raise FormatError("unclosed parenthesis", offset=start)
            tok = text[pos + 1:end]
            try:
                coeff = parse_value(tok)
            except FormatError as exc:
                off = start + 1 + (exc.offset or 0)
                raise FormatError(exc.message, offset=off) from None
            pos = end + 1
        elif pos < size and (text[pos].isdigit() or text[pos] in "-i"):
            start = pos
            if text[pos] == "-":
                pos += 1
            while pos < size and text[pos] in _VALUE_CHARS:
                pos += 1
            tok = text[start:pos]
            try:
                coeff = parse_value(tok)
            except FormatError as exc:
                off = start + (exc.offset or 0)
                raise FormatError(exc.message, offset=off) from None
        word = []
        saw_factor = False
        while True:
            skip_ws()
            if pos < size and text[pos] == "X":
                pos += 1
                idx, at = read_int("coordinate index after X")
                if not 1 <= idx <= alg.n:
                    raise FormatError(f"coordinate index {idx} out of range 1..{alg.n}",
                                      offset=at)
                gen = idx
            elif text.startswith("theta", pos):
                pos += 5
                idx, at = read_int("one-form index after theta")
                if not 1 <= idx <= alg.m:
                    raise FormatError(f"one-form index {idx} out of range 1..{alg.m}",
                                      offset=at)
                gen = alg.n + idx
            else:
                break
            power = 1
            if pos < size and text[pos] == "^":
                pos += 1
                power, _ = read_int("exponent after ^")
            word.extend([gen] * power)
            saw_factor = True
        if not saw_factor:
            raise FormatError("expected a generator factor", offset=pos)
        return alg.pbw_normal_form(word, coeff if sign > 0 else -coeff)

    skip_ws()
    if pos == size:
        raise FormatError("empty expression", offset=0)
    acc = read_term(1)
    while True:
        skip_ws()
        if pos == size:
            return acc
        ch = text[pos]
        if ch not in "+-":
            raise FormatError(f"unexpected character {ch!r}", offset=pos)
        pos += 1
        acc = acc + read_term(1 if ch == "+" else -1)
