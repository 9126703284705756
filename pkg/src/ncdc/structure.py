"""Structure constants of the coordinate/one-form superalgebra.

A structure holds n even generators X_mu and m odd generators theta_a with

    [X_mu, X_nu] = sum_lam C_{mu nu lam} X_lam
    [theta_a, X_nu] = sum_b K_{a nu b} theta_b
    [theta_a, theta_b] = 0

C is kept canonically for mu < nu only; the accessor completes the other
orientation with a sign.  Validation evaluates the graded Jacobi sums
exhaustively and reports every failing index tuple with its exact residual.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FormatError, PreconditionError, StructureError
from .scalars import GaussianRational, format_value, gaussian, parse_value

_ZERO = GaussianRational()


def _coerce(v):
    return v if type(v) is GaussianRational else gaussian(v)


class SuperStructure:
    """Validated container for (n, m, C, K) with canonical C storage."""

    __slots__ = ("n", "m", "_c", "_k")

    def __init__(self, n: int, m: int, C=None, K=None):
        if n < 0 or m < 0:
            raise PreconditionError("generator counts must be non-negative")
        self.n = n
        self.m = m
        self._c = {}
        self._k = {}
        for (mu, nu, lam), v in (C or {}).items():
            v = _coerce(v)
            if not (1 <= mu <= n and 1 <= nu <= n and 1 <= lam <= n):
                raise StructureError(f"C index ({mu},{nu},{lam}) out of range 1..{n}")
            if not v:
                continue
            if mu == nu:
                raise StructureError(
                    f"C_({mu},{nu},{lam}) must vanish: antisymmetry forces zero diagonal")
            key, want = ((mu, nu, lam), v) if mu < nu else ((nu, mu, lam), -v)
            have = self._c.get(key)
            if have is None:
                self._c[key] = want
            elif have != want:
                raise StructureError(
                    f"inconsistent C entries around ({mu},{nu},{lam}): antisymmetry violated")
        for (a, nu, b), v in (K or {}).items():
            v = _coerce(v)
            if not (1 <= a <= m and 1 <= b <= m and 1 <= nu <= n):
                raise StructureError(f"K index ({a},{nu},{b}) out of range")
            if not v:
                continue
            if (a, nu, b) in self._k:
                raise StructureError(f"duplicate K entry ({a},{nu},{b})")
            self._k[(a, nu, b)] = v

    # -- accessors (full-tensor view) ----------------------------------------

    def C(self, mu: int, nu: int, lam: int) -> GaussianRational:
        if mu < nu:
            return self._c.get((mu, nu, lam), _ZERO)
        if mu > nu:
            v = self._c.get((nu, mu, lam))
            return -v if v is not None else _ZERO
        return _ZERO

    def K(self, a: int, nu: int, b: int) -> GaussianRational:
        return self._k.get((a, nu, b), _ZERO)

    def c_canonical_items(self):
        return self._c.items()

    def c_full_items(self):
        for (mu, nu, lam), v in self._c.items():
            yield (mu, nu, lam), v
            yield (nu, mu, lam), -v

    def k_items(self):
        return self._k.items()

    def __eq__(self, other):
        if not isinstance(other, SuperStructure):
            return NotImplemented
        return (self.n, self.m, self._c, self._k) == (other.n, other.m, other._c, other._k)

    __hash__ = None

    def __repr__(self):
        return (f"<SuperStructure n={self.n} m={self.m} "
                f"C#{len(self._c)} K#{len(self._k)}>")


@dataclass
class StructureReport:
    """Outcome of a tuplewise check; passed iff no violations."""

    passed: bool
    violations: list = field(default_factory=list)

    @classmethod
    def collect(cls, violations):
        violations = list(violations)
        return cls(not violations, violations)


@dataclass
class MergedTable:
    """Single bracket table over indices 1..n+m with parities (0 even, 1 odd)."""

    n: int
    m: int
    entries: dict
    parity: dict


def validate_structure(s: SuperStructure) -> StructureReport:
    """Exhaustive antisymmetry and graded-Jacobi validation."""
    bad = []
    n, m = s.n, s.m
    rng = range(1, n + 1)
    # antisymmetry: trivially true for canonical storage, evaluated regardless
    for mu in rng:
        for nu in rng:
            for lam in rng:
                r = s.C(mu, nu, lam) + s.C(nu, mu, lam)
                if r:
                    bad.append(("antisymmetry", (mu, nu, lam), r))
    for mu in rng:
        for al in rng:
            for be in rng:
                for nu in rng:
                    r = _ZERO
                    for rho in rng:
                        r = (r + s.C(mu, al, rho) * s.C(rho, be, nu)
                             + s.C(al, be, rho) * s.C(rho, mu, nu)
                             + s.C(be, mu, rho) * s.C(rho, al, nu))
                    if r:
                        bad.append(("jacobi-even", (mu, al, be, nu), r))
    arng = range(1, m + 1)
    for a in arng:
        for mu in rng:
            for nu in rng:
                for c in arng:
                    r = _ZERO
                    for b in arng:
                        r = r + s.K(a, nu, b) * s.K(b, mu, c) - s.K(a, mu, b) * s.K(b, nu, c)
                    for rho in rng:
                        r = r + s.C(mu, nu, rho) * s.K(a, rho, c)
                    if r:
                        bad.append(("jacobi-mixed", (a, mu, nu, c), r))
    bad.sort(key=lambda v: (("antisymmetry", "jacobi-even", "jacobi-mixed").index(v[0]), v[1]))
    return StructureReport.collect(bad)


def check_calculus_condition(s: SuperStructure) -> StructureReport:
    """K_{mu nu al} - K_{nu mu al} = C_{mu nu al}, the Leibniz-compatibility law."""
    if s.n != s.m:
        raise PreconditionError(
            f"calculus condition needs matching generator counts, got n={s.n}, m={s.m}")
    bad = []
    rng = range(1, s.n + 1)
    for mu in rng:
        for nu in rng:
            for al in rng:
                r = s.K(mu, nu, al) - s.K(nu, mu, al) - s.C(mu, nu, al)
                if r:
                    bad.append(("leibniz-compat", (mu, nu, al), r))
    bad.sort(key=lambda v: v[1])
    return StructureReport.collect(bad)


# ---------------------------------------------------------------------------
# builders


def _rat(x, what):
    if isinstance(x, float):
        raise PreconditionError(f"{what} must be exact (int, Fraction, or string), not float")
    try:
        return Fraction(x)
    except (ValueError, TypeError) as exc:
        raise PreconditionError(f"cannot read {what} as a rational: {x!r}") from exc


def build_kappa(n: int, family: str, c, a) -> SuperStructure:
    """Deformed space with C_{mu nu lam} = i(a_mu d_{nu lam} - a_nu d_{mu lam}).

    family selects one of the three one-form sectors S1, S2, S3; all of them
    satisfy the Jacobi and Leibniz-compatibility conditions for any rational
    c, provided a != 0.  a = 0 is allowed only with c = 0 and gives the
    abelian limit.
    """
    if n < 1:
        raise PreconditionError("need at least one coordinate")
    if family not in ("S1", "S2", "S3"):
        raise PreconditionError(f"unknown family {family!r}, expected S1, S2 or S3")
    c = _rat(c, "deformation parameter c")
    a = [_rat(v, "vector component") for v in a]
    if len(a) != n:
        raise PreconditionError(f"vector a must have {n} components, got {len(a)}")
    norm = sum(v * v for v in a)
    if norm == 0:
        if c != 0:
            raise PreconditionError("a = 0 divides the c-terms by |a|^2; set c = 0 or a != 0")
        return SuperStructure(n, n, {}, {})
    cw = c / norm
    Ct = {}
    Kt = {}
    rng = range(1, n + 1)
    for mu in rng:
        for nu in rng:
            for lam in rng:
                cv = (a[mu - 1] if nu == lam else 0) - (a[nu - 1] if mu == lam else 0)
                if cv:
                    Ct[(mu, nu, lam)] = GaussianRational(Fraction(0), cv)
                kv = cw * a[mu - 1] * a[nu - 1] * a[lam - 1]
                if family == "S1":
                    if mu == lam:
                        kv -= a[nu - 1]
                elif family == "S2":
                    if mu == lam:
                        kv -= c * a[nu - 1]
                    if nu == lam:
                        kv += (1 - c) * a[mu - 1]
                else:
                    if mu == nu:
                        kv -= (1 + c) * a[lam - 1]
                    if mu == lam:
                        kv -= a[nu - 1]
                if kv:
                    Kt[(mu, nu, lam)] = GaussianRational(Fraction(0), kv)
    return SuperStructure(n, n, Ct, Kt)


def adjoint_representation(s: SuperStructure):
    """Matrices (R_nu)_{ac} = C_{nu c a}, acting on the algebra itself."""
    n = s.n
    return [[[s.C(nu, c, a) for c in range(1, n + 1)] for a in range(1, n + 1)]
            for nu in range(1, n + 1)]


def build_from_representation(n: int, C, R) -> SuperStructure:
    """Take K from a matrix representation of the coordinate algebra.

    R is a length-n list of m x m matrices that must close under commutator
    onto C: [R_mu, R_nu] = sum_rho C_{mu nu rho} R_rho.  Then K_{a nu b} is
    read off as (R_nu)_{ab}.
    """
    if len(R) != n:
        raise PreconditionError(f"need {n} matrices, got {len(R)}")
    mats = [[[_coerce(v) for v in row] for row in mat] for mat in R]
    m = len(mats[0]) if mats else 0
    for im, mat in enumerate(mats, 1):
        if len(mat) != m or any(len(row) != m for row in mat):
            raise PreconditionError(f"matrix {im} is not {m}x{m}")
    # closure check before anything is built
    probe = SuperStructure(n, 0, C, {})
    for mu in range(1, n + 1):
        for nu in range(mu + 1, n + 1):
            A, B = mats[mu - 1], mats[nu - 1]
            for i in range(m):
                for j in range(m):
                    lhs = _ZERO
                    for k in range(m):
                        lhs = lhs + A[i][k] * B[k][j] - B[i][k] * A[k][j]
                    rhs = _ZERO
                    for rho in range(1, n + 1):
                        cv = probe.C(mu, nu, rho)
                        if cv:
                            rhs = rhs + cv * mats[rho - 1][i][j]
                    if lhs != rhs:
                        raise StructureError(
                            f"matrices {mu} and {nu} do not close onto C "
                            f"(entry ({i + 1},{j + 1}))")
    Kt = {}
    for nu in range(1, n + 1):
        for a in range(1, m + 1):
            for b in range(1, m + 1):
                v = mats[nu - 1][a - 1][b - 1]
                if v:
                    Kt[(a, nu, b)] = v
    out = SuperStructure(n, m, C, Kt)
    rep = validate_structure(out)
    if not rep.passed:
        name, idx, res = rep.violations[0]
        raise StructureError(f"resulting structure fails {name} at {idx} with residual {res}")
    return out


def merge_table(s: SuperStructure) -> MergedTable:
    """Fold C and K into one table over indices 1..n+m.

    Entries: (mu,nu,lam) -> C, (mu, n+a, n+b) -> -K_{a mu b},
    (n+a, mu, n+b) -> K_{a mu b}; the odd-odd block is empty.
    """
    n, m = s.n, s.m
    entries = {}
    for key, v in s.c_full_items():
        entries[key] = v
    for (a, nu, b), v in s.k_items():
        entries[(nu, n + a, n + b)] = -v
        entries[(n + a, nu, n + b)] = v
    parity = {i: (0 if i <= n else 1) for i in range(1, n + m + 1)}
    return MergedTable(n, m, entries, parity)


# ---------------------------------------------------------------------------
# file format


_FORMAT_TAG = "ncdc-structure/1"


def _entry_val(raw, path):
    if not isinstance(raw, str):
        raise FormatError("value must be a string", path=path)
    try:
        return parse_value(raw)
    except FormatError as exc:
        raise FormatError(exc.message, path=path, offset=exc.offset) from None


def _entry_idx(raw, path, arity=3):
    if (not isinstance(raw, list) or len(raw) != arity
            or any(not isinstance(i, int) or isinstance(i, bool) for i in raw)):
        raise FormatError(f"idx must be a list of {arity} integers", path=path)
    return tuple(raw)


def _read_entries(obj, key, n_check):
    raw = obj.get(key, [])
    if not isinstance(raw, list):
        raise FormatError("expected a list of entries", path=key)
    out = []
    for pos, item in enumerate(raw):
        path = f"{key}[{pos}]"
        if not isinstance(item, dict) or set(item) != {"idx", "val"}:
            raise FormatError('entry must be an object with exactly "idx" and "val"', path=path)
        idx = _entry_idx(item["idx"], path + ".idx")
        n_check(idx, path + ".idx")
        val = _entry_val(item["val"], path + ".val")
        out.append((path, idx, val))
    return out


def read_structure(data) -> SuperStructure:
    """Parse the JSON structure format, completing C antisymmetrically."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"not valid UTF-8: {exc.reason}", offset=exc.start) from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, line=exc.lineno, col=exc.colno, offset=exc.pos) from None
    if not isinstance(obj, dict):
        raise FormatError("top level must be an object")
    unknown = set(obj) - {"format", "n", "m", "C", "K"}
    if unknown:
        raise FormatError(f"unknown top-level key {sorted(unknown)[0]!r}")
    if obj.get("format") != _FORMAT_TAG:
        raise FormatError(f'missing or wrong "format", expected "{_FORMAT_TAG}"', path="format")
    dims = {}
    for key in ("n", "m"):
        v = obj.get(key)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise FormatError("must be a non-negative integer", path=key)
        dims[key] = v
    n, m = dims["n"], dims["m"]

    def c_range(idx, path):
        if any(not 1 <= i <= n for i in idx):
            raise FormatError(f"index {list(idx)} out of range 1..{n}", path=path)

    def k_range(idx, path):
        a, nu, b = idx
        if not (1 <= a <= m and 1 <= b <= m):
            raise FormatError(f"one-form index out of range 1..{m}", path=path)
        if not 1 <= nu <= n:
            raise FormatError(f"coordinate index {nu} out of range 1..{n}", path=path)

    c_map = {}
    c_where = {}
    for path, (mu, nu, lam), val in _read_entries(obj, "C", c_range):
        if mu == nu:
            if val:
                raise FormatError("antisymmetry forces zero at equal first indices", path=path)
            continue
        key, want = ((mu, nu, lam), val) if mu < nu else ((nu, mu, lam), -val)
        if key in c_map:
            if c_map[key] != want:
                raise FormatError(
                    f"inconsistent with antisymmetry against {c_where[key]}", path=path)
        else:
            c_map[key] = want
            c_where[key] = path
    k_map = {}
    for path, idx, val in _read_entries(obj, "K", k_range):
        if idx in k_map:
            if k_map[idx] != val:
                raise FormatError("duplicate K entry with different value", path=path)
        else:
            k_map[idx] = val
    return SuperStructure(n, m, c_map, k_map)


def write_structure(s: SuperStructure) -> bytes:
    """Canonical serialization: sorted indices, canonical value strings."""
    obj = {
        "format": _FORMAT_TAG,
        "n": s.n,
        "m": s.m,
        "C": [{"idx": list(k), "val": format_value(v)}
              for k, v in sorted(s.c_canonical_items())],
        "K": [{"idx": list(k), "val": format_value(v)}
              for k, v in sorted(s.k_items())],
    }
    return (json.dumps(obj, indent=2) + "\n").encode("utf-8")
