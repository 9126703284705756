"""Exact complex-rational scalars and the value grammar used by the file formats.

Every coefficient in the engine lives in Q(i): numbers a + b*i with exact
rational a, b.  No floating point appears anywhere.

The textual form understood by :func:`parse_value` is

    value := term | term ("+"|"-") term
    term  := rat | rat? "i"
    rat   := "-"? digits ("/" digits)?

so ``1``, ``-2/3``, ``i``, ``2i``, ``-1i``, ``1/2-3i`` are all legal, while a
bare ``-i`` is not (write ``-1i``).  :func:`format_value` emits the canonical
spelling, which round-trips through :func:`parse_value`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .errors import FormatError

_F0 = Fraction(0)
_F1 = Fraction(1)


class GaussianRational(NamedTuple):
    """a + b*i with exact Fraction components.

    Tuple-inherited concatenation/repetition semantics for ``+`` and ``*``
    are shadowed by field arithmetic below.
    """

    re: Fraction = _F0
    im: Fraction = _F0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        if type(other) is not GaussianRational:
            other = gaussian(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not GaussianRational:
            other = gaussian(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return gaussian(other).__sub__(self)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        if type(other) is GaussianRational:
            a, b = self
            c, d = other
            if not b:
                if not d:
                    return GaussianRational(a * c, _F0)
                return GaussianRational(a * c, a * d)
            if not d:
                return GaussianRational(a * c, b * c)
            return GaussianRational(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero")
        n = self.norm_sq()
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        if type(other) is GaussianRational:
            return self * other.inverse()
        return NotImplemented

    def is_real(self) -> bool:
        return not self.im

    def __str__(self):
        return format_value(self)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


def gaussian(re=0, im=0) -> GaussianRational:
    """Coerce ints/Fractions (or an existing GaussianRational) to Q(i)."""
    if type(re) is GaussianRational:
        if im:
            raise TypeError("cannot add an imaginary part to a GaussianRational")
        return re
    return GaussianRational(Fraction(re), Fraction(im))


GR_ZERO = GaussianRational(_F0, _F0)
GR_ONE = GaussianRational(_F1, _F0)
GR_I = GaussianRational(_F0, _F1)


def _scan_term(s: str, i: int, where: str):
    # -> (Fraction magnitude, next position, imaginary flag)
    if i < len(s) and s[i] == "i":
        return _F1, i + 1, True
    neg = False
    if i < len(s) and s[i] == "-":
        neg = True
        i += 1
    d0 = i
    while i < len(s) and "0" <= s[i] <= "9":
        i += 1
    if i == d0:
        raise FormatError(f"expected digits in {where}", offset=i)
    num = int(s[d0:i])
    den = 1
    if i < len(s) and s[i] == "/":
        i += 1
        d1 = i
        while i < len(s) and "0" <= s[i] <= "9":
            i += 1
        if i == d1:
            raise FormatError(f"expected digits after '/' in {where}", offset=i)
        den = int(s[d1:i])
        if den == 0:
            raise FormatError(f"zero denominator in {where}", offset=d1)
    v = Fraction(num, den)
    if neg:
        v = -v
    if i < len(s) and s[i] == "i":
        return v, i + 1, True
    return v, i, False


def parse_value(s: str, where: str = "value") -> GaussianRational:
    """Parse one scalar written in the value grammar."""
    if not isinstance(s, str):
        raise FormatError(f"{where} must be a string, got {type(s).__name__}")
    if not s:
        raise FormatError(f"empty {where}", offset=0)
    re_ = _F0
    im_ = _F0
    v, pos, is_im = _scan_term(s, 0, where)
    if is_im:
        im_ += v
    else:
        re_ += v
    if pos < len(s):
        sep = s[pos]
        if sep not in "+-":
            raise FormatError(f"unexpected character {s[pos]!r} in {where}", offset=pos)
        v2, pos, is_im2 = _scan_term(s, pos + 1, where)
        if sep == "-":
            v2 = -v2
        if is_im2:
            im_ += v2
        else:
            re_ += v2
    if pos != len(s):
        raise FormatError(f"trailing characters in {where}", offset=pos)
    return GaussianRational(re_, im_)


def _fmt_im(mag: Fraction) -> str:
    # magnitude must be positive
    return "i" if mag == 1 else f"{mag}i"


def format_value(g: GaussianRational) -> str:
    """Canonical value-grammar spelling; parse_value(format_value(g)) == g."""
    re_, im_ = g.re, g.im
    if not re_ and not im_:
        return "0"
    if not im_:
        return str(re_)
    if not re_:
        # a lone negative imaginary term cannot drop its 1: "-i" is not legal
        return _fmt_im(im_) if im_ > 0 else f"-{im_ * -1}i"
    if im_ > 0:
        return f"{re_}+{_fmt_im(im_)}"
    return f"{re_}-{_fmt_im(-im_)}"
