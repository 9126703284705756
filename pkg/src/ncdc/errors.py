"""Exception types shared across the package."""


class NcdcError(Exception):
    """Base class for all structured engine errors."""


class DimensionMismatch(NcdcError):
    """Operands were built over different (n, m) generator counts."""


class OrderError(NcdcError):
    """A result was asked for at higher precision than its inputs carry."""


class ParityError(NcdcError):
    """An operation requiring homogeneous parity received a mixed element."""


class PreconditionError(NcdcError):
    """A documented precondition of an operation does not hold."""


class StructureError(NcdcError):
    """Structure-constant data is invalid or internally inconsistent."""


class FormatError(NcdcError):
    """Malformed input text.  Carries position info where available."""

    def __init__(self, message, *, path=None, offset=None, line=None, col=None):
        self.message = message
        self.path = path
        self.offset = offset
        self.line = line
        self.col = col
        super().__init__(str(self))

    def __str__(self):
        s = self.message
        if self.path:
            s = f"{self.path}: {s}"
        loc = []
        if self.line is not None:
            loc.append(f"line {self.line}")
        if self.col is not None:
            loc.append(f"column {self.col}")
        if self.offset is not None:
            loc.append(f"offset {self.offset}")
        if loc:
            s += " (" + ", ".join(loc) + ")"
        return s
