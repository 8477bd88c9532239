"""Exceptions raised by repcoh."""


class RepcohError(Exception):
    """Base class; every user-facing failure derives from it."""


class InputError(RepcohError):
    """Bad input. The CLI maps these to exit code 2."""


class PosetSyntaxError(InputError):
    def __init__(self, lineno: int, msg: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}")


class CyclicInput(InputError):
    pass


class DuplicateElement(InputError):
    pass


class UnknownName(InputError):
    pass


class UnknownFamily(InputError):
    pass


class BadParams(InputError):
    pass


class IndexOutOfRange(RepcohError, IndexError):
    pass


class DegeneracyOnSemiSimplicial(RepcohError):
    pass


class TruncationExceeded(RepcohError):
    pass


class IntervalExplosion(RepcohError):
    def __init__(self, cap: int, where: str = ""):
        self.cap = cap
        super().__init__(f"more than {cap} intervals{' in ' + where if where else ''}")


class ConvexityViolation(RepcohError):
    """Internal audit failure. Seeing this means there is a bug."""


class OrderViolation(RepcohError):
    """Internal audit failure: a level relation is not a partial order or a map is not monotone."""
