"""Exception hierarchy shared by every catlab module."""


class CatlabError(Exception):
    """Base class for all errors raised by catlab."""


class DomainError(CatlabError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConvergenceError(CatlabError, ArithmeticError):
    """A series, iteration or quadrature failed to reach its tolerance."""


class BracketError(CatlabError, ArithmeticError):
    """No sign change could be located for a root that should exist."""


class InvariantError(CatlabError, ArithmeticError):
    """A computed object violates one of its defining invariants."""
