"""Exception hierarchy shared by the workbench."""


class EDSError(Exception):
    """Base class for all workbench errors."""


class DeclarationMismatch(EDSError):
    """Two operands live over different coframe declarations."""


class IncompleteRules(EDSError):
    def __init__(self, symbol):
        super().__init__(f"no structure rule for {symbol!r}")
        self.symbol = symbol


class MissingAssignment(EDSError):
    def __init__(self, name):
        super().__init__(f"no value assigned to variable {name!r}")
        self.name = name


class DegenerateIdeal(EDSError):
    """Ideal generators are linearly dependent (symbolically or at a point)."""


class NonUnitPivot(EDSError):
    """Row reduction of 1-forms needs a pivot with constant coefficient."""


class UnsupportedSystem(EDSError):
    """System lies outside the linear Pfaffian setting handled here."""


class NoIntegralElement(EDSError):
    def __init__(self, residual):
        super().__init__(f"torsion does not vanish: {residual}")
        self.residual = residual


class MustRestrictFirst(EDSError):
    """Prolongation requested while the torsion class is nonzero."""


class InvalidRestriction(EDSError):
    """The supplied point does not lie on the torsion zero locus."""


class GenericityFailure(EDSError):
    """Random flags were not generic enough to satisfy Cartan's inequality."""


class SingularIntegrand(EDSError):
    """Weierstrass integrand blows up along an integration path."""


class DegenerateMetric(EDSError):
    """First fundamental form is singular at the sample point."""


class UnsupportedFormat(EDSError):
    pass


class EmptyGrid(EDSError):
    pass


class ParseError(EDSError):
    """DSL diagnostic with a kind and a 1-based source location."""

    KINDS = ("syntax", "unknown-symbol", "duplicate-declaration", "degree-mismatch",
             "incomplete-rules", "tag-mismatch")

    def __init__(self, kind, message, line=1, col=1):
        super().__init__(f"{line}:{col}: {kind}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col
