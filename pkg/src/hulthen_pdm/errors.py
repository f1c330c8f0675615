"""Exception hierarchy shared by the library and the CLI."""


class PDMError(Exception):
    """Base class for every error raised by hulthen_pdm."""


class ParameterError(PDMError, ValueError):
    """Invalid model, grid or polynomial parameters."""


class DomainError(PDMError, ValueError):
    """A coordinate lies outside the region where the mass is positive."""

    def __init__(self, message, singular_x=None):
        super().__init__(message)
        self.singular_x = singular_x


class ComplexParameterError(PDMError):
    """A square-root argument of the closed-form spectrum is negative.

    ``quantity`` names the offending combination (``"mu_sq"`` or
    ``"1+4*gamma"``) and ``value`` carries its numerical value.
    """

    def __init__(self, quantity, value):
        super().__init__(f"{quantity} = {value:.9g} < 0: spectrum is not real")
        self.quantity = quantity
        self.value = value


class NoRealBranchError(PDMError):
    """The perfect-square condition has no real solution k."""


class UnsupportedSigmaError(PDMError):
    """sigma(s) is not constant, linear, or quadratic with two real roots."""


class UnphysicalStateError(PDMError):
    """A bound state fails the exponent or normalizability conditions."""


class RegimeError(PDMError):
    """Requested operation is not available in the q > 0 half-line regime."""


class NonConvergenceError(PDMError):
    """Composite quadrature hit its panel cap without converging."""

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class OracleNonConvergence(PDMError):
    """The finite-difference study failed to settle; ``table`` holds the rows."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


class QuantumNumberError(ParameterError):
    """Requested level n does not exist for these parameters."""
