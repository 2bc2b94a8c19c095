"""Exception hierarchy shared by every trpnet module.

Each leaf class carries the process exit code the CLI maps it to.
"""


class TrpnetError(Exception):
    exit_code = 1


class ParseError(TrpnetError):
    """Malformed structure or unit-cell input."""

    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(ParseError):
    pass


class EmptyResultError(ParseError):
    pass


class ExtractionError(TrpnetError):
    exit_code = 3


class GeometryError(ExtractionError):
    pass


class LookupFailure(ExtractionError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DomainError(TrpnetError, ValueError):
    exit_code = 4


class CapacityError(DomainError):
    def __init__(self, required, limit):
        super().__init__(
            f"lattice needs N={required} sites but the dense capacity limit is {limit}"
            " (raise it with SIM_MAX_N)"
        )
        self.required = required
        self.limit = limit


class SingularityError(DomainError):
    def __init__(self, m, n):
        super().__init__(f"dipoles {m} and {n} share a position; couplings are singular")
        self.pair = (m, n)


class NumericalError(TrpnetError, ArithmeticError):
    exit_code = 5

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class QuasiDegeneracyError(NumericalError):
    def __init__(self, cluster):
        cluster = list(cluster)
        super().__init__(
            f"eigenvectors {cluster} have vanishing c-norm (near-defective cluster)",
            index=cluster[0] if cluster else None,
        )
        self.cluster = cluster
