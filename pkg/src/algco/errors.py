"""Exception and warning types shared across the package."""


class AlgcoError(Exception):
    pass


class SubspaceNotContained(AlgcoError):
    pass


class DimensionMismatch(AlgcoError, ValueError):
    pass


class InvalidRepresentation(AlgcoError):
    pass


class InvalidMorphism(AlgcoError):
    pass


class FlatnessViolated(AlgcoError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or []


class NotGaugeEquivalent(AlgcoError):
    pass


class NotAComplex(AlgcoError):
    pass


class LiftFailure(AlgcoError):
    pass


class NotExact(AlgcoError):
    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class SchemaError(AlgcoError, ValueError):
    """Input file does not match its JSON schema."""


class DegreeOverflow(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass
