"""Exception hierarchy.

Every domain error carries a stable machine-readable ``code`` which the CLI
prints verbatim. ``MalformedInput`` is the one error that maps to exit
status 2; everything else is a domain error (exit status 1).
"""


class MatchBraessError(Exception):
    code = "ERROR"


class MalformedInput(MatchBraessError):
    code = "MALFORMED_INPUT"


class UnknownClass(MatchBraessError):
    code = "UNKNOWN_CLASS"


class SelfLoop(MatchBraessError):
    code = "SELF_LOOP"


class EdgeExists(MatchBraessError):
    code = "EDGE_EXISTS"


class BadDistribution(MatchBraessError):
    code = "BAD_DISTRIBUTION"


class DeltaOutOfDomain(MatchBraessError):
    code = "DELTA_OUT_OF_DOMAIN"


class Unstable(MatchBraessError):
    """The stability condition fails, so stationary sums diverge."""

    code = "UNSTABILIZABLE"

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class UnstableOnDomain(Unstable):
    code = "UNSTABLE_ON_DOMAIN"


class NotAffine(MatchBraessError):
    code = "NOT_AFFINE"


class InvalidWord(MatchBraessError):
    code = "INVALID_WORD"


class StateSpaceTooLarge(MatchBraessError):
    code = "STATE_SPACE_TOO_LARGE"


class EmptyGrid(MatchBraessError):
    code = "EMPTY_GRID"


class LabelCollision(MatchBraessError):
    code = "LABEL_COLLISION"


class BadSplit(MatchBraessError):
    code = "BAD_SPLIT"


class NeighborhoodMismatch(MatchBraessError):
    code = "NEIGHBORHOOD_MISMATCH"


class Adjacent(MatchBraessError):
    code = "ADJACENT"


class ModelsUnrelated(MatchBraessError):
    code = "MODELS_UNRELATED"


class TargetIsEndpoint(MatchBraessError):
    code = "TARGET_IS_ENDPOINT"


class NoParadoxAtDelta(MatchBraessError):
    code = "NO_PARADOX_AT_DELTA"
