class EhviKitError(ValueError):
    """Base class for every error raised by ehvikit."""


class DimensionMismatchError(EhviKitError):
    pass


class EmptyInputError(EhviKitError):
    pass


class ReferencePointError(EhviKitError):
    pass


class FrontFileError(EhviKitError):
    pass


class SurrogateError(EhviKitError):
    pass


class ProblemEvaluationError(EhviKitError):
    """Raised when a true objective evaluation fails during a MOBGO run.

    The partial archive and HV history collected so far travel with the error.
    """

    def __init__(self, message: str, archive=None, history=None):
        super().__init__(message)
        self.archive = archive
        self.history = history if history is not None else []
