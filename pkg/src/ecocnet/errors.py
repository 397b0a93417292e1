"""Exception hierarchy.

Every error carries a short machine-readable ``category`` and the process
exit code the command-line harness uses when it escapes a subcommand.
"""


class EcocError(Exception):
    category = "error"
    exit_code = 2


class UsageError(EcocError, ValueError):
    category = "usage-error"
    exit_code = 1


class InvalidClassCount(UsageError):
    category = "invalid-class-count"


class UnsupportedSize(UsageError):
    category = "unsupported-size"


class InvalidLabel(UsageError):
    category = "invalid-label"


class InvalidDimension(UsageError):
    category = "invalid-dimension"


class InvalidMatrix(EcocError, ValueError):
    category = "invalid-matrix"


class ParseError(EcocError, ValueError):
    category = "parse-error"


class EmptyInput(EcocError, ValueError):
    category = "empty-input"


class InsufficientData(EcocError, ValueError):
    category = "insufficient-data"


class InconsistentImages(EcocError, ValueError):
    category = "inconsistent-images"


class GenerationFailed(EcocError, RuntimeError):
    category = "generation-failed"
    exit_code = 3


class RankDeficient(EcocError, ArithmeticError):
    """Requested more principal components than the data supports."""

    category = "rank-deficient"
    exit_code = 3

    def __init__(self, message, achievable_k):
        super().__init__(message)
        self.achievable_k = achievable_k


class TrainingDiverged(EcocError, ArithmeticError):
    """A cost became non-finite during training.

    ``last_finite_epoch`` is the last epoch (0-based) whose recorded costs were
    finite, or -1 if the very first epoch already diverged.
    """

    category = "training-diverged"
    exit_code = 3

    def __init__(self, message, last_finite_epoch):
        super().__init__(message)
        self.last_finite_epoch = last_finite_epoch
