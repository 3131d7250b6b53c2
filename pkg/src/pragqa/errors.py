"""Exception types shared across the package."""


class PragqaError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------- backends

class NetworkError(PragqaError):
    """Endpoint unreachable after all retries."""


class RateLimited(PragqaError):
    """Persistent 429-class response after all retries."""


class MalformedResponse(PragqaError):
    """Backend replied, but the reply is missing the expected fields."""


class DimensionMismatch(PragqaError):
    """Embedding vectors of unequal length where one dimension is required."""


# ---------------------------------------------------------------- corpus / dataset

class EmptyDocument(PragqaError):
    """Document text tokenizes to zero tokens."""


class IoError(PragqaError):
    """Underlying file read/write failed."""


class CorruptRecord(PragqaError):
    """A line in a record file failed schema validation."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class SchemaError(PragqaError):
    """A dataset record carries an invalid field value."""


# ---------------------------------------------------------------- rerank / pipeline

class EmptyPool(PragqaError):
    """Rerank called with an empty candidate pool."""


class CorpusExhausted(PragqaError):
    """The corpus cannot supply the required number of distinct passages."""


# ---------------------------------------------------------------- inference

class ParseError(PragqaError):
    """No inference list could be parsed out of a completion."""


# ---------------------------------------------------------------- evalkit

class EmptyReference(PragqaError):
    """Reference text tokenizes to nothing."""


class DegenerateLabels(PragqaError):
    """Agreement is undefined because expected agreement is 1."""


class ConstantInput(PragqaError):
    """Rank correlation is undefined for a constant sequence."""


class StageFailure(PragqaError):
    """A pipeline stage failed because of a backend error.

    Carries the stage name so callers (e.g. the HTTP service) can report
    which part of the pipeline broke.
    """

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
