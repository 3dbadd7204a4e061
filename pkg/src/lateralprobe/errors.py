"""Exception hierarchy shared across the pipeline.

Every error carries a stable ``code`` string; the HTTP layer and the CLI
surface these codes verbatim so callers can branch on them.
"""


class LateralProbeError(Exception):
    """Base class for all errors raised by this package."""

    code = "internal-error"


class EmptyInputError(LateralProbeError):
    code = "empty-input"


class InputTooLongError(LateralProbeError):
    code = "input-too-long"

    def __init__(self, word_count: int, limit: int):
        super().__init__(f"input has {word_count} words, limit is {limit}")
        self.word_count = word_count
        self.limit = limit


class MalformedLlmOutputError(LateralProbeError):
    """The model response could not be parsed into the expected shape."""

    code = "malformed-llm-output"


class EmptyContextError(LateralProbeError):
    """No document produced any retrievable segment for a question."""

    code = "empty-context"


class ProviderUnreachableError(LateralProbeError):
    """Transient provider failure; retried once before surfacing."""

    code = "provider-unavailable"


class ProviderRefusedError(LateralProbeError):
    """Non-retryable provider rejection (bad credentials, policy refusal)."""

    code = "provider-refused"


class DimensionMismatchError(LateralProbeError):
    code = "dimension-mismatch"


class ZeroVectorError(LateralProbeError):
    code = "zero-vector"


class FetchFailedError(LateralProbeError):
    """Page fetch failed: timeout, bad status, wrong type, or oversize body."""

    code = "fetch-failed"


class EmptyContentError(LateralProbeError):
    """A fetched page yielded no extractable text."""

    code = "empty-content"


class StorageUnavailableError(LateralProbeError):
    code = "storage-unavailable"


class FixtureError(LateralProbeError):
    """The mock fixture file is missing, malformed, or exhausted."""

    code = "fixture-invalid"
