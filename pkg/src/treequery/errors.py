"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Raised for unknown node ids, infeasible parameters and malformed input."""


class UnsupportedQuery(ValueError):
    """A relative-distance query with no unique closest pair (non-binary star)."""


class OracleInconsistency(RuntimeError):
    """The answers seen so far contradict every rooted tree.

    The oracle is exact, so this signals a bug rather than noise. ``transcript``
    carries the ledger dump when one was available.
    """

    def __init__(self, message: str, transcript: str | None = None):
        super().__init__(message)
        self.transcript = transcript


class ProtocolError(RuntimeError):
    """A scheduler task broke the submit/await protocol."""


class NewickError(InvalidArgument):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset
