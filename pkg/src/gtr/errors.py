"""Exception hierarchy shared by all gtr modules."""

from __future__ import annotations


class GtrError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(GtrError):
    """A configuration value violates its documented constraints."""


class InvalidInput(GtrError):
    """An argument violates a documented precondition."""


class EmptyText(GtrError):
    """Text that must carry content is empty or whitespace-only."""


class BackendUnavailable(GtrError):
    """A remote embedding or completion backend could not be reached
    or returned a malformed response (after retries, where applicable)."""


class DimensionMismatch(GtrError):
    """Vector dimensionalities disagree."""


class ZeroVector(GtrError):
    """Cosine similarity is undefined for a zero-norm vector."""


class DuplicateId(GtrError):
    """A record or document id was seen twice."""


class CorruptStore(GtrError):
    """A store file failed validation; the message names the line."""


class MalformedPrompt(GtrError):
    """A mock backend could not find its expected prompt structure."""


class EmptyContext(GtrError):
    """Prompt composition requires at least one context chunk."""


class EmptySelection(GtrError):
    """SQL prompt composition requires at least one table."""


class EmptyGeneration(GtrError):
    """Nothing remained of a completion after stripping."""


class FingerprintMismatch(GtrError):
    """The store was built with a different embedder configuration."""


class DbUnreadable(GtrError):
    """The database file is missing or not a readable database."""


class SqlError(GtrError):
    """The database engine rejected a statement; message is the engine's."""


class NonReadStatement(GtrError):
    """Only SELECT-class statements may be executed."""


class QueryTimeout(GtrError):
    """Statement execution exceeded its time budget."""


class EvalError(GtrError):
    """A gold query failed to execute (a dataset defect, not a model one)."""


class ParseError(GtrError):
    """SQL text could not be parsed.

    Attributes:
        offset: byte offset into the UTF-8 encoding of the input.
        expected: token descriptions that would have been accepted.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += " (expected " + " | ".join(self.expected) + ")"
        super().__init__(detail)


class StageError(GtrError):
    """A tabular-answer stage failed.

    Attributes:
        stage: name of the failing stage.
        trace: the partial trace accumulated before the failure.
    """

    def __init__(self, stage: str, cause: Exception, trace=None):
        self.stage = stage
        self.trace = trace
        super().__init__(f"{stage}: {cause}")
