"""Exception types shared across the package.

I/O failures are reported with the native OSError family; everything that is a
problem with the *content* of an input gets one of the classes below.
"""


class DigestWeaverError(Exception):
    """Base class for content-level errors raised by this package."""


class SchemaError(DigestWeaverError):
    """A document does not match its expected schema."""


class DuplicateRankError(SchemaError):
    """Two result entries share the same rank."""


class EmptyQueryError(SchemaError):
    """The result list query is empty after trimming."""


class NotFetchedError(DigestWeaverError):
    """An operation that needs page bytes was handed a skipped page."""


class NoTokensError(DigestWeaverError):
    """A template contains no segment tokens."""


class StoreCorruptError(DigestWeaverError):
    """The profile store file exists but cannot be parsed."""
