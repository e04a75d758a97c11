"""Error hierarchy shared across the package.

The CLI maps these onto exit codes: SchemaError -> 2, DataError -> 3,
InternalError -> 4.
"""


class GraphfeatError(Exception):
    """Base class for all package errors."""


class SchemaError(GraphfeatError):
    """Schema or configuration is malformed or violates an invariant."""


class DataError(GraphfeatError):
    """Input data cannot be ingested or is inconsistent with its schema."""


class InternalError(GraphfeatError):
    """An internal consistency check failed; indicates a bug, not bad input."""
