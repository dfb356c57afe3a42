"""Shared error base for the annotation suite.

Every library error derives from :class:`AnnotatorError` and carries a
stable ``code`` string used by the HTTP service in error payloads.
"""


class AnnotatorError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"
