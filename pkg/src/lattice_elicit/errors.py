"""Exception types shared across the elicitation engine."""

from __future__ import annotations


class ElicitError(Exception):
    """Base class for all engine errors."""


class LatticeParseError(ElicitError):
    """The lattice document is not syntactically valid JSON."""


class LatticeSchemaError(ElicitError):
    """The lattice document violates the file schema or a structural invariant.

    Carries the individual findings so callers can report them all at once.
    """

    def __init__(self, message: str, errors: tuple = ()):
        super().__init__(message)
        self.errors = tuple(errors)


class LatticeTooLargeError(ElicitError):
    """The lattice exceeds the exhaustive-enumeration cap."""


class ProposalParseError(ElicitError):
    """No usable selection JSON could be extracted from backend output."""


class TransportError(ElicitError):
    """The interpreter backend could not be reached or failed mid-call."""


class InvalidSelectionError(ElicitError):
    """A selection that should already be valid failed validation (engine bug)."""


class CheckpointError(ElicitError):
    """An audit/checkpoint stream is unusable (no complete record survives)."""
