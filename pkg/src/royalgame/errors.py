"""Exception types shared across the package.

Every error raised by the public API derives from RoyalgameError so callers
can catch one base.  Parse-time errors carry the offending token/text, state
errors carry the name of the broken invariant.
"""

from __future__ import annotations


class RoyalgameError(Exception):
    """Base class for all royalgame errors."""


# --- rules ---------------------------------------------------------------


class InvalidStateError(RoyalgameError):
    """A GameState violates a structural invariant.

    ``invariant`` is a stable machine-readable name, e.g. "one-king-per-color"
    or "side-not-to-move-in-check".
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class IllegalMoveError(RoyalgameError):
    """Move is not legal in the given state."""


# --- notation ------------------------------------------------------------


class NotationError(RoyalgameError):
    """Base for SAN / FEN / square-list parse errors."""

    def __init__(self, token: str, message: str = ""):
        self.token = token
        super().__init__(message or token)


class UnparseableTokenError(NotationError):
    """Token does not match the move grammar at all."""


class AmbiguousTokenError(NotationError):
    """Token matches two or more legal moves."""


class NoMatchingLegalMoveError(NotationError):
    """Token is well-formed but matches no legal move."""


class PieceAbsentError(NotationError):
    """Token names a piece kind the moving side does not have on the board."""


class MalformedFenError(NotationError):
    """FEN text is syntactically broken."""


class BadPairSyntaxError(NotationError):
    """A square-list entry is not of the form ``e4:P``."""


class DuplicateSquareError(NotationError):
    """A square occurs twice in a square list."""


# --- datasets / puzzles ---------------------------------------------------


class InsufficientPoolError(RoyalgameError):
    """Pair pool is smaller than the requested cohort plus test split."""


class SeedMissingError(RoyalgameError):
    """A cohort spec without an explicit seed was asked to sample."""


class UnsolvableInstanceError(RoyalgameError):
    """A puzzle board admits neither a mating nor a checking move."""


class GenerationExhaustedError(RoyalgameError):
    """Random search budget ran out before enough puzzles were found."""


# --- harness / endpoints ---------------------------------------------------


class ProtocolViolationError(RoyalgameError):
    """Endpoint broke the NDJSON request/response contract."""


class EndpointTimeoutError(RoyalgameError):
    """Endpoint failed to answer within the configured timeout."""


class NoLegalMovesError(RoyalgameError):
    """A policy was asked to move on a board with no legal moves."""


class EmptyTableError(RoyalgameError):
    """Frequency policy was built from an empty pair table."""
