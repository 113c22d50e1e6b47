"""Error hierarchy for the bridge.

Everything the bridge raises deliberately derives from BridgeError so the
CLI can catch one type.  GenerationTimeout is special-cased by the server:
it becomes a response row with empty text and an error flag instead of a
bare error row.
"""


class BridgeError(Exception):
    """Base class for bridge failures."""


class ModelLoadError(BridgeError):
    """The model id/path could not be resolved to a working model."""


class DataContractError(BridgeError):
    """A cohort file does not follow the builder's JSON contract."""


class GenerationTimeout(BridgeError):
    """A generation exceeded its wall-clock budget."""
