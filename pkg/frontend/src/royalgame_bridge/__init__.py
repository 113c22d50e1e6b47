"""Bridge causal language models onto the royalgame wire protocol.

Separate from the engine/harness package on purpose: the bridge talks to
it only through the NDJSON protocol and the cohort file formats, and the
primary package never imports this one.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    BridgeError,
    DataContractError,
    GenerationTimeout,
    ModelLoadError,
)
from .settings import GenerationSettings, TuningSettings  # noqa: F401

__all__ = [
    "BridgeError",
    "BridgeServer",
    "DataContractError",
    "GenerationSettings",
    "GenerationTimeout",
    "ModelLoadError",
    "TuningSettings",
    "build_tiny_model",
    "finetune",
    "load_model",
    "serve_stdio",
]


def __getattr__(name):
    # Lazy re-exports: importing the package must stay cheap (no torch)
    # until a model-touching symbol is actually used.
    if name in ("BridgeServer", "serve_stdio"):
        from . import serve

        return getattr(serve, name)
    if name == "finetune":
        from .finetune import finetune

        return finetune
    if name in ("build_tiny_model", "load_model"):
        from . import modeling

        return getattr(modeling, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
