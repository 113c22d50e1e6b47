"""Evaluation harness: endpoint protocol, labeling, report generation."""

from .classify import (  # noqa: F401
    ALL_LABELS,
    LEGAL_LABELS,
    Classification,
    classify,
    extract_move,
)
from .evaluate import (  # noqa: F401
    EvalConfig,
    EvalInstance,
    EvalRecord,
    MetricsReport,
    evaluate,
    load_eval_dataset,
    sweep_temperature,
)
from .protocol import (  # noqa: F401
    Endpoint,
    GenRequest,
    HttpEndpoint,
    InProcessEndpoint,
    SubprocessEndpoint,
    check_conformance,
    client_hello,
    make_endpoint,
    serve_stdio,
)
