"""Protocol server: one loaded model behind the NDJSON wire contract.

The server declares "applies_template": true in its hello, so a conformant
harness sends bare instructions and the bridge renders the template.  A
client that sends an already-rendered prompt (the conformance prober does)
is detected by the template preamble and not double-wrapped.

One generation runs at a time per instance; parallel eval is achieved by
launching more instances.  The harness owns retry logic — the server is
stateless across requests and simply honors the per-request temperature
and sample overrides retries rely on.
"""

from __future__ import annotations

import json
import logging
import sys
import threading
from typing import Dict, IO, Optional

from . import __version__
from .errors import BridgeError, GenerationTimeout
from .modeling import LoadedModel, load_model
from .settings import GenerationSettings
from .template import (
    RULE_END_OF_TEXT,
    is_rendered,
    render_prompt,
    truncate_response,
)

log = logging.getLogger("royalgame_bridge")

WIRE_PROTOCOL = 1

# Extra wall-clock grace on top of the decoder's own max_time budget before
# a generation is declared wedged.
TIMEOUT_GRACE = 2.0

# Never answer empty text on the wire: an empty reply is a protocol smell,
# and "?" is not parseable as a move so it cannot inflate any metric.
EMPTY_FALLBACK = "?"


class BridgeServer:
    def __init__(
        self,
        model_id: str,
        settings: Optional[GenerationSettings] = None,
        name: str = "bridge",
    ):
        self.settings = settings or GenerationSettings()
        self.name = name
        self.loaded: LoadedModel = load_model(model_id)
        self._busy = threading.Lock()  # one generation at a time per instance

    # -- protocol ---------------------------------------------------------

    def hello(self) -> Dict:
        return {
            "name": self.name,
            "version": __version__,
            "protocol": WIRE_PROTOCOL,
            "applies_template": True,
            "capacity": 1,
            "model": self.loaded.model_id,
            "family": self.loaded.family,
            "truncation": self.loaded.rule,
        }

    def handle(self, request: Dict) -> Dict:
        rid = request.get("id")
        try:
            prompt = request.get("prompt")
            if not isinstance(prompt, str) or not prompt:
                raise BridgeError("request has no string 'prompt'")
            text = self.generate_text(
                prompt,
                temperature=request.get("temperature"),
                sample=request.get("sample"),
            )
            return {"id": rid, "text": text}
        except GenerationTimeout as exc:
            log.warning("generation timed out for request %r: %s", rid, exc)
            return {"id": rid, "text": "", "error": "generation-timeout"}
        except Exception as exc:  # noqa: BLE001 - the server must not die
            return {"id": rid, "error": f"{type(exc).__name__}: {exc}"}

    # -- generation -------------------------------------------------------

    def model_input(self, prompt: str) -> str:
        """Render the template unless the client already did.

        End-of-text-family models additionally get their delimiter inserted
        after the prompt: it is the response separator their truncation
        rule cuts at.
        """
        body = prompt if is_rendered(prompt) else render_prompt(prompt)
        if self.loaded.rule == RULE_END_OF_TEXT:
            return body + self.loaded.marker
        return body

    def generate_text(
        self,
        prompt: str,
        temperature: Optional[float] = None,
        sample: Optional[bool] = None,
    ) -> str:
        with self._busy:
            tokenizer = self.loaded.tokenizer
            encoded = tokenizer(self.model_input(prompt), return_tensors="pt")
            kwargs = self.settings.to_generation_kwargs(
                temperature=temperature, sample=sample
            )
            kwargs["pad_token_id"] = (
                tokenizer.pad_token_id
                if tokenizer.pad_token_id is not None
                else tokenizer.eos_token_id
            )
            output = self._bounded_generate(dict(encoded), kwargs)
            skip_special = self.loaded.rule != RULE_END_OF_TEXT
            full = tokenizer.decode(output[0], skip_special_tokens=skip_special)
            text = truncate_response(
                full, self.loaded.rule, self.loaded.marker, pad_token=self.loaded.pad_token
            )
            if not text:
                log.debug("empty generation; answering %r", EMPTY_FALLBACK)
                text = EMPTY_FALLBACK
            return text

    def _bounded_generate(self, inputs: Dict, kwargs: Dict):
        """Run generate() under a hard wall-clock budget.

        The decoder already respects max_time and stops gracefully; the
        thread guard only catches a truly wedged generation, which becomes
        a GenerationTimeout.
        """
        import torch

        budget = self.settings.max_generation_seconds + TIMEOUT_GRACE
        result: Dict = {}

        def work():
            try:
                with torch.no_grad():
                    result["out"] = self.loaded.model.generate(**inputs, **kwargs)
            except Exception as exc:  # noqa: BLE001 - reported on the main thread
                result["exc"] = exc

        worker = threading.Thread(target=work, daemon=True)
        worker.start()
        worker.join(budget)
        if worker.is_alive():
            raise GenerationTimeout(f"no output within {budget:.1f}s")
        if "exc" in result:
            raise result["exc"]
        return result["out"]


def serve_stdio(
    server: BridgeServer,
    stdin: Optional[IO] = None,
    stdout: Optional[IO] = None,
) -> int:
    """Answer NDJSON requests until EOF; returns the number served.

    Mirrors the harness contract: the client speaks first with a hello
    object, the server answers with its own, then one response row per
    request line.  Malformed lines get an error row and the loop goes on.
    """
    fin = stdin if stdin is not None else sys.stdin
    fout = stdout if stdout is not None else sys.stdout

    def emit(obj: Dict) -> None:
        fout.write(json.dumps(obj) + "\n")
        fout.flush()

    first = fin.readline()
    if not first:
        return 0
    try:
        opening = json.loads(first)
    except json.JSONDecodeError:
        opening = None
    if not isinstance(opening, dict) or "hello" not in opening:
        emit({"error": "first line must be a hello object"})
        return 0
    emit({"hello": server.hello()})

    served = 0
    for line in fin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            emit({"error": "bad JSON request"})
            continue
        emit(server.handle(request))
        served += 1
    return served
