"""NDJSON request/response protocol between the harness and move endpoints.

One JSON object per line.  The client opens with {"hello": {...}} and the
server answers in kind before any requests flow.  Requests carry an id the
response must echo:

    {"id": "r0001#1", "prompt": "...", "temperature": 1.0, "sample": false}
    {"id": "r0001#1", "text": "Rg3"}

A server hello may declare "capacity" (max requests in flight, default 1)
and "applies_template": true when the endpoint wants bare instructions and
renders the prompt template itself.  Transports: in-process callables,
subprocess pipes ("cmd:..." specs) and plain HTTP POST ("http(s)://...").
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
import urllib.error
import urllib.request
from dataclasses import asdict, dataclass
from typing import Callable, Dict, IO, List, Optional

from .. import PROTOCOL_VERSION, __version__
from ..errors import EndpointTimeoutError, ProtocolViolationError

DEFAULT_TIMEOUT = 10.0


@dataclass
class GenRequest:
    id: str
    prompt: str
    temperature: float = 1.0
    sample: bool = False

    def to_wire(self) -> Dict:
        return asdict(self)


def client_hello() -> Dict:
    return {
        "hello": {
            "name": "royalgame-harness",
            "version": __version__,
            "protocol": PROTOCOL_VERSION,
            "templated": True,  # prompts arrive fully rendered unless told otherwise
        }
    }


def _check_server_hello(obj: Dict) -> Dict:
    hello = obj.get("hello") if isinstance(obj, dict) else None
    if not isinstance(hello, dict):
        raise ProtocolViolationError(f"expected a hello object, got {obj!r}")
    for key in ("name", "version"):
        if not isinstance(hello.get(key), str):
            raise ProtocolViolationError(f"hello is missing a string {key!r}")
    return hello


class Endpoint:
    """Minimal interface every transport implements."""

    server_hello: Dict
    spec: str

    def generate(self, request: GenRequest) -> str:
        raise NotImplementedError

    def close(self) -> None:
        pass

    @property
    def applies_template(self) -> bool:
        return bool(self.server_hello.get("applies_template", False))

    @property
    def capacity(self) -> int:
        cap = self.server_hello.get("capacity", 1)
        return cap if isinstance(cap, int) and cap > 0 else 1

    def _check_response(self, obj: Dict, request_id: str) -> str:
        if not isinstance(obj, dict):
            raise ProtocolViolationError(f"response is not an object: {obj!r}")
        if obj.get("id") != request_id:
            raise ProtocolViolationError(
                f"response id {obj.get('id')!r} does not match request {request_id!r}"
            )
        if "error" in obj:
            raise ProtocolViolationError(f"endpoint error: {obj['error']}")
        text = obj.get("text")
        if not isinstance(text, str):
            raise ProtocolViolationError("response has no string 'text' field")
        return text


class InProcessEndpoint(Endpoint):
    """Wraps a callable(request dict) -> text; used by baselines and tests."""

    def __init__(self, fn: Callable[[Dict], str], name: str = "in-process", hello_extra: Optional[Dict] = None):
        self.fn = fn
        self.spec = f"python:{name}"
        self.server_hello = {"name": name, "version": __version__, "protocol": PROTOCOL_VERSION}
        if hello_extra:
            self.server_hello.update(hello_extra)

    def generate(self, request: GenRequest) -> str:
        obj = self.fn(request.to_wire())
        if isinstance(obj, str):  # bare text convenience
            obj = {"id": request.id, "text": obj}
        return self._check_response(obj, request.id)


class SubprocessEndpoint(Endpoint):
    """Speaks the protocol over a child process's stdin/stdout."""

    def __init__(self, command: str, timeout: float = DEFAULT_TIMEOUT):
        self.spec = f"cmd:{command}"
        self.timeout = timeout
        self.proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._lock = threading.Lock()
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._send(client_hello())
        self.server_hello = _check_server_hello(self._recv())

    def _pump(self):
        try:
            for line in self.proc.stdout:
                self._lines.put(line)
        finally:
            self._lines.put(None)

    def _send(self, obj: Dict) -> None:
        try:
            self.proc.stdin.write(json.dumps(obj) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise ProtocolViolationError(f"endpoint pipe closed: {exc}") from None

    def _recv(self) -> Dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise EndpointTimeoutError(
                f"no response within {self.timeout}s from {self.spec}"
            ) from None
        if line is None:
            raise ProtocolViolationError("endpoint closed its output stream")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolViolationError(f"bad JSON from endpoint: {exc}") from None

    def generate(self, request: GenRequest) -> str:
        with self._lock:
            self._send(request.to_wire())
            return self._check_response(self._recv(), request.id)

    def close(self) -> None:
        try:
            if self.proc.stdin:
                self.proc.stdin.close()
            self.proc.wait(timeout=5)
        except Exception:
            self.proc.kill()


class HttpEndpoint(Endpoint):
    """POSTs one JSON object per request to a single URL."""

    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT):
        self.spec = url
        self.url = url
        self.timeout = timeout
        self.server_hello = _check_server_hello(self._post(client_hello()))

    def _post(self, obj: Dict) -> Dict:
        body = json.dumps(obj).encode("utf-8")
        req = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except urllib.error.URLError as exc:
            if isinstance(getattr(exc, "reason", None), TimeoutError) or "timed out" in str(exc):
                raise EndpointTimeoutError(str(exc)) from None
            raise ProtocolViolationError(f"http endpoint failed: {exc}") from None
        except TimeoutError as exc:
            raise EndpointTimeoutError(str(exc)) from None
        except json.JSONDecodeError as exc:
            raise ProtocolViolationError(f"bad JSON from endpoint: {exc}") from None

    def generate(self, request: GenRequest) -> str:
        return self._check_response(self._post(request.to_wire()), request.id)


def make_endpoint(spec: str, timeout: float = DEFAULT_TIMEOUT) -> Endpoint:
    """Build an endpoint from a CLI spec: "cmd:<argv>" or an http(s) URL."""
    if spec.startswith("cmd:"):
        return SubprocessEndpoint(spec[4:], timeout=timeout)
    if spec.startswith("http://") or spec.startswith("https://"):
        return HttpEndpoint(spec, timeout=timeout)
    raise ValueError(f"endpoint spec must start with cmd: or http(s)://, got {spec!r}")


def serve_stdio(
    handler: Callable[[Dict], str],
    name: str,
    version: str = __version__,
    hello_extra: Optional[Dict] = None,
    stdin: Optional[IO] = None,
    stdout: Optional[IO] = None,
) -> int:
    """Run a protocol server over stdio; returns the number of requests served.

    ``handler`` maps a request dict to response text; exceptions become
    {"error": ...} responses and the loop keeps going.
    """
    import sys

    fin = stdin if stdin is not None else sys.stdin
    fout = stdout if stdout is not None else sys.stdout

    def emit(obj: Dict):
        fout.write(json.dumps(obj) + "\n")
        fout.flush()

    first = fin.readline()
    if not first:
        return 0
    try:
        opening = json.loads(first)
    except json.JSONDecodeError:
        emit({"error": "first line must be a hello object"})
        return 0
    if "hello" not in opening:
        emit({"error": "first line must be a hello object"})
        return 0
    hello = {"name": name, "version": version, "protocol": PROTOCOL_VERSION}
    if hello_extra:
        hello.update(hello_extra)
    emit({"hello": hello})

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
        rid = request.get("id")
        try:
            text = handler(request)
            emit({"id": rid, "text": text})
        except Exception as exc:  # noqa: BLE001 - server must not die
            emit({"id": rid, "error": f"{type(exc).__name__}: {exc}"})
        served += 1
    return served


def check_conformance(endpoint: Endpoint, prompt: str) -> List[str]:
    """Probe an endpoint against the protocol contract; returns issue strings."""
    issues: List[str] = []
    hello = endpoint.server_hello
    for key in ("name", "version"):
        if not isinstance(hello.get(key), str):
            issues.append(f"hello lacks string field {key!r}")
    try:
        first = endpoint.generate(GenRequest(id="conf-1", prompt=prompt, sample=False))
        if not isinstance(first, str) or not first.strip():
            issues.append("empty response text")
        again = endpoint.generate(GenRequest(id="conf-2", prompt=prompt, sample=False))
        if first != again:
            issues.append("sample=false is not deterministic")
    except (ProtocolViolationError, EndpointTimeoutError) as exc:
        issues.append(f"request failed: {exc}")
    return issues
