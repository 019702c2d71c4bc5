"""Subprocess plugin host.

External sampler/problem packages run as child processes speaking a
line-delimited protocol: one UTF-8 JSON object per newline-terminated line on
stdin/stdout (stderr is passed through for plugin logs). The host enforces a
strict request/response discipline — one in-flight request per handle — and
validates every answer against the declared search space before accepting it.

Message types: hello, hello_ack, ask, params, tell, tell_ack, evaluate,
values, shutdown, error. Protocol version is the integer 1.
"""

from __future__ import annotations

import json
import math
import queue
import subprocess
import threading
from typing import Any, Mapping, Sequence

from .errors import (
    PluginCapabilityError,
    PluginContractError,
    PluginError,
    PluginProtocolError,
    PluginStartupError,
    PluginStateError,
    PluginTimeoutError,
    PluginVersionError,
    ValidationError,
)
from .samplers.base import Sampler
from .space import ParamValue, SearchSpace

PROTOCOL_VERSION = 1

DEFAULT_HANDSHAKE_TIMEOUT = 10.0
DEFAULT_REQUEST_TIMEOUT = 30.0
DEFAULT_SHUTDOWN_GRACE = 5.0

MESSAGE_TYPES = frozenset(
    {"hello", "hello_ack", "ask", "params", "tell", "tell_ack", "evaluate", "values", "shutdown", "error"}
)
CAPABILITIES = frozenset({"sampler", "problem"})

_EOF = object()


def serialize_message(message: Mapping[str, Any]) -> str:
    """One wire line (without the newline) for a message dict."""
    if message.get("type") not in MESSAGE_TYPES:
        raise PluginProtocolError(f"cannot serialize message of type {message.get('type')!r}")
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


def parse_message(line: str) -> dict:
    """Parse one wire line; anything but a JSON object with a known type is a
    protocol error."""
    try:
        message = json.loads(line)
    except json.JSONDecodeError as exc:
        raise PluginProtocolError(f"not a protocol message: {line[:200]!r} ({exc})") from None
    if not isinstance(message, dict) or message.get("type") not in MESSAGE_TYPES:
        raise PluginProtocolError(f"unknown message type in line: {line[:200]!r}")
    return message


class PluginHandle:
    """A running plugin subprocess after a successful handshake."""

    def __init__(
        self,
        command: Sequence[str],
        process: subprocess.Popen,
        request_timeout: float,
        shutdown_grace: float,
    ):
        self.command = list(command)
        self.protocol: int | None = None
        self.capabilities: frozenset[str] = frozenset()
        self.state = "starting"
        self.request_timeout = request_timeout
        self.shutdown_grace = shutdown_grace
        self._proc = process
        self._lines: queue.Queue = queue.Queue()
        self._io_lock = threading.Lock()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        try:
            for line in self._proc.stdout:
                self._lines.put(line.rstrip("\n"))
        except ValueError:
            pass  # stream closed during shutdown
        self._lines.put(_EOF)

    def _send(self, message: Mapping[str, Any]) -> None:
        line = serialize_message(message)
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError) as exc:
            raise PluginError(f"plugin process is gone: {exc}") from None

    def _recv(self, timeout: float) -> dict:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            self._terminate()
            raise PluginTimeoutError(f"plugin did not respond within {timeout:.1f}s") from None
        if line is _EOF:
            self._terminate()
            raise PluginError("plugin closed its message stream")
        return parse_message(line)

    def request(self, message: Mapping[str, Any], expect: str, timeout: float | None = None) -> dict:
        """Send one request and wait for its single response."""
        if self.state != "ready":
            raise PluginStateError(f"handle is {self.state}, not ready")
        with self._io_lock:  # one in-flight request per handle
            self._send(message)
            reply = self._recv(self.request_timeout if timeout is None else timeout)
        if reply["type"] == "error":
            raise PluginError(f"plugin error {reply.get('code')!r}: {reply.get('message')}")
        if reply["type"] != expect:
            raise PluginProtocolError(f"expected {expect!r} response, got {reply['type']!r}")
        return reply

    def _terminate(self) -> None:
        self.state = "closed"
        if self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=self.shutdown_grace)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        self._close_streams()

    def _close_streams(self) -> None:
        for stream in (self._proc.stdin, self._proc.stdout):
            try:
                if stream:
                    stream.close()
            except OSError:
                pass


def spawn_plugin(
    command: Sequence[str],
    expected_capability: str,
    *,
    cwd: str | None = None,
    handshake_timeout: float = DEFAULT_HANDSHAKE_TIMEOUT,
    request_timeout: float = DEFAULT_REQUEST_TIMEOUT,
    shutdown_grace: float = DEFAULT_SHUTDOWN_GRACE,
) -> PluginHandle:
    """Start a plugin process and complete the hello/hello_ack handshake."""
    if expected_capability not in CAPABILITIES:
        raise ValidationError(f"unknown capability {expected_capability!r}")
    try:
        proc = subprocess.Popen(
            list(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=None,  # plugin logs flow to the host's stderr
            cwd=cwd,
            text=True,
            bufsize=1,
        )
    except OSError as exc:
        raise PluginStartupError(f"cannot start plugin {command!r}: {exc}") from None

    handle = PluginHandle(command, proc, request_timeout, shutdown_grace)
    try:
        handle._send({"type": "hello", "protocol": PROTOCOL_VERSION})
        reply = handle._recv(handshake_timeout)
        if reply["type"] != "hello_ack":
            raise PluginProtocolError(f"expected hello_ack, got {reply['type']!r}")
        if reply.get("protocol") != PROTOCOL_VERSION:
            raise PluginVersionError(
                f"plugin speaks protocol {reply.get('protocol')!r}, host requires {PROTOCOL_VERSION}"
            )
        caps = frozenset(reply.get("capabilities", []))
        if not caps <= CAPABILITIES:
            raise PluginProtocolError(f"unknown capabilities {sorted(caps - CAPABILITIES)}")
        if expected_capability not in caps:
            raise PluginCapabilityError(
                f"plugin offers {sorted(caps)}, required capability is {expected_capability!r}"
            )
        handle.protocol = PROTOCOL_VERSION
        handle.capabilities = caps
        handle.state = "ready"
        return handle
    except PluginTimeoutError as exc:
        handle._terminate()
        raise PluginStartupError(f"handshake timed out: {exc}") from None
    except PluginError:
        handle._terminate()
        raise


def plugin_ask(
    handle: PluginHandle,
    trial_id: int,
    space: SearchSpace,
    history: Sequence,
) -> dict[str, ParamValue]:
    """Request a suggestion; bounds are validated before the params are
    accepted. Out-of-space params raise PluginContractError (the engine turns
    that into a failed trial and keeps the study going)."""
    if "sampler" not in handle.capabilities:
        raise PluginCapabilityError("plugin does not offer the sampler capability")
    reply = handle.request(
        {
            "type": "ask",
            "trial_id": trial_id,
            "search_space": space.to_dict(),
            "history": [_history_entry(t) for t in history],
        },
        expect="params",
    )
    if reply.get("trial_id") != trial_id:
        raise PluginProtocolError(f"params echoed trial_id {reply.get('trial_id')!r}, expected {trial_id}")
    raw = reply.get("params")
    if not isinstance(raw, dict):
        raise PluginProtocolError("params message missing the params object")
    try:
        return space.validate_params(raw)
    except ValidationError as exc:
        raise PluginContractError(f"suggested params violate the space: {exc}", params=raw) from None


def plugin_tell(
    handle: PluginHandle,
    trial_id: int,
    values: Sequence[float] | None = None,
    *,
    failed: bool = False,
) -> None:
    """Forward a trial outcome; waits for the matching tell_ack."""
    message: dict[str, Any] = {"type": "tell", "trial_id": trial_id}
    if failed:
        message["failure"] = True
    else:
        message["values"] = [float(v) for v in values or []]
    reply = handle.request(message, expect="tell_ack")
    if reply.get("trial_id") != trial_id:
        raise PluginProtocolError(f"tell_ack echoed trial_id {reply.get('trial_id')!r}, expected {trial_id}")


def plugin_evaluate(
    handle: PluginHandle,
    params: Mapping[str, ParamValue],
    n_values: int | None = None,
) -> list[float]:
    """Evaluate params; values must be finite and, when known, of the declared
    arity."""
    if "problem" not in handle.capabilities:
        raise PluginCapabilityError("plugin does not offer the problem capability")
    reply = handle.request({"type": "evaluate", "params": dict(params)}, expect="values")
    raw = reply.get("values")
    if not isinstance(raw, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise PluginProtocolError("values message must carry a list of numbers")
    values = [float(v) for v in raw]
    if any(not math.isfinite(v) for v in values):
        raise PluginContractError(f"plugin returned non-finite values: {values}")
    if n_values is not None and len(values) != n_values:
        raise PluginContractError(f"plugin returned {len(values)} values, declared arity is {n_values}")
    return values


def shutdown_plugin(handle: PluginHandle) -> None:
    """Cooperative shutdown with a grace period, then a hard kill. Idempotent."""
    if handle.state == "closed":
        return
    handle.state = "closed"
    try:
        handle._send({"type": "shutdown"})
    except PluginError:
        pass
    try:
        handle._proc.wait(timeout=handle.shutdown_grace)
    except subprocess.TimeoutExpired:
        handle._proc.kill()
        handle._proc.wait()
    handle._close_streams()


def _history_entry(trial) -> dict:
    return {"id": trial.id, "params": dict(trial.params), "values": list(trial.values or [])}


class PluginSampler(Sampler):
    """Engine-facing adapter over a sampler-capable plugin handle."""

    def __init__(self, handle: PluginHandle, ref: str = "samplers/plugin", options: dict | None = None):
        self.handle = handle
        self.ref = ref
        self.options = dict(options or {})

    def ask(self, space, directions, trial_id, history, seed):
        return plugin_ask(self.handle, trial_id, space, history)

    def tell(self, trial) -> None:
        if trial.values is None:
            plugin_tell(self.handle, trial.id, failed=True)
        else:
            plugin_tell(self.handle, trial.id, trial.values)

    def close(self) -> None:
        shutdown_plugin(self.handle)
