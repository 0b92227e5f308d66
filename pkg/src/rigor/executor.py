"""Child-process execution of harnesses and strict parsing of their results.

This is the trust-boundary crossing: the harness and the untrusted
implementation are materialized into a fresh workspace and run as a child
process. Anything the child does wrong (crash, hang, garbage output,
impossible p-value) comes back as a ``HarnessResult`` failure value, never
as an exception, so upstream accounting can treat failed executions as
budget-neutral events.
"""

from __future__ import annotations

import json
import os
import shlex
import signal
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from rigor.scaffold import RESULT_SENTINEL, Scaffold, audit_scaffold
from rigor.protocols import ProtocolError, ProtocolErrorKind

__all__ = [
    "DEFAULT_ENV_ALLOW_LIST",
    "FailureReason",
    "HarnessExecutor",
    "HarnessResult",
    "ResultLineError",
    "execute_harness",
    "parse_result_line",
]

# Minimal pass-through environment: enough to run an interpreter, nothing
# that leaks host configuration into the child. Not a security sandbox.
DEFAULT_ENV_ALLOW_LIST = frozenset({"PATH", "LANG", "LC_ALL", "LC_CTYPE"})

_RESULT_PREFIX = RESULT_SENTINEL + " "


class FailureReason(Enum):
    NON_ZERO_EXIT = "non_zero_exit"
    TIMEOUT = "timeout"
    MALFORMED_OUTPUT = "malformed_output"
    OUT_OF_RANGE_P_VALUE = "out_of_range_p_value"


@dataclass(frozen=True)
class HarnessResult:
    """Outcome of one harness execution: a p-value or a classified failure."""

    p_value: float | None = None
    n_pairs: int | None = None
    failure: FailureReason | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.failure is None

    @classmethod
    def success(cls, p_value: float, n_pairs: int) -> "HarnessResult":
        return cls(p_value=p_value, n_pairs=n_pairs)

    @classmethod
    def failed(cls, reason: FailureReason, detail: str = "") -> "HarnessResult":
        return cls(failure=reason, detail=detail)


class ResultLineError(Exception):
    """A result line that does not satisfy the wire format."""

    def __init__(self, reason: FailureReason, detail: str):
        super().__init__(detail)
        self.reason = reason
        self.detail = detail


@dataclass(frozen=True)
class HarnessExecutor:
    """Where and how harness child processes run."""

    work_dir: Path
    interpreter_command: str = field(default_factory=lambda: shlex.quote(sys.executable))
    timeout: float = 120.0
    env_allow_list: frozenset[str] = DEFAULT_ENV_ALLOW_LIST
    # Extra files copied verbatim into every workspace (e.g. the verified
    # statistics runtime the harness imports). name -> content.
    support_files: tuple[tuple[str, str], ...] = ()


def parse_result_line(line: str) -> tuple[float, int]:
    """Parse one result line: ``RIGOR_RESULT {"p_value": <number>, "n_pairs": <int>}``.

    Raises ResultLineError(MALFORMED_OUTPUT) for anything that deviates from
    that exact shape and ResultLineError(OUT_OF_RANGE_P_VALUE) when the
    p-value falls outside [0, 1].
    """
    line = line.rstrip("\r\n")
    if not line.startswith(_RESULT_PREFIX):
        raise ResultLineError(FailureReason.MALFORMED_OUTPUT, f"missing sentinel prefix: {line!r}")
    payload_text = line[len(_RESULT_PREFIX) :]
    try:
        payload = json.loads(payload_text)
    except json.JSONDecodeError as err:
        raise ResultLineError(FailureReason.MALFORMED_OUTPUT, f"invalid payload: {err}") from None
    if not isinstance(payload, dict) or set(payload) != {"p_value", "n_pairs"}:
        raise ResultLineError(
            FailureReason.MALFORMED_OUTPUT, f"payload must have exactly p_value and n_pairs: {payload_text!r}"
        )
    p_value, n_pairs = payload["p_value"], payload["n_pairs"]
    if isinstance(p_value, bool) or not isinstance(p_value, (int, float)):
        raise ResultLineError(FailureReason.MALFORMED_OUTPUT, f"p_value is not a number: {p_value!r}")
    if isinstance(n_pairs, bool) or not isinstance(n_pairs, int) or n_pairs < 1:
        raise ResultLineError(FailureReason.MALFORMED_OUTPUT, f"n_pairs is not a positive integer: {n_pairs!r}")
    p_value = float(p_value)
    if not 0.0 <= p_value <= 1.0:
        raise ResultLineError(FailureReason.OUT_OF_RANGE_P_VALUE, f"p-value outside [0, 1]: {p_value!r}")
    return p_value, n_pairs


def _child_env(executor: HarnessExecutor) -> dict[str, str]:
    return {name: os.environ[name] for name in sorted(executor.env_allow_list) if name in os.environ}


def _tail(text: str, limit: int = 800) -> str:
    text = text.strip()
    return text[-limit:] if len(text) > limit else text


def execute_harness(
    executor: HarnessExecutor,
    scaffold: Scaffold,
    implementation_source: str,
) -> HarnessResult:
    """Run a scaffold against an implementation in a fresh workspace.

    The scaffold is re-audited before dispatch. Workspace setup problems
    (unwritable work_dir, failed audit) raise; everything the child itself
    does wrong is returned as a failure value.
    """
    violations = audit_scaffold(scaffold)
    if violations:
        raise ProtocolError(
            ProtocolErrorKind.INVALID_CONFIG,
            "refusing to dispatch a harness that fails its audit: " + "; ".join(violations),
        )

    work_dir = Path(executor.work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    workspace = Path(tempfile.mkdtemp(prefix="run_", dir=work_dir))
    (workspace / scaffold.harness_filename).write_text(scaffold.harness_source, encoding="utf-8")
    (workspace / "implementation.py").write_text(implementation_source, encoding="utf-8")
    for name, content in executor.support_files:
        (workspace / name).write_text(content, encoding="utf-8")

    argv = shlex.split(executor.interpreter_command) + [scaffold.harness_filename, "--phase", "full"]
    try:
        proc = subprocess.Popen(
            argv,
            cwd=workspace,
            env=_child_env(executor),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            start_new_session=True,
        )
    except OSError as err:
        # A missing interpreter is an environment problem, not child misbehavior.
        raise ProtocolError(ProtocolErrorKind.INVALID_CONFIG, f"cannot launch interpreter: {err}")

    try:
        stdout, stderr = proc.communicate(timeout=executor.timeout)
    except subprocess.TimeoutExpired:
        try:
            os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            proc.kill()
        proc.communicate()
        return HarnessResult.failed(
            FailureReason.TIMEOUT, f"harness exceeded {executor.timeout}s and was killed"
        )

    if proc.returncode != 0:
        return HarnessResult.failed(
            FailureReason.NON_ZERO_EXIT,
            f"exit code {proc.returncode}; stderr tail: {_tail(stderr)}",
        )

    result_lines = [line for line in stdout.splitlines() if line.startswith(_RESULT_PREFIX)]
    if not result_lines:
        return HarnessResult.failed(
            FailureReason.MALFORMED_OUTPUT, f"no result line in output; stdout tail: {_tail(stdout)}"
        )
    try:
        p_value, n_pairs = parse_result_line(result_lines[-1])
    except ResultLineError as err:
        return HarnessResult.failed(err.reason, err.detail)
    return HarnessResult.success(p_value, n_pairs)
