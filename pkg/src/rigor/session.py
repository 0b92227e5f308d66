"""Transactional hypothesis-testing sessions.

A session owns a protocol state and an append-only trace, and running a
test through it is the only way to advance the protocol: a p-value cannot
be observed without the matching accounting step. Every advance is
re-validated; a validation failure halts the session permanently with the
last valid state intact, discarding the offending step entirely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

from rigor import protocols
from rigor.executor import HarnessResult
from rigor.protocols import AdvanceResult, ProtocolConfig, ProtocolError, ProtocolState
from rigor.scaffold import Scaffold

__all__ = [
    "Discovery",
    "OutcomeStatus",
    "ReplayInconsistency",
    "ResearchError",
    "ResearchErrorKind",
    "Session",
    "SessionStatus",
    "SessionTrace",
    "TestOutcome",
    "decision_rows_from_jsonl",
    "open_session",
    "replay_trace",
    "trace_to_jsonl",
]


class ResearchErrorKind(Enum):
    PROTOCOL_VIOLATION = "protocol_violation"
    SESSION_HALTED = "session_halted"


class ResearchError(Exception):
    """Session-level failure; PROTOCOL_VIOLATION halts the session for good."""

    def __init__(
        self,
        kind: ResearchErrorKind,
        message: str,
        protocol_error: ProtocolError | None = None,
    ):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.protocol_error = protocol_error


class SessionStatus(Enum):
    ACTIVE = "active"
    HALTED = "halted"


class OutcomeStatus(Enum):
    TESTED = "tested"
    EXECUTION_FAILED = "execution_failed"


@dataclass(frozen=True)
class Discovery:
    """A rejection: the test index it happened at, and the evidence."""

    test_index: int
    idea_label: str
    p_value: float
    threshold: float


@dataclass(frozen=True)
class TestOutcome:
    """One trace row. Failed executions keep the index of the slot they attempted
    but consume neither time nor budget, so the next tested idea reuses it."""

    test_index: int
    idea_label: str
    status: OutcomeStatus
    p_value: float | None = None
    threshold: float | None = None
    is_discovery: bool | None = None
    detail: str = ""


@dataclass(frozen=True)
class SessionTrace:
    outcomes: tuple[TestOutcome, ...]
    final_state: ProtocolState
    status: SessionStatus
    error: ResearchError | None = None


# The executor side of the trust boundary, as the session sees it.
ExecuteFn = Callable[[Scaffold], HarnessResult]


class Session:
    """Single-threaded sequential session; serialize calls externally.

    ``advance_fn`` and ``validate_fn`` default to the real protocol
    operations; they are injectable so tests can prove that a corrupted
    protocol step halts the session instead of committing.
    """

    def __init__(
        self,
        config: ProtocolConfig,
        *,
        advance_fn: Callable[[float, ProtocolState], AdvanceResult] | None = None,
        validate_fn: Callable[[ProtocolState, ProtocolState], None] | None = None,
    ):
        try:
            self._state: ProtocolState = protocols.initialize(config)
        except ProtocolError as err:
            raise ResearchError(
                ResearchErrorKind.PROTOCOL_VIOLATION, f"cannot open session: {err.message}", err
            ) from err
        self._advance = advance_fn or protocols.advance_state
        self._validate = validate_fn or protocols.validate_transition
        self._outcomes: list[TestOutcome] = []
        self._status = SessionStatus.ACTIVE
        self._error: ResearchError | None = None

    @property
    def status(self) -> SessionStatus:
        return self._status

    @property
    def state(self) -> ProtocolState:
        return self._state

    @property
    def error(self) -> ResearchError | None:
        return self._error

    @property
    def trace(self) -> SessionTrace:
        return SessionTrace(
            outcomes=tuple(self._outcomes),
            final_state=self._state,
            status=self._status,
            error=self._error,
        )

    def test_hypothesis(self, scaffold: Scaffold, executor: ExecuteFn) -> Discovery | None:
        """Run one guarded test: cross the trust boundary, then account for the result.

        Execution failures are recorded but change nothing: no time advance,
        no budget spent. A produced p-value always reaches the protocol, and
        the new state is committed only if the transition validates;
        otherwise the session halts with the pre-call state intact.
        """
        return self._guarded_test(scaffold.idea_label, lambda: executor(scaffold))

    def run_protocol_sequence(self, p_values: Iterable[float]) -> SessionTrace:
        """Feed known p-values through the same guarded path, bypassing execution."""
        for index, p_value in enumerate(p_values):
            stub = HarnessResult.success(float(p_value), 1)
            self._guarded_test(f"p[{index + 1}]", lambda result=stub: result)
        return self.trace

    def _require_active(self) -> None:
        if self._status is not SessionStatus.ACTIVE:
            raise ResearchError(
                ResearchErrorKind.SESSION_HALTED,
                "session is halted; no further tests are accepted",
                self._error.protocol_error if self._error else None,
            )

    def _halt(self, err: ProtocolError) -> ResearchError:
        self._status = SessionStatus.HALTED
        self._error = ResearchError(
            ResearchErrorKind.PROTOCOL_VIOLATION, f"protocol violation: {err.message}", err
        )
        return self._error

    def _guarded_test(self, label: str, execute: Callable[[], HarnessResult]) -> Discovery | None:
        self._require_active()
        snapshot = self._state

        result = execute()
        if not result.ok:
            reason = result.failure.value if result.failure else "unknown"
            self._outcomes.append(
                TestOutcome(
                    test_index=snapshot.current_time + 1,
                    idea_label=label,
                    status=OutcomeStatus.EXECUTION_FAILED,
                    detail=f"{reason}: {result.detail}" if result.detail else reason,
                )
            )
            return None

        try:
            advanced = self._advance(result.p_value, snapshot)
            self._validate(snapshot, advanced.new_state)
        except ProtocolError as err:
            raise self._halt(err) from err

        self._state = advanced.new_state
        self._outcomes.append(
            TestOutcome(
                test_index=advanced.new_state.current_time,
                idea_label=label,
                status=OutcomeStatus.TESTED,
                p_value=result.p_value,
                threshold=advanced.threshold,
                is_discovery=advanced.is_discovery,
            )
        )
        if advanced.is_discovery:
            return Discovery(
                test_index=advanced.new_state.current_time,
                idea_label=label,
                p_value=result.p_value,
                threshold=advanced.threshold,
            )
        return None


def open_session(
    config: ProtocolConfig,
    *,
    advance_fn: Callable[[float, ProtocolState], AdvanceResult] | None = None,
    validate_fn: Callable[[ProtocolState, ProtocolState], None] | None = None,
) -> Session:
    """Open a session with a fresh protocol state (t=0, empty trace)."""
    return Session(config, advance_fn=advance_fn, validate_fn=validate_fn)


@dataclass(frozen=True)
class ReplayInconsistency:
    row_index: int
    p_value: float
    threshold: float
    claimed_discovery: bool
    expected_discovery: bool


def replay_trace(
    rows: Iterable[tuple[float, float, bool]],
) -> list[ReplayInconsistency]:
    """Re-check recorded decisions against their recorded thresholds.

    Each row is (p_value, threshold, claimed_discovery); a row is consistent
    iff claimed == (p <= threshold). Thresholds are taken as recorded, not
    regenerated, so traces from foreign configurations can still be audited.
    Returns all inconsistencies; an empty list means the trace replays clean.
    """
    inconsistencies: list[ReplayInconsistency] = []
    for index, (p_value, threshold, claimed) in enumerate(rows, start=1):
        expected = p_value <= threshold
        if bool(claimed) != expected:
            inconsistencies.append(
                ReplayInconsistency(
                    row_index=index,
                    p_value=p_value,
                    threshold=threshold,
                    claimed_discovery=bool(claimed),
                    expected_discovery=expected,
                )
            )
    return inconsistencies


def trace_to_jsonl(trace: SessionTrace) -> str:
    """Serialize a trace, one JSON record per outcome.

    Schema per line: index (int), label (str), status ("tested" |
    "execution_failed"), p_value (number | null), threshold (number | null),
    discovery (bool | null), detail (str).
    """
    lines = []
    for outcome in trace.outcomes:
        lines.append(
            json.dumps(
                {
                    "index": outcome.test_index,
                    "label": outcome.idea_label,
                    "status": outcome.status.value,
                    "p_value": outcome.p_value,
                    "threshold": outcome.threshold,
                    "discovery": outcome.is_discovery,
                    "detail": outcome.detail,
                },
                sort_keys=False,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def decision_rows_from_jsonl(text: str) -> list[tuple[float, float, bool]]:
    """Extract (p_value, threshold, discovery) rows of tested outcomes for replay."""
    rows: list[tuple[float, float, bool]] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise ValueError(f"line {line_number} is not valid JSON: {err}") from None
        if record.get("status") != OutcomeStatus.TESTED.value:
            continue
        try:
            rows.append(
                (float(record["p_value"]), float(record["threshold"]), bool(record["discovery"]))
            )
        except (KeyError, TypeError) as err:
            raise ValueError(f"line {line_number} is missing decision fields: {err}") from None
    return rows
