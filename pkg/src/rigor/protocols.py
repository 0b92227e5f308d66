"""Sequential testing protocols as pure value machines.

States are frozen dataclasses; advancing a protocol returns a fresh state
instead of mutating the old one, and every step can be re-checked with
:func:`validate_transition` so that bookkeeping bugs surface as errors
instead of silently voiding the statistical guarantee.

Two protocols are shipped: LORD++ (online FDR control through a decaying
wealth budget that is partially replenished on each rejection) and a naive
comparator that applies one fixed threshold to every test.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Union

import numpy as np

__all__ = [
    "AdvanceResult",
    "DEFAULT_HORIZON",
    "GammaSchedule",
    "LordConfig",
    "LordState",
    "NaiveConfig",
    "NaiveState",
    "ProtocolConfig",
    "ProtocolError",
    "ProtocolErrorKind",
    "ProtocolState",
    "advance_state",
    "default_lord_config",
    "initialize",
    "lord_initialize",
    "lord_threshold",
    "make_gamma_schedule",
    "naive_initialize",
    "next_threshold",
    "validate_transition",
]

DEFAULT_HORIZON = 10**6


class ProtocolErrorKind(Enum):
    INVALID_TRANSITION = "invalid_transition"
    INVALID_CONFIG = "invalid_config"


class ProtocolError(Exception):
    """A rejected protocol configuration or state transition."""

    def __init__(self, kind: ProtocolErrorKind, message: str):
        if not message:
            raise ValueError("ProtocolError requires a non-empty message")
        super().__init__(message)
        self.kind = kind
        self.message = message


def _invalid_config(message: str) -> ProtocolError:
    return ProtocolError(ProtocolErrorKind.INVALID_CONFIG, message)


def _invalid_transition(message: str) -> ProtocolError:
    return ProtocolError(ProtocolErrorKind.INVALID_TRANSITION, message)


@dataclass(frozen=True, eq=False)
class GammaSchedule:
    """Discount weights gamma_1..gamma_H: positive, non-increasing, summing to 1.

    ``weights[k-1]`` is gamma_k; indices outside 1..horizon are treated as
    zero, which is how truncation enters the threshold formula.
    """

    horizon: int
    weights: np.ndarray

    def gamma(self, k: int) -> float:
        if 1 <= k <= self.horizon:
            return float(self.weights[k - 1])
        return 0.0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GammaSchedule):
            return NotImplemented
        return self.horizon == other.horizon and np.array_equal(self.weights, other.weights)


@lru_cache(maxsize=8)
def make_gamma_schedule(horizon: int = DEFAULT_HORIZON) -> GammaSchedule:
    """Build the default discount sequence, truncated at ``horizon`` and renormalized.

    The unnormalized weight at index j is log(max(j, 2)) / (j * exp(sqrt(log j))),
    a slowly decaying sequence that spreads the budget over many future tests.
    """
    if horizon < 1:
        raise _invalid_config(f"schedule horizon must be >= 1, got {horizon}")
    j = np.arange(1, horizon + 1, dtype=np.float64)
    raw = np.log(np.maximum(j, 2.0)) / (j * np.exp(np.sqrt(np.log(j))))
    weights = raw / raw.sum()
    weights.setflags(write=False)
    return GammaSchedule(horizon=horizon, weights=weights)


@dataclass(frozen=True)
class LordConfig:
    """LORD++ parameters: target FDR ``alpha``, initial wealth ``w0``, discount schedule."""

    alpha: float
    w0: float
    schedule: GammaSchedule


@dataclass(frozen=True)
class NaiveConfig:
    """Fixed-threshold comparator: every test is judged at the same level."""

    alpha: float


@dataclass(frozen=True)
class LordState:
    """LORD++ accounting state: tests seen so far and when past rejections happened."""

    config: LordConfig
    current_time: int = 0
    rejection_times: tuple[int, ...] = ()


@dataclass(frozen=True)
class NaiveState:
    alpha: float
    current_time: int = 0


ProtocolConfig = Union[LordConfig, NaiveConfig]
ProtocolState = Union[LordState, NaiveState]


@dataclass(frozen=True)
class AdvanceResult:
    """One protocol step: the decision, the threshold it used, and the successor state."""

    is_discovery: bool
    threshold: float
    new_state: ProtocolState


def default_lord_config(
    alpha: float = 0.05,
    w0: float | None = None,
    horizon: int = DEFAULT_HORIZON,
) -> LordConfig:
    """LORD++ config with the conventional wealth split w0 = alpha / 2."""
    if w0 is None:
        w0 = alpha / 2.0
    return LordConfig(alpha=alpha, w0=w0, schedule=make_gamma_schedule(horizon))


def lord_initialize(config: LordConfig) -> LordState:
    """Validate a LORD++ config and return its fresh state (t = 0, no rejections).

    Raises ProtocolError(INVALID_CONFIG) naming the violated bound; never
    kills the process on bad input.
    """
    if not 0.0 < config.alpha < 1.0:
        raise _invalid_config(f"alpha must lie in (0, 1), got {config.alpha!r}")
    if not 0.0 < config.w0 <= config.alpha:
        raise _invalid_config(
            f"w0 must satisfy 0 < w0 <= alpha, got w0={config.w0!r} with alpha={config.alpha!r}"
        )
    sched = config.schedule
    if sched.horizon < 1 or len(sched.weights) != sched.horizon:
        raise _invalid_config("schedule must provide one weight per index up to its horizon")
    if not np.all(sched.weights > 0.0):
        raise _invalid_config("schedule weights must all be strictly positive")
    if np.any(np.diff(sched.weights) > 0.0):
        raise _invalid_config("schedule weights must be non-increasing")
    if abs(float(sched.weights.sum()) - 1.0) > 1e-9:
        raise _invalid_config("schedule weights must sum to 1 within 1e-9")
    return LordState(config=config)


def naive_initialize(config: NaiveConfig) -> NaiveState:
    if not 0.0 < config.alpha < 1.0:
        raise _invalid_config(f"alpha must lie in (0, 1), got {config.alpha!r}")
    return NaiveState(alpha=config.alpha)


def initialize(config: ProtocolConfig) -> ProtocolState:
    """Dispatch initialization for any supported protocol config."""
    if isinstance(config, LordConfig):
        return lord_initialize(config)
    if isinstance(config, NaiveConfig):
        return naive_initialize(config)
    raise _invalid_config(f"unsupported protocol config: {type(config).__name__}")


def lord_threshold(state: LordState) -> float:
    """Threshold alpha_{t+1} that LORD++ will apply to the next test.

    The fresh-wealth term decays with total elapsed time; each past rejection
    at time tau contributes a term indexed by the time elapsed since tau, so
    rejections reward future tests only.
    """
    cfg = state.config
    sched = cfg.schedule
    t_next = state.current_time + 1
    level = cfg.w0 * sched.gamma(t_next)
    if state.rejection_times:
        level += (cfg.alpha - cfg.w0) * sched.gamma(t_next - state.rejection_times[0])
        rest = state.rejection_times[1:]
        if rest:
            k = t_next - np.asarray(rest, dtype=np.int64)
            k = k[k <= sched.horizon]  # k >= 1 always: rejections lie in the past
            if k.size:
                level += cfg.alpha * float(sched.weights[k - 1].sum())
    return float(level)


def next_threshold(state: ProtocolState) -> float:
    """Threshold the protocol will apply to the next test."""
    if isinstance(state, LordState):
        return lord_threshold(state)
    if isinstance(state, NaiveState):
        return state.alpha
    raise _invalid_config(f"unsupported protocol state: {type(state).__name__}")


def advance_state(p_value: float, state: ProtocolState) -> AdvanceResult:
    """Judge one p-value and return the decision plus the successor state.

    Pure: the input state is never mutated. The decision rule is
    ``p_value <= threshold`` (a p-value exactly at the threshold counts as a
    discovery), so recorded traces can be replayed bit-for-bit.
    """
    if not 0.0 <= p_value <= 1.0:
        raise _invalid_config(f"p-value must lie in [0, 1], got {p_value!r}")
    threshold = next_threshold(state)
    is_discovery = bool(p_value <= threshold)
    if isinstance(state, LordState):
        rejections = state.rejection_times
        if is_discovery:
            rejections = rejections + (state.current_time + 1,)
        new_state: ProtocolState = LordState(
            config=state.config,
            current_time=state.current_time + 1,
            rejection_times=rejections,
        )
    else:
        new_state = NaiveState(alpha=state.alpha, current_time=state.current_time + 1)
    return AdvanceResult(is_discovery=is_discovery, threshold=threshold, new_state=new_state)


def validate_transition(old: ProtocolState, new: ProtocolState) -> None:
    """Re-check one step of the protocol; raises ProtocolError(INVALID_TRANSITION) if broken.

    Guards both the clock (time must advance by exactly one) and, for
    LORD++, the rejection history, which may only ever be extended by the
    new current time: a rewritten history is state corruption even when the
    clock looks right.
    """
    if type(old) is not type(new):
        raise _invalid_transition("Transition must stay within a single protocol.")
    if new.current_time != old.current_time + 1:
        raise _invalid_transition("Time must advance sequentially.")
    if isinstance(old, LordState):
        assert isinstance(new, LordState)
        if new.config != old.config:
            raise _invalid_transition("Protocol configuration must not change mid-run.")
        extended = old.rejection_times + (new.current_time,)
        if new.rejection_times != old.rejection_times and new.rejection_times != extended:
            raise _invalid_transition(
                "Rejection history may only be extended by the current test index."
            )
    elif isinstance(old, NaiveState):
        assert isinstance(new, NaiveState)
        if new.alpha != old.alpha:
            raise _invalid_transition("Protocol configuration must not change mid-run.")
