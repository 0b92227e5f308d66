"""Sequential statistical accountability for automated hypothesis pipelines.

The package couples three guarantees that are usually left to convention:

* online FDR accounting (LORD++) with validated state transitions,
* a transactional session that makes experiment execution and statistical
  bookkeeping inseparable, and
* generated experiment harnesses that structurally deny untrusted
  implementation code access to validation data and pin the statistical test.

A Monte Carlo benchmark quantifies what the accounting buys at scale.
"""

from rigor.protocols import (
    AdvanceResult,
    GammaSchedule,
    LordConfig,
    LordState,
    NaiveConfig,
    NaiveState,
    ProtocolError,
    ProtocolErrorKind,
    advance_state,
    default_lord_config,
    lord_initialize,
    lord_threshold,
    make_gamma_schedule,
    naive_initialize,
    validate_transition,
)
from rigor.session import (
    Discovery,
    ResearchError,
    ResearchErrorKind,
    Session,
    SessionTrace,
    TestOutcome,
    open_session,
    replay_trace,
)
from rigor.scaffold import (
    DataContract,
    HarnessDialect,
    Scaffold,
    StatisticalTestSpec,
    audit_scaffold,
    generate_scaffold,
    validate_contract,
)
from rigor.executor import (
    FailureReason,
    HarnessExecutor,
    HarnessResult,
    execute_harness,
    parse_result_line,
)
from rigor.simulation import (
    MixtureConfig,
    RunResult,
    SimulationReport,
    analytic_naive_expectations,
    run_simulation,
    sample_hypothesis_stream,
)

__version__ = "0.1.0"
