"""Deterministic generation and auditing of experiment harnesses.

A harness is rendered from a versioned template so that equal inputs give
byte-identical output. Its structure, not reviewer discipline, is what
keeps untrusted implementation code away from validation data: the
validation file is referenced in exactly one routine, and the statistical
test (with its repetition counts) is baked into the source where the
implementation module cannot reach it.
"""

from __future__ import annotations

import ast
import os
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from rigor.protocols import ProtocolError, ProtocolErrorKind

__all__ = [
    "DataContract",
    "HarnessDialect",
    "IMPLEMENTATION_ENTRY_NAMES",
    "RESULT_SENTINEL",
    "Scaffold",
    "StatisticalTestKind",
    "StatisticalTestSpec",
    "VERIFIED_TEST_NAME",
    "audit_scaffold",
    "generate_scaffold",
    "validate_contract",
]

# Entry points the implementation module must provide; the template calls
# exactly these and nothing else.
IMPLEMENTATION_ENTRY_NAMES = ("optimize", "get_baseline", "evaluate_model")

# Name of the pinned statistical routine the validation phase calls.
VERIFIED_TEST_NAME = "execute_paired_ttest"

# Prefix of the single result line the harness prints on success.
RESULT_SENTINEL = "RIGOR_RESULT"


class HarnessDialect(Enum):
    PYTHON = "python"


class StatisticalTestKind(Enum):
    PAIRED_T_TEST = "paired_t_test"


@dataclass(frozen=True)
class DataContract:
    """Split datasets for hypothesis search vs. confirmatory testing."""

    exploration_data_path: str
    validation_data_path: str


@dataclass(frozen=True)
class StatisticalTestSpec:
    """The certifying test and its repetition structure, fixed before any code runs."""

    reps: int
    folds: int
    kind: StatisticalTestKind = StatisticalTestKind.PAIRED_T_TEST


@dataclass(frozen=True)
class Scaffold:
    """One rendered harness plus the inputs it was rendered from."""

    contract: DataContract
    test_spec: StatisticalTestSpec
    idea_label: str
    dialect: HarnessDialect
    harness_source: str

    @property
    def implementation_entry_names(self) -> tuple[str, str, str]:
        return IMPLEMENTATION_ENTRY_NAMES

    @property
    def harness_filename(self) -> str:
        return "harness.py"


def _invalid(message: str) -> ProtocolError:
    return ProtocolError(ProtocolErrorKind.INVALID_CONFIG, message)


def validate_contract(contract: DataContract) -> None:
    """Reject contracts whose two paths could alias the same file.

    Comparison happens after platform path normalization, so "a/../d.csv"
    collides with "d.csv". Raises ProtocolError(INVALID_CONFIG) on failure.
    """
    if not contract.exploration_data_path or not contract.validation_data_path:
        raise _invalid("both contract paths must be non-empty")
    exploration = os.path.normpath(contract.exploration_data_path)
    validation = os.path.normpath(contract.validation_data_path)
    if exploration == validation:
        raise _invalid(
            f"exploration and validation paths must be distinct files, both normalize to {validation!r}"
        )


def _validate_test_spec(spec: StatisticalTestSpec) -> None:
    if spec.kind is not StatisticalTestKind.PAIRED_T_TEST:
        raise _invalid(f"unsupported test kind: {spec.kind!r}")
    if spec.reps < 1:
        raise _invalid(f"reps must be >= 1, got {spec.reps}")
    if spec.folds < 2:
        raise _invalid(f"folds must be >= 2, got {spec.folds}")


def _load_template(dialect: HarnessDialect) -> str:
    asset = resources.files("rigor") / "templates" / f"{dialect.value}.py.tmpl"
    return asset.read_text(encoding="utf-8")


def generate_scaffold(
    contract: DataContract,
    test_spec: StatisticalTestSpec,
    idea_label: str,
    dialect: HarnessDialect | str = HarnessDialect.PYTHON,
) -> Scaffold:
    """Render a harness for the contract and test spec; deterministic byte-for-byte.

    Paths and the idea label are embedded as source-string literals
    (repr-escaped), so hostile characters cannot break out of the template.
    """
    if isinstance(dialect, str):
        try:
            dialect = HarnessDialect(dialect)
        except ValueError:
            raise _invalid(f"unknown harness dialect: {dialect!r}") from None
    validate_contract(contract)
    _validate_test_spec(test_spec)
    source = _load_template(dialect).format(
        exploration_path=repr(contract.exploration_data_path),
        validation_path=repr(contract.validation_data_path),
        reps=test_spec.reps,
        folds=test_spec.folds,
        idea_label=repr(idea_label),
    )
    return Scaffold(
        contract=contract,
        test_spec=test_spec,
        idea_label=idea_label,
        dialect=dialect,
        harness_source=source,
    )


_TOP_LEVEL_DEF = re.compile(r"^def (\w+)\(", re.MULTILINE)


def _split_sections(source: str) -> dict[str, str]:
    """Split harness source into the preamble and one chunk per top-level def."""
    sections: dict[str, str] = {}
    matches = list(_TOP_LEVEL_DEF.finditer(source))
    preamble_end = matches[0].start() if matches else len(source)
    sections["__preamble__"] = source[:preamble_end]
    for current, following in zip(matches, matches[1:] + [None]):
        end = following.start() if following is not None else len(source)
        sections[current.group(1)] = source[current.start() : end]
    return sections


def audit_scaffold(scaffold: Scaffold) -> list[str]:
    """Re-check the structural guarantees on the rendered source; [] means clean.

    This is a defense-in-depth self-check run again right before dispatch:
    it must hold for freshly generated harnesses and must catch tampered
    ones (moved data paths, removed or duplicated test call, renamed entry
    points, altered repetition counts).
    """
    violations: list[str] = []
    source = scaffold.harness_source

    try:
        ast.parse(source)
    except SyntaxError as err:
        violations.append(f"harness source does not parse: {err.msg} (line {err.lineno})")

    sections = _split_sections(source)
    exploration = sections.get("run_exploration")
    validation = sections.get("run_validation")
    main_section = sections.get("main")
    for name, chunk in (("run_exploration", exploration), ("run_validation", validation), ("main", main_section)):
        if chunk is None:
            violations.append(f"required routine {name} is missing")
    if exploration is None or validation is None:
        return violations

    exploration_literal = repr(scaffold.contract.exploration_data_path)
    validation_literal = repr(scaffold.contract.validation_data_path)

    if source.count(validation_literal) != validation.count(validation_literal):
        violations.append("validation data path is referenced outside the validation routine")
    if validation.count(validation_literal) < 1:
        violations.append("validation routine does not reference the validation data path")
    if exploration_literal not in exploration:
        violations.append("exploration routine does not reference the exploration data path")
    if exploration_literal in validation:
        violations.append("validation routine references the exploration data path")

    test_call = f"{VERIFIED_TEST_NAME}("
    call_count = source.count(test_call)
    if call_count != 1:
        violations.append(
            f"pinned statistical test must be called exactly once, found {call_count} call(s)"
        )
    elif test_call not in validation:
        violations.append("pinned statistical test is not called from the validation routine")
    else:
        if f"reps={scaffold.test_spec.reps}," not in validation:
            violations.append(f"test call does not pin reps={scaffold.test_spec.reps}")
        if f"folds={scaffold.test_spec.folds}," not in validation:
            violations.append(f"test call does not pin folds={scaffold.test_spec.folds}")

    if "implementation.optimize(" not in exploration:
        violations.append("exploration routine does not call implementation.optimize")
    if "implementation.get_baseline(" not in source:
        violations.append("harness never calls implementation.get_baseline")
    if "implementation.evaluate_model" not in validation:
        violations.append("validation routine does not pass implementation.evaluate_model to the test")

    if f'"{RESULT_SENTINEL} "' not in source:
        violations.append("harness does not emit the result sentinel line")

    return violations
