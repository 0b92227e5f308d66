#!/usr/bin/env python3
"""Regenerate the golden harness and the mutant corpus used by the audit tests.

Each mutant applies one structural tamper to the golden harness. The script
verifies that every mutant (a) actually differs from the golden source and
(b) is flagged by audit_scaffold, so the checked-in corpus can never drift
into undetectable territory.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from rigor.scaffold import (  # noqa: E402
    DataContract,
    StatisticalTestSpec,
    audit_scaffold,
    generate_scaffold,
)

GOLDEN_DIR = REPO_ROOT / "tests" / "golden"
MUTANT_DIR = REPO_ROOT / "tests" / "fixtures" / "mutants"

CONTRACT = DataContract("data/exploration.csv", "data/validation.csv")
TEST_SPEC = StatisticalTestSpec(reps=3, folds=10)
IDEA_LABEL = "reference-idea"

_CALL_BLOCK = """    return execute_paired_ttest(
        data,
        artifact,
        baseline,
        implementation.evaluate_model,
        reps=3,
        folds=10,
        seed=zlib.crc32(IDEA_LABEL.encode("utf-8")),
    )"""

_BASELINE_BLOCK = """    # The baseline artifact is also built from exploration data only.
    data = _load_rows('data/exploration.csv')
    return implementation.get_baseline(data)"""

_SENTINEL_LINE = (
    '    print("RIGOR_RESULT " + json.dumps(dict(p_value=p_value, n_pairs=3 * 10)))'
)

MUTATIONS: list[tuple[str, str, str]] = [
    (
        "leak_validation_into_exploration",
        "    data = _load_rows('data/exploration.csv')\n    return implementation.optimize(data)",
        "    data = _load_rows('data/exploration.csv')\n"
        "    peek = _load_rows('data/validation.csv')\n"
        "    return implementation.optimize(data + peek)",
    ),
    (
        "validation_path_in_preamble",
        'ARTIFACT_CACHE = ".harness_artifact.pkl"',
        'ARTIFACT_CACHE = ".harness_artifact.pkl"\nVALIDATION_PATH = \'data/validation.csv\'',
    ),
    (
        "exploration_loads_validation_file",
        "    data = _load_rows('data/exploration.csv')\n    return implementation.optimize(data)",
        "    data = _load_rows('data/validation.csv')\n    return implementation.optimize(data)",
    ),
    ("delete_verified_test_call", _CALL_BLOCK, "    return 0.5"),
    (
        "duplicate_verified_test_call",
        _CALL_BLOCK,
        "    execute_paired_ttest(data, artifact, baseline,"
        " implementation.evaluate_model, reps=3, folds=10, seed=0)\n" + _CALL_BLOCK,
    ),
    ("substitute_own_test", "return execute_paired_ttest(", "return select_own_test("),
    ("alter_reps", "reps=3,", "reps=5,"),
    ("alter_folds", "folds=10,", "folds=2,"),
    (
        "skip_optimize_entry",
        "    return implementation.optimize(data)",
        "    return None",
    ),
    (
        "substitute_evaluator",
        "        implementation.evaluate_model,",
        "        (lambda model, rows: 1.0),",
    ),
    ("drop_baseline_entry", _BASELINE_BLOCK, "    return None"),
    ("rename_validation_routine", "def run_validation(", "def validate_quietly("),
    ("drop_result_sentinel", _SENTINEL_LINE, "    pass"),
    ("misspell_result_sentinel", '"RIGOR_RESULT "', '"RIGORRESULT "'),
    ("introduce_syntax_error", "def main(argv=None):", "def main(argv=None:"),
    (
        "validation_also_reads_exploration",
        "    data = _load_rows('data/validation.csv')",
        "    data = _load_rows('data/validation.csv') + _load_rows('data/exploration.csv')",
    ),
    ("drop_reps_kwarg", "        reps=3,\n        folds=10,", "        folds=10,"),
    ("remove_main_entrypoint", "def main(argv=None):", "def _main_disabled(argv=None):"),
    (
        "test_call_in_exploration",
        "    data = _load_rows('data/exploration.csv')\n    return implementation.optimize(data)",
        "    data = _load_rows('data/exploration.csv')\n"
        "    execute_paired_ttest(data, None, None, implementation.evaluate_model,"
        " reps=3, folds=10, seed=0)\n"
        "    return implementation.optimize(data)",
    ),
    ("typo_optimize_entry", "implementation.optimize(", "implementation.optimise("),
]


def main() -> int:
    scaffold = generate_scaffold(CONTRACT, TEST_SPEC, IDEA_LABEL)
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    MUTANT_DIR.mkdir(parents=True, exist_ok=True)
    (GOLDEN_DIR / "reference_harness.py").write_text(scaffold.harness_source, encoding="utf-8")

    for index, (name, old, new) in enumerate(MUTATIONS, start=1):
        if old not in scaffold.harness_source:
            raise SystemExit(f"mutation {name}: anchor text not found in golden harness")
        mutated = f"# mutant: {name}\n" + scaffold.harness_source.replace(old, new, 1)
        if mutated.split("\n", 1)[1] == scaffold.harness_source:
            raise SystemExit(f"mutation {name}: produced no change")
        violations = audit_scaffold(replace(scaffold, harness_source=mutated))
        if not violations:
            raise SystemExit(f"mutation {name}: NOT detected by audit_scaffold")
        (MUTANT_DIR / f"mutant_{index:02d}_{name}.py").write_text(mutated, encoding="utf-8")
        print(f"mutant_{index:02d}_{name}: {violations[0]}")

    print(f"wrote golden harness and {len(MUTATIONS)} mutants")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
