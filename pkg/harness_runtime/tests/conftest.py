"""End-to-end helpers for the runtime tests.

The orchestrator is exercised strictly through its external interfaces:
the ``rigor`` CLI, the generated harness file layout, the result sentinel
line on stdout, and the JSONL trace export.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

PACKAGE_ROOT = Path(__file__).resolve().parent.parent
RUNTIME_SOURCE = PACKAGE_ROOT / "src" / "verified_stats.py"
FIXTURE_DIR = PACKAGE_ROOT / "fixtures"

RESULT_PREFIX = "RIGOR_RESULT "


def write_dataset(path: Path, n_rows: int, start: int) -> None:
    rows = "\n".join(f"{start + i},{(start + i) % 7 + 0.5}" for i in range(n_rows))
    path.write_text("x,y\n" + rows + "\n", encoding="utf-8")


def run_cli(*args: str, cwd: Path | None = None) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "rigor", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=300,
    )


def generate_harness(workspace: Path, exploration: str, validation: str, label: str) -> Path:
    harness = workspace / "harness.py"
    completed = run_cli(
        "gen-scaffold",
        "--exploration-data", exploration,
        "--validation-data", validation,
        "--reps", "3",
        "--folds", "10",
        "--label", label,
        "--out", str(harness),
    )
    assert completed.returncode == 0, completed.stderr
    return harness


def prepare_workspace(tmp_path: Path, fixture_name: str, label: str) -> Path:
    """Workspace with relative-path harness, implementation, runtime, and data."""
    workspace = tmp_path / "workspace"
    workspace.mkdir()
    write_dataset(workspace / "exploration.csv", 40, start=0)
    write_dataset(workspace / "validation.csv", 40, start=1000)
    generate_harness(workspace, "exploration.csv", "validation.csv", label)
    shutil.copy(FIXTURE_DIR / f"{fixture_name}.py", workspace / "implementation.py")
    shutil.copy(RUNTIME_SOURCE, workspace / "verified_stats.py")
    return workspace


def run_harness(workspace: Path, phase: str = "full") -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "harness.py", "--phase", phase],
        capture_output=True,
        text=True,
        cwd=workspace,
        timeout=300,
    )


def parse_sentinel(stdout: str) -> dict:
    lines = [line for line in stdout.splitlines() if line.startswith(RESULT_PREFIX)]
    assert lines, f"no result line in: {stdout!r}"
    return json.loads(lines[-1][len(RESULT_PREFIX) :])


def run_session(tmp_path: Path, fixture_names: list[str], labels: list[str] | None = None):
    """Drive `rigor run-session` over the given fixtures; returns (proc, trace records, workdir)."""
    labels = labels or fixture_names
    exploration = tmp_path / "exploration.csv"
    validation = tmp_path / "validation.csv"
    write_dataset(exploration, 40, start=0)
    write_dataset(validation, 40, start=1000)

    manifest = tmp_path / "ideas.jsonl"
    manifest.write_text(
        "\n".join(
            json.dumps({"label": label, "path": str(FIXTURE_DIR / f"{name}.py")})
            for label, name in zip(labels, fixture_names)
        )
        + "\n",
        encoding="utf-8",
    )

    workdir = tmp_path / "work"
    trace_path = tmp_path / "trace.jsonl"
    completed = run_cli(
        "run-session",
        "--ideas", str(manifest),
        "--exploration-data", str(exploration),
        "--validation-data", str(validation),
        "--reps", "3",
        "--folds", "10",
        "--workdir", str(workdir),
        "--support-file", str(RUNTIME_SOURCE),
        "--trace-out", str(trace_path),
        "--timeout", "120",
    )
    records = []
    if trace_path.exists():
        records = [
            json.loads(line) for line in trace_path.read_text(encoding="utf-8").splitlines()
        ]
    return completed, records, workdir
