#!/usr/bin/env python3
"""End-to-end demo: a batch of ideas under LORD++ accounting.

Generates a small exploration/validation split, then drives the shipped
implementation fixtures (an honest improvement, a null effect, a crasher,
a flatline, and the leakage probe) through generated harnesses with the
real statistics runtime. Requires the harness_runtime package sources to
sit next to this repository checkout.
"""

import json
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from rigor.cli import main  # noqa: E402

RUNTIME = REPO_ROOT / "harness_runtime" / "src" / "verified_stats.py"
FIXTURES = REPO_ROOT / "harness_runtime" / "fixtures"

IDEAS = [
    ("tuned-kernel", "honest_improvement"),
    ("cosmetic-change", "no_effect"),
    ("broken-refactor", "crash_on_explore"),
    ("identical-twin", "zero_differences"),
    ("leak-check", "leakage_probe"),
]


def write_dataset(path: Path, n_rows: int, start: int) -> None:
    rows = "\n".join(f"{start + i},{(start + i) % 7 + 0.5}" for i in range(n_rows))
    path.write_text("x,y\n" + rows + "\n", encoding="utf-8")


if __name__ == "__main__":
    if not RUNTIME.exists():
        sys.exit(f"statistics runtime not found at {RUNTIME}; build harness_runtime first")
    with tempfile.TemporaryDirectory(prefix="rigor_demo_") as tmp:
        tmp_path = Path(tmp)
        write_dataset(tmp_path / "exploration.csv", 40, start=0)
        write_dataset(tmp_path / "validation.csv", 40, start=1000)
        manifest = tmp_path / "ideas.jsonl"
        manifest.write_text(
            "\n".join(
                json.dumps({"label": label, "path": str(FIXTURES / f"{name}.py")})
                for label, name in IDEAS
            )
            + "\n",
            encoding="utf-8",
        )
        sys.exit(
            main(
                [
                    "run-session",
                    "--ideas", str(manifest),
                    "--exploration-data", str(tmp_path / "exploration.csv"),
                    "--validation-data", str(tmp_path / "validation.csv"),
                    "--workdir", str(tmp_path / "work"),
                    "--support-file", str(RUNTIME),
                    "--trace-out", str(Path.cwd() / "demo_trace.jsonl"),
                ]
            )
        )
