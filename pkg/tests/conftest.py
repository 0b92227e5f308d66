"""Shared fixtures: a stand-in statistics runtime for child processes plus
rigged implementation sources with known behavior.

The stand-in keeps the harness call surface (execute_paired_ttest) but
computes the one-sided tail probability by numeric quadrature of the t
density, so executor tests can pin expected p-values against an
independent oracle without the real runtime package being installed.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from rigor.protocols import default_lord_config
from rigor.scaffold import DataContract, StatisticalTestSpec, generate_scaffold

REPO_ROOT = Path(__file__).resolve().parent.parent

STANDIN_VERIFIED_STATS = '''\
import math


def _t_pdf(x, df):
    c = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(c - ((df + 1) / 2) * math.log(1 + x * x / df))


def _t_sf(t, df):
    if t < 0:
        return 1.0 - _t_sf(-t, df)
    # Simpson rule over [t, t+60]; for t >= 0 the tail beyond is negligible
    # at these df.
    n = 60000
    h = 60.0 / n
    total = _t_pdf(t, df) + _t_pdf(t + 60.0, df)
    for i in range(1, n):
        total += (4 if i % 2 else 2) * _t_pdf(t + i * h, df)
    return total * h / 3.0


def execute_paired_ttest(data, artifact, baseline, evaluate, reps, folds, seed):
    diffs = []
    for _ in range(reps * folds):
        diffs.append(evaluate(artifact, data) - evaluate(baseline, data))
    n = len(diffs)
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        return 0.0 if mean > 0 else 1.0
    t = mean / (sd / math.sqrt(n))
    return min(max(_t_sf(t, n - 1), 0.0), 1.0)
'''

# Fixed difference vector (30 draws, rounded) whose one-sided paired-t
# p-value was computed once with an independent CDF and pinned below.
FIXTURE_DIFFS = [
    0.029034, -0.039104, 0.006861, -0.026421, -0.003132, -0.002721, -0.029737,
    -0.010943, 0.001969, 0.111321, 0.034741, -0.055118, 0.002533, 0.088094,
    0.000842, -0.029536, 0.047103, 0.042218, 0.050519, 0.008913, 0.036678,
    0.015727, 0.043881, -0.026341, 0.052681, 0.028962, 0.022286, 0.003946,
    0.018385, 0.047044,
]
FIXTURE_DIFFS_P_VALUE = 0.013583237770572019  # scipy.stats.t.sf(t, 29), pinned


def rigged_implementation(diffs) -> str:
    """Implementation whose candidate-vs-baseline differences are exactly `diffs`."""
    return f'''\
DIFFS = {list(diffs)!r}
_counter = [0]


def optimize(data):
    return {{"model": "candidate"}}


def get_baseline(data):
    return {{"model": "baseline"}}


def evaluate_model(model, rows):
    if model["model"] == "candidate":
        value = DIFFS[_counter[0] % len(DIFFS)]
        _counter[0] += 1
        return value
    return 0.0
'''


CRASHING_IMPLEMENTATION = '''\
def optimize(data):
    raise ValueError("exploration blew up")


def get_baseline(data):
    return None


def evaluate_model(model, rows):
    return 0.0
'''


def sleeping_implementation(seconds: float) -> str:
    return f'''\
import time


def optimize(data):
    time.sleep({seconds})
    return None


def get_baseline(data):
    return None


def evaluate_model(model, rows):
    return 0.0
'''


def exiting_implementation(lines: list[str], exit_code: int = 0) -> str:
    """Prints the given lines from inside optimize, then hard-exits."""
    return f'''\
import os
import sys


def optimize(data):
    for line in {lines!r}:
        print(line)
    sys.stdout.flush()
    os._exit({exit_code})


def get_baseline(data):
    return None


def evaluate_model(model, rows):
    return 0.0
'''


def write_csv(path: Path, n_rows: int, start: int = 0) -> None:
    rows = "\n".join(f"{start + i},{(start + i) * 2}" for i in range(n_rows))
    path.write_text("x,y\n" + rows + "\n", encoding="utf-8")


@pytest.fixture()
def tmp_contract(tmp_path):
    exploration = tmp_path / "exploration.csv"
    validation = tmp_path / "validation.csv"
    write_csv(exploration, 40)
    write_csv(validation, 40, start=1000)
    return DataContract(str(exploration), str(validation))


@pytest.fixture()
def default_scaffold(tmp_contract):
    return generate_scaffold(tmp_contract, StatisticalTestSpec(reps=3, folds=10), "fixture-idea")


@pytest.fixture(scope="session")
def lord_config():
    return default_lord_config()
