# mutant: substitute_evaluator
# Generated experiment harness -- do not edit.
#
# The harness, not the implementation module, decides which dataset each
# phase may read and which statistical test certifies the outcome. The
# implementation plugs in through three fixed entry points: optimize,
# get_baseline, evaluate_model.
import argparse
import csv
import json
import pickle
import sys
import zlib

import implementation
from verified_stats import execute_paired_ttest

IDEA_LABEL = 'reference-idea'
ARTIFACT_CACHE = ".harness_artifact.pkl"


def _maybe_float(text):
    try:
        return float(text)
    except (TypeError, ValueError):
        return text


def _load_rows(path):
    with open(path, newline="") as fh:
        return [
            dict((key, _maybe_float(value)) for key, value in row.items())
            for row in csv.DictReader(fh)
        ]


def run_exploration():
    # Exploration phase: only the exploration dataset is readable here.
    data = _load_rows('data/exploration.csv')
    return implementation.optimize(data)


def compute_baseline():
    # The baseline artifact is also built from exploration data only.
    data = _load_rows('data/exploration.csv')
    return implementation.get_baseline(data)


def run_validation(artifact, baseline):
    # Validation phase: the held-out dataset is referenced here and nowhere
    # else, and the pinned test below cannot be swapped out by the
    # implementation module.
    data = _load_rows('data/validation.csv')
    return execute_paired_ttest(
        data,
        artifact,
        baseline,
        (lambda model, rows: 1.0),
        reps=3,
        folds=10,
        seed=zlib.crc32(IDEA_LABEL.encode("utf-8")),
    )


def main(argv=None):
    parser = argparse.ArgumentParser(description="experiment harness")
    parser.add_argument("--phase", choices=("explore", "validate", "full"), default="full")
    args = parser.parse_args(argv)

    artifact = None
    if args.phase in ("explore", "full"):
        artifact = run_exploration()
    if args.phase == "explore":
        with open(ARTIFACT_CACHE, "wb") as fh:
            pickle.dump(artifact, fh)
        return 0
    if args.phase == "validate":
        with open(ARTIFACT_CACHE, "rb") as fh:
            artifact = pickle.load(fh)

    baseline = compute_baseline()
    p_value = run_validation(artifact, baseline)
    print("RIGOR_RESULT " + json.dumps(dict(p_value=p_value, n_pairs=3 * 10)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
