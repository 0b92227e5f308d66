# Fixture: records every row id each entry point is shown, so a test can
# prove that exploration-phase code never receives validation rows.
import json

_seen = {"optimize": [], "get_baseline": [], "evaluate_model": []}


def _record(entry, rows):
    _seen[entry].extend(row.get("x") for row in rows)
    with open(".leakage_probe.json", "w", encoding="utf-8") as fh:
        json.dump(_seen, fh)


def optimize(data):
    _record("optimize", data)
    return {"tag": "probe"}


def get_baseline(data):
    _record("get_baseline", data)
    return {"tag": "baseline"}


def evaluate_model(model, rows):
    _record("evaluate_model", rows)
    return 0.0
