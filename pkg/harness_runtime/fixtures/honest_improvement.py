# Fixture: a genuine, stable improvement. Candidate scores sit a fixed
# margin above baseline with small deterministic per-fold noise, so the
# paired test lands far below any sane threshold.
import hashlib


def _noise(tag, rows):
    key = tag + "|" + ",".join(str(row.get("x", "")) for row in rows)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") / 2**32


def _base_score(rows):
    values = [row["y"] for row in rows if isinstance(row.get("y"), float)]
    return sum(values) / max(len(values), 1)


def optimize(data):
    return {"tag": "candidate", "offset": 0.04}


def get_baseline(data):
    return {"tag": "baseline", "offset": 0.0}


def evaluate_model(model, rows):
    return _base_score(rows) + model["offset"] + 0.005 * _noise(model["tag"], rows)
