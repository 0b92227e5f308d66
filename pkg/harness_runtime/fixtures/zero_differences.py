# Fixture: both models score identically on every fold, so every paired
# difference is exactly zero and the degenerate rule applies.


def optimize(data):
    return {"tag": "candidate"}


def get_baseline(data):
    return {"tag": "baseline"}


def evaluate_model(model, rows):
    return 1.0
