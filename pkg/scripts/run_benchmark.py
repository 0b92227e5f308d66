#!/usr/bin/env python3
"""Run the full Monte Carlo benchmark at its default configuration and check
it against the reference values (exit 1 on a miss).

Equivalent to: rigor simulate --check [--csv benchmark.csv]
"""

import sys

from rigor.cli import main

if __name__ == "__main__":
    sys.exit(main(["simulate", "--check", *sys.argv[1:]]))
