#!/usr/bin/env python3
"""Optimality-gap study on tiny systems (4 antennas, 2 QPSK users) where the
exhaustive oracle is tractable: per-trial MSE objectives of the ADMM
precoder, quantized zero-forcing, and the global optimum. Writes
oracle_gap.csv."""
import argparse
import tempfile
from pathlib import Path

from onebit_precoding.cli import main

CONFIG = """\
[experiment]
kind = oracle_gap
trials = {trials}
base_seed = {seed}

[system]
num_users = 2
num_antennas = 4

[sweep]
snr_grid_db = 0

[admm]
max_iters = 250
"""


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/oracle_gap")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=1000)
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "oracle_gap.ini"
        cfg.write_text(CONFIG.format(seed=args.seed, trials=args.trials))
        raise SystemExit(main(["run", str(cfg), "--out", args.out]))
