#!/usr/bin/env python3
"""Per-solve and per-iteration runtime of the ADMM precoder as the antenna
count grows, with the user count fixed at 8. Writes runtime_scaling.csv;
mean_iter_s should scale roughly quadratically in num_antennas."""
import argparse
import tempfile
from pathlib import Path

from onebit_precoding.cli import main

CONFIG = """\
[experiment]
kind = runtime_scaling
trials = {trials}
base_seed = {seed}

[system]
num_users = 8
num_antennas = 512

[sweep]
snr_grid_db = 0
antenna_grid = 16 32 64 128 256 512
"""


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/runtime_scaling")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=50)
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "runtime_scaling.ini"
        cfg.write_text(CONFIG.format(seed=args.seed, trials=args.trials))
        raise SystemExit(main(["run", str(cfg), "--out", args.out]))
