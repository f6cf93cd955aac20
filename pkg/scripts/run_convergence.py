#!/usr/bin/env python3
"""Trace the solver's iterate gaps and augmented Lagrangian for a 16-antenna,
4-user QPSK system at SNR -10 / 0 / 10 dB. Writes convergence.csv suitable
for plotting delta_v / delta_u / lagrangian against the iteration index."""
import argparse
import tempfile
from pathlib import Path

from onebit_precoding.cli import main

CONFIG = """\
[experiment]
kind = convergence
base_seed = {seed}

[system]
num_users = 4
num_antennas = 16

[sweep]
snr_grid_db = -10 0 10

[admm]
max_iters = 300
"""


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/convergence")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "convergence.ini"
        cfg.write_text(CONFIG.format(seed=args.seed))
        raise SystemExit(main(["run", str(cfg), "--out", args.out]))
