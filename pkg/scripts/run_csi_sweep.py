#!/usr/bin/env python3
"""BER under imperfect channel knowledge: 128 antennas, 16 QPSK users at
SNR 0 dB, sweeping the estimation-error weight delta for both Gaussian and
uniform error matrices. Writes csi_sweep.csv."""
import argparse
import tempfile
from pathlib import Path

from onebit_precoding.cli import main

CONFIG = """\
[experiment]
kind = csi_sweep
trials = {trials}
base_seed = {seed}

[system]
num_users = 16
num_antennas = 128

[sweep]
snr_grid_db = 0
delta_grid = 0 0.1 0.2 0.3 0.4 0.5
csi_error_models = gaussian uniform
precoders = admm zf_q zfi
num_symbol_vectors = 10
"""


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/csi_sweep")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=300)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "csi_sweep.ini"
        cfg.write_text(CONFIG.format(seed=args.seed, trials=args.trials))
        argv = ["run", str(cfg), "--out", args.out]
        if args.workers is not None:
            argv += ["--workers", str(args.workers)]
        raise SystemExit(main(argv))
