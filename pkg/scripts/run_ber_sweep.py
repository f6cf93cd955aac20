#!/usr/bin/env python3
"""Large-system BER-vs-SNR sweep: 128 antennas, 20 QPSK users, comparing the
ADMM precoder against quantized zero-forcing and infinite-resolution
zero-forcing. Writes ber_sweep.csv with Wilson 95% intervals per point."""
import argparse
import tempfile
from pathlib import Path

from onebit_precoding.cli import main

CONFIG = """\
[experiment]
kind = ber_sweep
trials = {trials}
base_seed = {seed}

[system]
num_users = 20
num_antennas = 128

[sweep]
snr_grid_db = -10 -5 0 2 4 6 8 10
precoders = admm zf_q mrt_q zfi
num_symbol_vectors = 10
"""


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/ber_sweep")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "ber_sweep.ini"
        cfg.write_text(CONFIG.format(seed=args.seed, trials=args.trials))
        argv = ["run", str(cfg), "--out", args.out]
        if args.workers is not None:
            argv += ["--workers", str(args.workers)]
        raise SystemExit(main(argv))
