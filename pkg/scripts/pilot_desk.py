"""Pilot runs that fix the baseline-beating thresholds used by the acceptance suite.

Runs the desk-scale DCB and DRL configurations on pilot seeds (disjoint from
the acceptance seeds) and writes tests/pilot_thresholds.json. The threshold
for each learner is half of the pilot's mean margin over RandomIRS-MRT, but
never below zero, so a learner must at least beat the baseline.
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from irsddpg import __version__
from irsddpg.harness.desk import run_desk, trailing_mean

PILOT_SEEDS = (101, 102, 103)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "pilot_thresholds.json"))
    args = parser.parse_args(argv)
    record = {"version": __version__, "seeds": list(PILOT_SEEDS), "rule": "threshold = max(0, 0.5 * mean pilot margin)"}
    for algo in ("dcb", "drl"):
        runs = [run_desk(algo, s) for s in PILOT_SEEDS]
        margins = [r.margin for r in runs]
        with warnings.catch_warnings():
            # steps before the first training update are nan in every run
            warnings.simplefilter("ignore", RuntimeWarning)
            losses = np.nanmean([r.critic_losses for r in runs], axis=0)
        record[algo] = {
            "final_means": [r.final_mean for r in runs],
            "baseline_means": [r.baseline_mean for r in runs],
            "margins": margins,
            "mean_margin": float(np.mean(margins)),
            "threshold": max(0.0, 0.5 * float(np.mean(margins))),
            "critic_loss_ma_step500": trailing_mean(losses, 500),
            "critic_loss_ma_end": trailing_mean(losses, losses.size - 1),
            "seconds": [r.seconds for r in runs],
        }
        print(algo, json.dumps(record[algo]), flush=True)
    Path(args.out).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
