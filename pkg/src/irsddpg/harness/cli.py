"""Command-line entry point: ``irsddpg {train,eval,baseline,sweep,inspect}``.

Exit status is 0 on success, 1 on a usage error and 2 when the command fails
at run time.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from irsddpg import __version__
from irsddpg.agents.dcb import run_cb_training
from irsddpg.agents.drl import run_rl_training
from irsddpg.agents.evaluation import evaluate_policy
from irsddpg.core.channels import sample_channel_list
from irsddpg.errors import IrsDdpgError, ShapeMismatchError
from irsddpg.harness.baselines import run_baseline_random_mrt
from irsddpg.harness.config import ExperimentConfig, load_config
from irsddpg.harness.metrics import MetricsWriter
from irsddpg.harness.sweeps import (
    read_reference_csv,
    run_nr_sweep,
    run_quantization_sweep,
    run_snr_sweep,
    write_table,
)
from irsddpg.neural import build_dcb_actor, build_drl_actor, load_checkpoint, read_header, save_checkpoint


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="irsddpg", description="IRS-assisted MU-MIMO sum-rate learners")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a learner and write checkpoints and metrics")
    p.add_argument("--algo", choices=("dcb", "drl"), required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="evaluate a checkpointed policy on the held-out set")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--config", required=True)

    p = sub.add_parser("baseline", help="RandomIRS-MRT summary statistics")
    p.add_argument("--config", required=True)
    p.add_argument("--realizations", type=int, required=True)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("sweep", help="SNR, N_r or phase-quantization sweep")
    p.add_argument("kind", choices=("snr", "nr", "quant"))
    p.add_argument("--config", required=True)
    p.add_argument("--algo", choices=("dcb", "drl", "random_mrt"))
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", help="comma-separated SNR values (dB) or N_r values")
    p.add_argument("--levels", type=_int_list, help="comma-separated quantization levels")
    p.add_argument("--checkpoint", help="trained DCB checkpoint (quant sweep)")
    p.add_argument("--reference", help="external snr_db,sum_rate CSV merged into the SNR table")
    p.add_argument("--out", help="CSV output path (default: print to stdout)")

    p = sub.add_parser("inspect", help="print a checkpoint header")
    p.add_argument("--checkpoint", required=True)
    return parser


def _policy_metadata(exp: ExperimentConfig, algo: str, seed: int, which: str, report) -> dict:
    return {
        "algo": algo, "seed": seed, "version": __version__, "checkpoint": which,
        "config": exp.to_text(), "eval_mean": None if report is None else report.mean,
        "eval_std": None if report is None else report.std,
    }


def cmd_train(args) -> int:
    exp = load_config(args.config, os.environ).replace(algo=args.algo, seed=args.seed, out=args.out)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(exp.to_text(), encoding="utf-8")
    (out / "provenance.json").write_text(json.dumps(
        {"algo": args.algo, "seed": args.seed, "version": __version__, "config_file": "config.txt"},
        indent=2, sort_keys=True) + "\n", encoding="utf-8")
    cfg, acfg = exp.system(), exp.agent()
    writer = MetricsWriter(out / "metrics.csv", fresh=True)
    try:
        run = run_cb_training if args.algo == "dcb" else run_rl_training
        result = run(cfg, acfg, args.seed, hooks=[writer], run_id=f"{args.algo}-{args.seed}")
    finally:
        writer.close()
    agent = result.agent
    save_checkpoint(out / "final.ckpt", agent.networks(), agent.optimizers(),
                    _policy_metadata(exp, args.algo, args.seed, "final", result.final_eval))
    best = dict(agent.networks(), actor=result.best_actor)
    save_checkpoint(out / "best.ckpt", best, None,
                    _policy_metadata(exp, args.algo, args.seed, "best", result.best_eval))
    print(f"steps={result.steps_run} best_eval={result.best_eval.mean:.6f} final_eval={result.final_eval.mean:.6f}")
    return 0


def _load_policy(path, exp: ExperimentConfig):
    ckpt = load_checkpoint(path)
    algo = ckpt.metadata.get("algo")
    if algo not in ("dcb", "drl") or "actor" not in ckpt.networks:
        raise IrsDdpgError(f"{path}: not a policy checkpoint")
    cfg = exp.system()
    builder = build_dcb_actor if algo == "dcb" else build_drl_actor
    actor = ckpt.networks["actor"]
    if actor.spec != builder(cfg, exp.hidden_scale):
        raise ShapeMismatchError(f"{path}: policy architecture does not match the configured system")
    return algo, actor, cfg


def cmd_eval(args) -> int:
    exp = load_config(args.config, os.environ)
    algo, actor, cfg = _load_policy(args.checkpoint, exp)
    channels = sample_channel_list(cfg, exp.eval_size, exp.eval_seed)
    report = evaluate_policy(actor, "cb" if algo == "dcb" else "drl", channels, cfg, episode_len=exp.T)
    print(f"algo={algo} mean={report.mean:.17g} std={report.std:.17g} n={len(channels)}")
    return 0


def cmd_baseline(args) -> int:
    exp = load_config(args.config, os.environ)
    seed = exp.seed if args.seed is None else args.seed
    summary = run_baseline_random_mrt(exp.system(), args.realizations, np.random.default_rng(seed))
    print(f"random_mrt mean={summary.mean:.17g} std={summary.std:.17g} n={summary.n}")
    return 0


def cmd_sweep(args) -> int:
    exp = load_config(args.config, os.environ)
    seed = exp.seed if args.seed is None else args.seed
    algo = args.algo or exp.algo
    if args.kind == "snr":
        grid = _float_list(args.grid) if args.grid else None
        reference = read_reference_csv(args.reference) if args.reference else None
        rows = run_snr_sweep(exp, algo, grid, seed, reference)
    elif args.kind == "nr":
        rows = run_nr_sweep(exp, algo, _int_list(args.grid) if args.grid else None, seed, exp.snr_db)
    else:
        if not args.checkpoint:
            raise UsageError("sweep quant: error: --checkpoint is required")
        p_algo, actor, cfg = _load_policy(args.checkpoint, exp)
        if p_algo != "dcb":
            raise IrsDdpgError("the quantization sweep needs a DCB checkpoint")
        channels = sample_channel_list(cfg, exp.eval_size, exp.eval_seed)
        rows = run_quantization_sweep(actor, cfg, args.levels or list(exp.quant_levels), channels)
    if args.out:
        write_table(rows, args.out)
    else:
        for row in rows:
            print(",".join(f"{k}={v}" for k, v in row.items()))
    return 0


def cmd_inspect(args) -> int:
    print(json.dumps(read_header(args.checkpoint), indent=2, sort_keys=True))
    return 0


COMMANDS = {"train": cmd_train, "eval": cmd_eval, "baseline": cmd_baseline, "sweep": cmd_sweep,
            "inspect": cmd_inspect}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (IrsDdpgError, OSError, ValueError) as exc:
        print(f"irsddpg: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
