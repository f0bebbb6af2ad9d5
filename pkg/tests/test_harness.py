import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irsddpg.core import ChannelSet, SystemConfig, sample_channel_list
from irsddpg.errors import ConfigError
from irsddpg.harness import (
    ExperimentConfig,
    MetricsWriter,
    emit_metrics,
    normalize_curve,
    normalized_path,
    parse_config,
    read_metrics,
    regime_label,
    run_baseline_random_mrt,
    run_nr_sweep,
    run_quantization_sweep,
    run_snr_sweep,
)
from irsddpg.harness.cli import main
from irsddpg.agents import DcbAgent, AgentConfig
from irsddpg.records import METRIC_FIELDS, MetricsRecord

TINY_TEXT = """\
# small enough to train in a second
K=2
Nt=2
Ns=1
Nr=2
N=3
steps=30
episodes=3
T=5
batch=4
hidden_scale=1
eval_size=5
eval_interval=10
"""

finite = st.floats(allow_nan=False, allow_infinity=False)


# --- configuration ----------------------------------------------------------

def test_first_experiment_setup_parses():
    cfg = parse_config("K=10\nNt=2\nNs=2\nNr=30\nN=50\nsnr_db=10")
    system = cfg.system()
    assert (system.K, system.N_t, system.N_s, system.N_r, system.N) == (10, 2, 2, 30, 50)
    assert system.omega == pytest.approx(10.0, rel=1e-15) and system.noise_var == 1.0


def test_type_error_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config("batch=sixteen")
    assert info.value.line == 1
    with pytest.raises(ConfigError) as info:
        parse_config("# header\n\nK=2\nNt=two\n")
    assert info.value.line == 4


def test_empty_file_gives_table_defaults():
    cfg = parse_config("")
    assert cfg == ExperimentConfig()
    a = cfg.agent()
    assert (a.explore_var, a.lr_actor, a.lr_critic, a.batch_size, a.gamma, a.tau) == (0.05, 0.001, 0.001, 16, 0.99, 0.005)
    assert (a.steps, a.episodes, a.episode_len, a.eval_size) == (100_000, 5_000, 20, 100)
    assert cfg.snr_list == (-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0)
    assert cfg.quant_levels == (2, 4, 8, 16) and cfg.nr_list[0] == 8 and cfg.nr_list[-1] == 30


@pytest.mark.parametrize("text, line", [
    ("K=2\nbogus=1", 2),
    ("K=2\nNt", 2),
    ("Nr=", 1),
    ("algo=ppo", 1),
])
def test_rejected_lines(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line


def test_missing_dimension_message():
    with pytest.raises(ConfigError, match="missing required dimension Nr"):
        parse_config("Nr=")


def test_inconsistent_system_rejected():
    with pytest.raises(ConfigError):
        parse_config("K=0")
    with pytest.raises(ConfigError):
        parse_config("gamma=1.5")


def test_environment_overrides_win():
    cfg = parse_config("Nr=30\nsnr_db=10", environ={"IRSDDPG_NR": "16", "IRSDDPG_SNR_DB": "-5", "OTHER": "x"})
    assert cfg.Nr == 16 and cfg.snr_db == -5.0
    with pytest.raises(ConfigError, match="IRSDDPG_BATCH"):
        parse_config("", environ={"IRSDDPG_BATCH": "many"})


def test_comments_and_whitespace():
    cfg = parse_config("  K = 4   # users\n# Nr=3\nwall_budget=none\nout=runs/x\n")
    assert cfg.K == 4 and cfg.Nr == 30 and cfg.wall_budget is None and cfg.out == "runs/x"


@settings(max_examples=40, deadline=None)
@given(K=st.integers(1, 12), snr=st.floats(-40, 40, allow_nan=False), lr=st.floats(0, 1),
       grid=st.lists(st.integers(1, 64), min_size=1, max_size=5), budget=st.none() | st.floats(0.1, 1e4))
def test_to_text_round_trip(K, snr, lr, grid, budget):
    cfg = ExperimentConfig(K=K, snr_db=snr, lr_actor=lr, nr_list=tuple(grid), wall_budget=budget)
    assert parse_config(cfg.to_text()) == cfg


# --- metrics ----------------------------------------------------------------

def test_one_record_two_files(tmp_path):
    path = tmp_path / "m.csv"
    rec = MetricsRecord("r", 0, critic_loss=0.5, eval_mean=3.25, eval_std=0.1, seed=4)
    data, norm = emit_metrics([rec], path)
    assert data == path and norm == normalized_path(path) == tmp_path / "m_normalized.csv"
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(METRIC_FIELDS) == "run_id,step,critic_loss,actor_loss,eval_mean,eval_std,wall_seconds,seed"
    assert len(lines) == 2 and len(norm.read_text().splitlines()) == 2
    assert read_metrics(path) == [rec]


@settings(max_examples=40, deadline=None)
@given(vals=st.lists(st.tuples(finite, st.none() | finite), min_size=1, max_size=6))
def test_csv_round_trip_is_lossless(tmp_path_factory, vals):
    path = tmp_path_factory.mktemp("m") / "m.csv"
    records = [MetricsRecord("run", i, critic_loss=a, eval_mean=b, seed=i) for i, (a, b) in enumerate(vals)]
    emit_metrics(records, path, fresh=True)
    assert read_metrics(path) == records


def test_normalized_curve_peaks_at_one(tmp_path):
    means = [2.0, 7.3, 5.1, 7.299999999999999]
    records = [MetricsRecord("a", i, eval_mean=m) for i, m in enumerate(means)]
    records += [MetricsRecord("a", 9), MetricsRecord("b", 0, eval_mean=0.3)]
    rows = normalize_curve(records)
    a = [r[3] for r in rows if r[0] == "a"]
    assert max(a) == 1.0 and int(np.argmax(a)) == int(np.argmax(means))
    assert [r[3] for r in rows if r[0] == "b"] == [1.0]


def test_writer_appends_under_one_header(tmp_path):
    path = tmp_path / "m.csv"
    with MetricsWriter(path) as w:
        w(MetricsRecord("a", 0, eval_mean=1.0))
    with MetricsWriter(path) as w:
        w(MetricsRecord("b", 0, eval_mean=2.0))
    assert [r.run_id for r in read_metrics(path)] == ["a", "b"]
    assert path.read_text().count("run_id") == 1
    with MetricsWriter(path, fresh=True) as w:
        pass
    assert read_metrics(path) == []


def test_unwritable_path_names_file(tmp_path):
    target = tmp_path / "missing" / "m.csv"
    with pytest.raises(OSError, match="missing"):
        MetricsWriter(target)


# --- baseline and sweeps ----------------------------------------------------

def test_baseline_scalar_case():
    cfg = SystemConfig(K=1, N_t=1, N_s=1, N_r=1, N=1, omega=10.0)
    ones = ChannelSet(h_ui=np.ones((1, 1, 1), dtype=complex), h_ib=np.ones((1, 1), dtype=complex))
    summary = run_baseline_random_mrt(cfg, 5, np.random.default_rng(0), [ones] * 5)
    # one element: |g| = 1 whatever the random phase, and MRT puts all power on it
    np.testing.assert_allclose(summary.per_realization, np.log2(11.0), rtol=1e-12)
    assert summary.std < 1e-12


def test_baseline_is_seeded():
    cfg = SystemConfig(K=2, N_t=2, N_s=1, N_r=4, N=8)
    a = run_baseline_random_mrt(cfg, 20, np.random.default_rng(5))
    b = run_baseline_random_mrt(cfg, 20, np.random.default_rng(5))
    assert a.mean == b.mean and a.std == b.std and np.array_equal(a.per_realization, b.per_realization)


def test_baseline_stable_across_seed_blocks():
    cfg = SystemConfig(K=2, N_t=2, N_s=1, N_r=4, N=8)
    m1 = run_baseline_random_mrt(cfg, 1000, np.random.default_rng(1)).mean
    m2 = run_baseline_random_mrt(cfg, 1000, np.random.default_rng(2)).mean
    assert abs(m1 - m2) / m1 < 0.02


def test_baseline_length_check():
    cfg = SystemConfig(K=1, N_t=1, N_s=1, N_r=1, N=2)
    with pytest.raises(ValueError):
        run_baseline_random_mrt(cfg, 3, np.random.default_rng(0), sample_channel_list(cfg, 2, 0))


def test_snr_sweep_baseline_monotone_and_ordered():
    exp = parse_config(TINY_TEXT + "eval_size=200\n")
    grid = [10.0, -15.0, -5.0, 0.0, 5.0, 15.0]
    rows = run_snr_sweep(exp, "random_mrt", grid, seed=3, reference={10.0: 9.5})
    assert [r["snr_db"] for r in rows] == grid
    assert rows[0]["omega"] == pytest.approx(10.0, rel=1e-15)
    assert rows[0]["reference"] == 9.5 and rows[1]["reference"] is None
    by_snr = sorted(rows, key=lambda r: r["snr_db"])
    means = [r["mean"] for r in by_snr]
    assert all(b >= a for a, b in zip(means, means[1:]))


def test_nr_sweep_baseline_increases_and_labels():
    exp = parse_config(TINY_TEXT + "K=4\nNs=2\neval_size=200\n")
    rows = run_nr_sweep(exp, "random_mrt", [2, 6, 8, 16], seed=3)
    assert [r["n_r"] for r in rows] == [2, 6, 8, 16]
    assert [r["regime"] for r in rows] == ["critical", "intermediate", "favorable", "favorable"]
    assert [r["ratio"] for r in rows] == [0.25, 0.75, 1.0, 2.0]
    means = [r["mean"] for r in rows]
    assert all(b > a for a, b in zip(means, means[1:]))


def test_regime_labels_at_full_scale():
    assert regime_label(8, 10, 2) == "critical"
    assert regime_label(16, 10, 2) == "intermediate"
    assert regime_label(30, 10, 2) == "favorable"


def test_learner_sweep_row_per_point():
    exp = parse_config(TINY_TEXT)
    rows = run_snr_sweep(exp, "dcb", [0.0, 10.0], seed=1)
    assert [r["algo"] for r in rows] == ["dcb", "dcb"] and all(np.isfinite(r["mean"]) for r in rows)
    with pytest.raises(ValueError):
        run_snr_sweep(exp, "ppo", [0.0], seed=1)


def test_quantization_sweep_limits():
    cfg = SystemConfig(K=2, N_t=2, N_s=1, N_r=2, N=3, omega=10.0)
    actor = DcbAgent.create(cfg, AgentConfig(hidden_scale=1), np.random.default_rng(0)).actor
    channels = sample_channel_list(cfg, 30, 2)
    levels = [2, 8, 2 ** 8, 2 ** 14, 2 ** 20]
    rows = run_quantization_sweep(actor, cfg, levels, channels)
    assert [r["levels"] for r in rows] == levels
    assert len({r["continuous"] for r in rows}) == 1
    loss = [abs(r["degradation"]) for r in rows]
    assert all(b < a for a, b in zip(loss[1:], loss[2:]))
    assert loss[-1] < 1e-8


# --- command line -----------------------------------------------------------

@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY_TEXT)
    return path


def test_usage_errors_exit_one(tiny_config, capsys):
    assert main([]) == 1
    assert main(["train", "--algo", "dcb", "--seed", "1", "--out", "x"]) == 1
    assert main(["train", "--algo", "dcb", "--config", str(tiny_config), "--seed", "1", "--out", "x", "--bogus"]) == 1
    assert main(["sweep", "quant", "--config", str(tiny_config)]) == 1
    assert "usage" in capsys.readouterr().err


def test_runtime_errors_exit_two(tmp_path, tiny_config):
    assert main(["baseline", "--config", str(tmp_path / "nope.cfg"), "--realizations", "3"]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("batch=sixteen\n")
    assert main(["baseline", "--config", str(bad), "--realizations", "3"]) == 2
    junk = tmp_path / "junk.ckpt"
    junk.write_bytes(b"not a checkpoint")
    assert main(["inspect", "--checkpoint", str(junk)]) == 2


@pytest.mark.parametrize("algo", ["dcb", "drl"])
def test_train_eval_inspect(algo, tmp_path, tiny_config, capsys):
    out = tmp_path / "run"
    assert main(["train", "--algo", algo, "--config", str(tiny_config), "--seed", "7", "--out", str(out)]) == 0
    for name in ("config.txt", "provenance.json", "metrics.csv", "metrics_normalized.csv", "final.ckpt", "best.ckpt"):
        assert (out / name).is_file(), name
    resolved = parse_config((out / "config.txt").read_text())
    assert resolved.algo == algo and resolved.seed == 7 and resolved.K == 2
    prov = json.loads((out / "provenance.json").read_text())
    assert prov["seed"] == 7 and prov["version"] and prov["algo"] == algo
    records = read_metrics(out / "metrics.csv")
    assert len(records) == 30 if algo == "dcb" else len(records) == 15
    assert [r.step for r in records] == list(range(len(records)))
    capsys.readouterr()

    assert main(["eval", "--checkpoint", str(out / "best.ckpt"), "--config", str(tiny_config)]) == 0
    assert f"algo={algo}" in capsys.readouterr().out
    assert main(["inspect", "--checkpoint", str(out / "final.ckpt")]) == 0
    header = json.loads(capsys.readouterr().out)
    assert json.dumps(header).count(str(prov["version"])) >= 1
    assert header["metadata"]["config"] == (out / "config.txt").read_text()

    # the output directory alone suffices to reproduce the run
    again = tmp_path / "again"
    assert main(["train", "--algo", algo, "--config", str(out / "config.txt"), "--seed", "7", "--out", str(again)]) == 0
    assert (again / "metrics.csv").read_bytes() == (out / "metrics.csv").read_bytes()


def test_eval_rejects_mismatched_system(tmp_path, tiny_config):
    out = tmp_path / "run"
    assert main(["train", "--algo", "dcb", "--config", str(tiny_config), "--seed", "1", "--out", str(out)]) == 0
    other = tmp_path / "other.cfg"
    other.write_text(TINY_TEXT + "N=5\n")
    assert main(["eval", "--checkpoint", str(out / "best.ckpt"), "--config", str(other)]) == 2


def test_baseline_and_sweep_commands(tmp_path, tiny_config, capsys):
    assert main(["baseline", "--config", str(tiny_config), "--realizations", "10", "--seed", "3"]) == 0
    assert capsys.readouterr().out.startswith("random_mrt mean=")
    table = tmp_path / "snr.csv"
    ref = tmp_path / "ref.csv"
    ref.write_text("snr_db,sum_rate\n0,1.5\n")
    assert main(["sweep", "snr", "--config", str(tiny_config), "--algo", "random_mrt", "--grid", "0,5",
                 "--reference", str(ref), "--out", str(table)]) == 0
    lines = table.read_text().splitlines()
    assert lines[0] == "snr_db,omega,algo,mean,std,reference" and len(lines) == 3
    assert lines[1].endswith(",1.5") and lines[2].endswith(",")
    assert main(["sweep", "nr", "--config", str(tiny_config), "--algo", "random_mrt", "--grid", "1,2"]) == 0
    assert "regime=intermediate" in capsys.readouterr().out

    run = tmp_path / "run"
    assert main(["train", "--algo", "dcb", "--config", str(tiny_config), "--seed", "2", "--out", str(run)]) == 0
    quant = tmp_path / "q.csv"
    assert main(["sweep", "quant", "--config", str(tiny_config), "--checkpoint", str(run / "best.ckpt"),
                 "--levels", "2,8", "--out", str(quant)]) == 0
    assert quant.read_text().splitlines()[0] == "levels,mean,continuous,degradation"
    drl = tmp_path / "drl"
    assert main(["train", "--algo", "drl", "--config", str(tiny_config), "--seed", "2", "--out", str(drl)]) == 0
    assert main(["sweep", "quant", "--config", str(tiny_config), "--checkpoint", str(drl / "best.ckpt")]) == 2
