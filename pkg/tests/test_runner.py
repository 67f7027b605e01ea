import hashlib

import numpy as np
import pytest

from chflow import runner
from chflow.config import parse_config
from chflow.diagnostics import RunHistory
from chflow.fields import FlowParams
from chflow.grid import make_grid
from chflow.integrator import Stepper
from chflow.scenarios import Scenario, generate

# n=16 keeps these runs well under a second; the default probe radius is too
# wide for that grid, so pick one inside the validity window.
TINY = ("grid.n = 16\n"
        "init.kind = constant\n"
        "flow.t_end = 0.05\n"
        "diag.theta_radius = 1.0\n")

HMF_TINY = TINY.replace("flow.t_end", "flow.a = 0\nflow.b = 0\nflow.t_end")


def run_tiny(tmp_path, name="out", text=TINY):
    cfg = parse_config(text)
    out = tmp_path / name
    code = runner.run_config(cfg, str(out), text)
    return code, out


def test_run_directory_contents(tmp_path):
    code, out = run_tiny(tmp_path)
    assert code == runner.EXIT_OK
    assert (out / "run.csv").is_file()
    assert (out / "inequalities.txt").is_file()
    assert (out / "meta.txt").is_file()
    # snapshot_every=0 still writes the final state
    assert len(list(out.glob("snap_*.dat"))) == 1
    hist = RunHistory.from_run_dir(str(out))
    assert np.all(hist.col("energy") == 0.0)  # constant map never moves
    assert hist.t[0] == 0.0
    assert hist.t[-1] == pytest.approx(0.05)
    meta = (out / "meta.txt").read_text()
    digest = hashlib.sha256(TINY.encode()).hexdigest()
    assert f"provenance=config:{digest}" in meta
    assert "blowup=none" in meta
    assert "exit=0" in meta


def test_rerun_is_byte_identical(tmp_path):
    _, out1 = run_tiny(tmp_path, "one")
    _, out2 = run_tiny(tmp_path, "two")
    for name in ("run.csv", "inequalities.txt", "meta.txt"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_snapshot_round_trip(tmp_path):
    g = make_grid(12, 2 * np.pi)
    f0 = generate(Scenario(kind="perturbed", amplitude=0.2, seed=3), g)
    st = Stepper(g, FlowParams(a=1.0, b=4.0, scheme="explicit"))
    state = st.init_state(f0)
    for _ in range(3):
        state = st.step(state, st.stable_dt(state))
    path = tmp_path / "snap.dat"
    runner.write_snapshot(str(path), state, g)
    n, ambient, t, f, v = runner.read_snapshot(str(path))
    assert (n, ambient) == (12, 3)
    assert t == state.t
    assert np.array_equal(f, state.f.values)
    assert np.array_equal(v, state.v.values)


def test_read_snapshot_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.dat"
    bad.write_text("SNAPv2 n=4 L=3 t=0\n")
    with pytest.raises(ValueError, match="CHFSNAP1"):
        runner.read_snapshot(str(bad))
    unint = tmp_path / "unint.dat"
    unint.write_text("CHFSNAP1 n=x L=3 t=0.0\n")
    with pytest.raises(ValueError, match="malformed"):
        runner.read_snapshot(str(unint))
    short = tmp_path / "short.dat"
    short.write_text("CHFSNAP1 n=4 L=3 t=0.0\n" + "0 0 1 1\n" * 5)
    with pytest.raises(ValueError, match="does not match"):
        runner.read_snapshot(str(short))


def test_snapshot_cadence(tmp_path):
    code, out = run_tiny(tmp_path, "snaps", TINY + "output.snapshot_every = 2\n")
    assert code == 0
    times = sorted(runner.read_snapshot(str(p))[2]
                   for p in out.glob("snap_*.dat"))
    # samples land at t = 0, 0.01, ..., 0.05; every second one is snapped
    # and the final state is always written
    assert times[0] == 0.0
    assert times[1] == pytest.approx(0.02)
    assert times[-1] == pytest.approx(0.05)
    assert len(times) == 4


def test_compare_identical_configs(tmp_path):
    out = tmp_path / "cmp"
    code = runner.compare_configs(parse_config(TINY), parse_config(TINY),
                                  str(out), TINY, TINY)
    assert code == 0
    hist = RunHistory.from_csv(str(out / "compare.csv"))
    assert np.array_equal(hist.col("sup_df_a"), hist.col("sup_df_b"))
    assert np.array_equal(hist.col("min_v_a"), hist.col("min_v_b"))
    assert np.array_equal(hist.col("local_energy_max_a"),
                          hist.col("local_energy_max_b"))


def test_compare_flow_against_baseline(tmp_path):
    out = tmp_path / "cmp2"
    code = runner.compare_configs(parse_config(TINY), parse_config(HMF_TINY),
                                  str(out), TINY, HMF_TINY)
    assert code == 0
    hist = RunHistory.from_csv(str(out / "compare.csv"))
    # a constant map moves under neither flow, but only the conformal
    # factor of the a > 0 flow decays
    assert np.all(hist.col("sup_df_a") == 0.0)
    assert np.all(hist.col("sup_df_b") == 0.0)
    assert np.all(hist.col("min_v_b") == 1.0)
    assert hist.col("min_v_a")[-1] < 0.95


def test_compare_rejects_mismatched_grids(tmp_path):
    cfg_b = parse_config(TINY.replace("grid.n = 16", "grid.n = 24"))
    with pytest.raises(ValueError, match="grid.n"):
        runner.compare_configs(parse_config(TINY), cfg_b, str(tmp_path / "x"))


def test_stop_on_blowup_exits_early(tmp_path):
    text = ("grid.n = 64\ninit.kind = bubble\ninit.scale = 0.2\n"
            "flow.a = 0\nflow.b = 0\nflow.t_end = 1.0\n"
            "flow.stop_on_blowup = true\ndiag.sample_dt = 0.02\n")
    code, out = run_tiny(tmp_path, "blow", text)
    assert code == runner.EXIT_BLOWUP_STOP
    meta = (out / "meta.txt").read_text()
    assert "blowup=center_0,t=" in meta
    assert "exit=3" in meta
    hist = RunHistory.from_run_dir(str(out))
    assert hist.t[-1] < 1.0  # stopped before t_end


def test_step_failure_recorded(tmp_path):
    text = ("grid.n = 16\ninit.kind = perturbed\ninit.amplitude = 0.2\n"
            "init.seed = 7\nflow.scheme = imex\nflow.imex_max_iter = 1\n"
            "flow.t_end = 0.5\ndiag.theta_radius = 1.0\n")
    code, out = run_tiny(tmp_path, "fail", text)
    assert code == runner.EXIT_STEP_FAILURE
    meta = (out / "meta.txt").read_text()
    assert "step_failure=" in meta
    assert "exit=2" in meta
    # the partial history up to the failure is still written
    assert len(RunHistory.from_run_dir(str(out))) >= 1
