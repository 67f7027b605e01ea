"""Run orchestration: drive a configured flow, record samples, write files.

A run directory holds run.csv (one row per sample), inequalities.txt (one
line per check), meta.txt (version, provenance, resolved config echo) and
snap_<step>.dat snapshots.  Everything written is deterministic: no wall
clock, fixed column order, 17-significant-digit decimals.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

from . import __version__, diagnostics, stencil
from .config import RunConfig
from .diagnostics import RunHistory, ThetaTracker
from .fields import ConformalField, MapField
from .integrator import P_EPU, FlowState, StepFailure, Stepper
from .scenarios import generate

EXIT_OK = 0
EXIT_IO = 1
EXIT_STEP_FAILURE = 2
EXIT_BLOWUP_STOP = 3

#: trailing fraction of the run used by the point classifier.
CLASSIFY_WINDOW_FRACTION = 0.2


def _fmt(x: float) -> str:
    return f"{x:.17g}"


class Recorder:
    """Builds the sample rows and owns the column layout."""

    def __init__(self, cfg: RunConfig, stepper: Stepper):
        self.cfg = cfg
        self.grid = stepper.grid
        self.stepper = stepper
        self.moments = cfg["diag.moments"]
        self.p_index = {p: stepper.p_list.index(float(p)) for p in self.moments}
        self.trackers = [ThetaTracker.build(self.grid, c, cfg["diag.theta_radius"])
                         for c in cfg.theta_centers()]
        self.radii = cfg["diag.ball_radii"]
        self.masks = [diagnostics.ball_mask(self.grid, c, r)
                      for c in cfg.theta_centers() for r in self.radii]
        self.names = self._header()
        self.rows: list[list[float]] = []

    def _header(self):
        names = ["t", "energy", "flux", "sup_df", "min_v", "max_v", "grad2"]
        names += [f"m{p:g}" for p in self.moments]
        names += [f"theta_{i}" for i in range(len(self.trackers))]
        names += [f"ball_{k}" for k in range(len(self.masks))]
        # appended columns so every check can be re-run offline
        names += ["energy_fwd", "diss", "epu"]
        names += [f"ballv9_{k}" for k in range(len(self.masks))]
        for p in self.stepper.p_list:
            names += [f"cum_m{p:g}", f"cum_d2f{p:g}", f"cum_gft{p:g}"]
        names += ["cum_dfp"]
        return names

    def record(self, state: FlowState):
        grid = self.grid
        h2 = grid.h * grid.h
        f, v, dc = state.f.values, state.v.values, state.dc
        row = [state.t,
               0.5 * float(dc.sum()) * h2,
               state.inst.flux,
               float(np.sqrt(dc.max())),
               state.inst.vmin,
               float(v.max()),
               stencil.grad2_energy(f, grid)]
        row += [float(state.inst.m[self.p_index[p]]) for p in self.moments]
        row += [tr.theta(dc, grid) for tr in self.trackers]
        row += [diagnostics.ball_energy(dc, mask, grid) for mask in self.masks]
        row += [stencil.energy_forward(f, grid),
                state.cum.diss,
                float((v ** (0.5 * P_EPU)).sum()) * h2]
        row += [float((v[mask] ** 9).sum()) * h2 for mask in self.masks]
        for k in range(len(self.stepper.p_list)):
            row += [float(state.cum.m[k]), float(state.cum.d2f[k]),
                    float(state.cum.gft[k])]
        row += [state.cum.dfp]
        self.rows.append(row)

    def history(self) -> RunHistory:
        return RunHistory(self.names, self.rows)

    def smallest_ball_series(self, hist: RunHistory):
        """Per tracked center, the time series of the smallest-radius ball."""
        balls = hist.group("ball_")
        n_r = len(self.radii)
        return [balls[ci * n_r] for ci in range(len(self.trackers))]


def write_snapshot(path: str, state: FlowState, grid):
    f, v = state.f.values, state.v.values
    n = grid.n
    L = f.shape[-1]
    with open(path, "w") as fh:
        fh.write(f"CHFSNAP1 n={n} L={L} t={_fmt(state.t)}\n")
        for i in range(n):
            for j in range(n):
                vals = [_fmt(f[i, j, c]) for c in range(L)] + [_fmt(v[i, j])]
                fh.write(" ".join(vals) + "\n")


def read_snapshot(path: str):
    """Returns (n, L, t, f (n,n,L), v (n,n)) from a CHFSNAP1 file."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "CHFSNAP1":
            raise ValueError(f"not a CHFSNAP1 header: {' '.join(header)!r}")
        try:
            n = int(header[1].removeprefix("n="))
            L = int(header[2].removeprefix("L="))
            t = float(header[3].removeprefix("t="))
        except ValueError:
            raise ValueError(f"malformed CHFSNAP1 header fields: {header}") from None
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (n * n, L + 1):
        raise ValueError(f"snapshot body {data.shape} does not match header "
                         f"n={n} L={L}")
    f = data[:, :L].reshape(n, n, L)
    v = data[:, L].reshape(n, n)
    return n, L, t, f, v


def _write_csv(path, names, rows):
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def build_reports(cfg: RunConfig, hist: RunHistory, rec: Recorder):
    """All inequality checks the configuration admits, plus descriptive lines."""
    a, b = cfg["flow.a"], cfg["flow.b"]
    t = hist.t
    e0 = float(hist.col("energy")[0])
    reports = []
    notes = []
    notes.append("energy_identity_residual="
                 f"{diagnostics.energy_identity_residual(t, hist.col('energy_fwd'), hist.col('diss')):.6e}")
    cum_df2ft2 = hist.col("cum_d2f0")
    for i in range(len(rec.trackers)):
        rep = diagnostics.theta_holder_check(t, hist.col(f"theta_{i}"),
                                             cum_df2ft2, rec.trackers[i].r)
        rep.name = f"theta_holder_{i}"
        reports.append(rep)
    if a > 0.0 and len(rec.radii) >= 2:
        n_r = len(rec.radii)
        for ci in range(len(rec.trackers)):
            rep = diagnostics.local_energy_lemma_check(
                t, hist.col(f"ball_{ci * n_r}"),
                hist.col(f"ball_{ci * n_r + n_r - 1}"),
                rec.radii[0], rec.radii[-1], a, e0, rec.grid.length)
            rep.name = f"local_energy_lemma_{ci}"
            reports.append(rep)
    elif a <= 0.0:
        notes.append("local_energy_lemma=skipped (needs a > 0)")
    params = cfg.params()
    if params.b > 2.0 * params.c_n**2 + params.c_n:
        t_span = float(t[-1] - t[0])
        v_lo = float(hist.col("min_v").min())
        v_hi = float(hist.col("max_v").max())
        for p in cfg["diag.moments"]:
            floor = diagnostics.moment_noise_floor(p, t_span, rec.grid,
                                                   v_lo, v_hi)
            plain, full = diagnostics.moment_growth_check(
                t, hist.col(f"m{p:g}"), hist.col(f"cum_m{p:g}"),
                hist.col(f"cum_d2f{p:g}"), hist.col(f"cum_gft{p:g}"),
                p, a, params.c4(p), noise_floor=floor)
            reports.append(plain)
            reports.append(full)
        reports.append(diagnostics.k_cap_check(t, hist.col("m0"), a, e0))
    else:
        notes.append("moment_growth/k_cap=skipped (needs b > 2*c_n^2 + c_n)")
    if a > 0.0:
        reports.append(diagnostics.e_pu_inequality_check(
            t, hist.col("epu"), hist.col("cum_dfp"), P_EPU, a, b))
    else:
        notes.append("e_pu=skipped (needs a > 0)")
    for p in cfg["diag.moments"]:
        lim = diagnostics.moment_limit_report(t, hist.col(f"m{p:g}"), p)
        notes.append(f"moment_limit_p{p:g}: tail_max={lim['tail_max']:.6e} "
                     f"t_weighted_min={lim['t_weighted_min']:.6e} "
                     f"late_log_slope={lim['late_log_slope']:.4f}")
    window = CLASSIFY_WINDOW_FRACTION * float(t[-1])
    labels = diagnostics.classify_points(t, rec.smallest_ball_series(hist),
                                         cfg["thresholds.eps2"], window)
    notes.append("classification=" + ",".join(labels))
    return reports, notes


def run_config(cfg: RunConfig, out_dir: str, config_text: str = "") -> int:
    """Execute one configured run; returns the process exit code."""
    grid = cfg.grid()
    params = cfg.params()
    f0 = generate(cfg.scenario(), grid, cfg["target.ambient_dim"])
    stepper = Stepper(grid, params, moments=cfg["diag.moments"])
    state = stepper.init_state(f0)
    rec = Recorder(cfg, stepper)
    os.makedirs(out_dir, exist_ok=True)

    snapshot_every = cfg["output.snapshot_every"]
    stop_on_blowup = cfg["flow.stop_on_blowup"]
    eps1 = cfg["thresholds.eps1"]
    n_r = len(rec.radii)
    run_max = [-np.inf] * len(rec.trackers)
    flag = []
    sample_count = [0]
    snapped_steps = set()
    latest = [state]

    def watch_blowup(state):
        dc = state.dc
        for ci in range(len(rec.trackers)):
            e_ball = diagnostics.ball_energy(dc, rec.masks[ci * n_r], grid)
            run_max[ci] = max(run_max[ci], e_ball)
            if not flag and run_max[ci] - e_ball > eps1:
                flag.append((ci, state.t))

    def hook(state):
        latest[0] = state
        rec.record(state)
        watch_blowup(state)
        if snapshot_every > 0 and sample_count[0] % snapshot_every == 0:
            write_snapshot(os.path.join(out_dir, f"snap_{state.step_count}.dat"),
                           state, grid)
            snapped_steps.add(state.step_count)
        sample_count[0] += 1
        if flag and stop_on_blowup:
            raise _EarlyStop

    hook(state)  # the t = 0 row
    exit_code = EXIT_OK
    failure_msg = None
    try:
        stepper.advance(state, cfg["flow.t_end"],
                        sample_dt=cfg["diag.sample_dt"], hook=hook)
    except _EarlyStop:
        exit_code = EXIT_BLOWUP_STOP
    except StepFailure as exc:
        exit_code = EXIT_STEP_FAILURE
        failure_msg = str(exc)

    final = latest[0]
    if final.step_count not in snapped_steps:
        write_snapshot(os.path.join(out_dir, f"snap_{final.step_count}.dat"),
                       final, grid)
    _write_csv(os.path.join(out_dir, "run.csv"), rec.names, rec.rows)

    hist = rec.history()
    reports, notes = build_reports(cfg, hist, rec)
    with open(os.path.join(out_dir, "inequalities.txt"), "w") as fh:
        for rep in reports:
            fh.write(rep.line() + "\n")
        for note in notes:
            fh.write(note + "\n")

    digest = hashlib.sha256(config_text.encode()).hexdigest()
    with open(os.path.join(out_dir, "meta.txt"), "w") as fh:
        fh.write(f"version={__version__}\n")
        fh.write(f"provenance=config:{digest}\n")
        for line in cfg.echo_lines():
            fh.write(line + "\n")
        if flag:
            ci, t_flag = flag[0]
            fh.write(f"blowup=center_{ci},t={_fmt(t_flag)}\n")
        else:
            fh.write("blowup=none\n")
        if failure_msg:
            fh.write(f"step_failure={failure_msg}\n")
        fh.write(f"exit={exit_code}\n")
    return exit_code


class _EarlyStop(Exception):
    pass


def _require_matching(cfg_a: RunConfig, cfg_b: RunConfig):
    keys = ["grid.n", "grid.length", "target.ambient_dim", "diag.sample_dt",
            "init.kind", "init.amplitude", "init.scale", "init.center",
            "init.seed"]
    for key in keys:
        if cfg_a[key] != cfg_b[key]:
            raise ValueError(f"compare needs matching {key}: "
                             f"{cfg_a[key]!r} vs {cfg_b[key]!r}")


def compare_configs(cfg_a: RunConfig, cfg_b: RunConfig, out_dir: str,
                    text_a: str = "", text_b: str = "") -> int:
    """Run both configs and write aligned sup_df / local-energy / min_v."""
    _require_matching(cfg_a, cfg_b)
    code_a = run_config(cfg_a, os.path.join(out_dir, "run_a"), text_a)
    code_b = run_config(cfg_b, os.path.join(out_dir, "run_b"), text_b)
    hist_a = RunHistory.from_run_dir(os.path.join(out_dir, "run_a"))
    hist_b = RunHistory.from_run_dir(os.path.join(out_dir, "run_b"))
    n_rows = min(len(hist_a), len(hist_b))
    names = ["t", "sup_df_a", "local_energy_max_a", "min_v_a",
             "sup_df_b", "local_energy_max_b", "min_v_b"]
    ball_a = np.stack(hist_a.group("ball_"))
    ball_b = np.stack(hist_b.group("ball_"))
    rows = []
    for k in range(n_rows):
        rows.append([hist_a.t[k],
                     hist_a.col("sup_df")[k], float(ball_a[:, k].max()),
                     hist_a.col("min_v")[k],
                     hist_b.col("sup_df")[k], float(ball_b[:, k].max()),
                     hist_b.col("min_v")[k]])
    _write_csv(os.path.join(out_dir, "compare.csv"), names, rows)
    return max(code_a, code_b)


CANNED_CONFIGS = {
    "constant": "init.kind=constant\nflow.t_end=1\n",
    "circle": "init.kind=circle\nflow.t_end=0.5\n",
    "perturbed": "init.kind=perturbed\ninit.amplitude=0.2\nflow.t_end=0.5\n",
    "bubble": "init.kind=bubble\ninit.scale=0.2\nflow.t_end=0.25\n",
}


def run_check(out=print) -> int:
    """Run the canned scenarios and report every inequality check."""
    import tempfile

    from .config import parse_config

    ok = True
    for name, text in CANNED_CONFIGS.items():
        cfg = parse_config(text)
        with tempfile.TemporaryDirectory() as tmp:
            code = run_config(cfg, tmp, text)
            hist = RunHistory.from_run_dir(tmp)
        if code != EXIT_OK:
            out(f"{name}: run exited {code} FAIL")
            ok = False
            continue
        rec = Recorder(cfg, Stepper(cfg.grid(), cfg.params(),
                                    moments=cfg["diag.moments"]))
        reports, _ = build_reports(cfg, hist, rec)
        for rep in reports:
            out(f"{name}: {rep.line()}")
            ok = ok and rep.satisfied
    out("all checks passed" if ok else "CHECK FAILURES PRESENT")
    return EXIT_OK if ok else 1

