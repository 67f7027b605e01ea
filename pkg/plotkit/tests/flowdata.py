"""Drives the flow simulator's CLI to produce the files these tests read."""

import subprocess
import sys

CONSTANT_CFG = """grid.n = 16
init.kind = constant
flow.a = 1.0
flow.b = 4.0
flow.t_end = 3.0
diag.sample_dt = 0.05
diag.theta_radius = 1.0
"""

BUBBLE_CFG = """grid.n = 64
init.kind = bubble
init.scale = 0.2
flow.a = 1.0
flow.b = 4.0
flow.t_end = 0.5
diag.sample_dt = 0.05
"""


def run_flow(cfg_text, out_dir):
    cfg = out_dir.parent / (out_dir.name + ".cfg")
    cfg.write_text(cfg_text)
    proc = subprocess.run(
        [sys.executable, "-m", "chflow.cli", "run",
         "--config", str(cfg), "--out", str(out_dir)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out_dir


def final_snapshot(run_dir):
    """The snapshot file with the largest recorded time."""
    best = None
    for path in run_dir.glob("snap_*.dat"):
        t = float(path.open().readline().split()[3].removeprefix("t="))
        if best is None or t > best[1]:
            best = (path, t)
    assert best is not None, f"no snapshots in {run_dir}"
    return best[0]
