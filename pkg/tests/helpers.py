import pathlib

import numpy as np

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"

SHIPPED = [
    "perturbed_energy",
    "constant_decay",
    "circle_flat",
    "bubble_lemma",
    "small_energy",
    "bubble_hmf_n128",
    "bubble_chf_n128",
]


def shipped_config_text(name):
    return (CONFIG_DIR / f"{name}.cfg").read_text()


def report_lines(out_dir):
    """Parsed inequalities.txt: list of (name, passed, full line)."""
    lines = []
    with open(pathlib.Path(out_dir) / "inequalities.txt") as fh:
        for raw in fh:
            raw = raw.rstrip("\n")
            head = raw.split(":", 1)[0]
            if raw.endswith(" pass"):
                lines.append((head, True, raw))
            elif raw.endswith(" FAIL"):
                lines.append((head, False, raw))
    return lines


def smooth_field(grid, ncomp=3, seed=0):
    """Low-mode trigonometric field, smooth enough for order checks."""
    rng = np.random.default_rng(seed)
    x, y = grid.coords()
    out = np.zeros((grid.n, grid.n, ncomp))
    for c in range(ncomp):
        for kx in range(3):
            for ky in range(3):
                amp_c, amp_s = rng.normal(size=2)
                ph = kx * x + ky * y
                out[..., c] += amp_c * np.cos(ph) + amp_s * np.sin(ph)
    return out
