"""Scalar diagnostics and inequality checks along a flow run.

Everything here is pure over recorded history: the checks consume sampled
time series (plus cumulative trapezoid integrals carried by the
integrator) and can be re-run offline from a written run.csv.

Pairwise checks compare every recorded sample pair (s, t), s < t, after
subsampling long histories to at most _PAIR_CAP samples.  The shared
tolerance convention is tol = 1e-6 * (scale of RHS) + 0.05 * RHS_pair,
the second term being the discretization allowance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid

_PAIR_CAP = 512


@dataclass
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    tol: float
    satisfied: bool
    slack: float  # rhs - lhs at the worst recorded pair

    def line(self) -> str:
        verdict = "pass" if self.satisfied else "FAIL"
        return (f"{self.name}: worst_slack={self.slack:.6e} "
                f"lhs={self.lhs:.6e} rhs={self.rhs:.6e} "
                f"tol={self.tol:.3e} {verdict}")


def _pair_report(name, t, lhs_series, rhs_series, extra_lhs=None, atol=0.0):
    """Worst pair (s < t) of lhs(t)-lhs(s) [+extra] <= rhs(t)-rhs(s)."""
    idx = _subsample(len(t))
    lv = lhs_series[idx]
    rv = rhs_series[idx]
    lhs_mat = lv[None, :] - lv[:, None]
    if extra_lhs is not None:
        ev = extra_lhs[idx]
        lhs_mat = lhs_mat + (ev[None, :] - ev[:, None])
    rhs_mat = rv[None, :] - rv[:, None]
    return _worst_upper(name, lhs_mat, rhs_mat, atol=atol)


def _worst_upper(name, lhs_mat, rhs_mat, atol=0.0):
    iu = np.triu_indices(lhs_mat.shape[0], k=1)
    lhs = lhs_mat[iu]
    rhs = rhs_mat[iu]
    if lhs.size == 0:
        return InequalityReport(name, 0.0, 0.0, 0.0, True, 0.0)
    # scale falls back to the LHS when the RHS degenerates (e.g. a = 0)
    scale = float(max(np.abs(rhs).max(), np.abs(lhs).max()))
    tol = 1e-6 * scale + 0.05 * rhs + atol
    margin = rhs + tol - lhs
    k = int(np.argmin(margin))
    return InequalityReport(name, float(lhs[k]), float(rhs[k]), float(tol[k]),
                            bool(margin[k] >= 0.0), float(rhs[k] - lhs[k]))


def _subsample(n, cap=_PAIR_CAP):
    if n <= cap:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, cap).round().astype(int))


# -- local energy machinery ------------------------------------------------


@dataclass
class ThetaTracker:
    """Cosine-bump local energy weight around a center.

    phi(d) = cos^2(pi*d/(2r)) for periodic distance d <= r, zero beyond;
    0 <= phi <= 1 and |phi'| <= pi/(2r) < 2/r.
    """

    center: tuple[float, float]
    r: float
    phi2: np.ndarray

    @staticmethod
    def build(grid: Grid, center: tuple[float, float], r: float) -> "ThetaTracker":
        if r <= 2.0 * grid.h:
            raise ValueError(f"theta radius {r:g} must exceed 2h = {2*grid.h:g}")
        if r >= 0.5 * grid.length:
            raise ValueError(f"theta radius {r:g} exceeds half the domain")
        d = grid.periodic_distance(center)
        phi = np.where(d <= r, np.cos((0.5 * np.pi / r) * d) ** 2, 0.0)
        return ThetaTracker(center, r, phi * phi)

    def theta(self, density: np.ndarray, grid: Grid) -> float:
        """Local energy (1/2) * integral of phi^2 |df|^2."""
        return float(0.5 * (self.phi2 * density).sum() * grid.h * grid.h)


def ball_mask(grid: Grid, center: tuple[float, float], r: float) -> np.ndarray:
    if r >= 0.5 * grid.length:
        raise ValueError(f"ball radius {r:g} exceeds half the domain")
    return grid.periodic_distance(center) <= r


def ball_energy(density: np.ndarray, mask: np.ndarray, grid: Grid) -> float:
    return float(0.5 * density[mask].sum() * grid.h * grid.h)


# -- identity / inequality checks -----------------------------------------


def energy_identity_residual(t, energy_fwd, diss) -> float:
    """Worst drift of E(0) - E(t) = cumulative dissipation over samples."""
    drift = (energy_fwd[0] - energy_fwd) - diss
    return float(np.abs(drift).max())


def theta_holder_check(t, theta, cum_df2ft2, r) -> InequalityReport:
    """Theta(t) - Theta(s) <= (8/r) sqrt(int_s^t int |df|^2|f_t|^2) sqrt(t-s)."""
    idx = _subsample(len(t))
    tv = t[idx]
    th = theta[idx]
    cv = cum_df2ft2[idx]
    lhs_mat = th[None, :] - th[:, None]
    dt_mat = np.maximum(tv[None, :] - tv[:, None], 0.0)
    dc_mat = np.maximum(cv[None, :] - cv[:, None], 0.0)
    rhs_mat = (8.0 / r) * np.sqrt(dc_mat) * np.sqrt(dt_mat)
    return _worst_upper("theta_holder", lhs_mat, rhs_mat)


def local_energy_lemma_check(t, ball_small, ball_big, r1, r2, a, e0,
                             length) -> InequalityReport:
    """E(B_r1, t2) - E(B_r2, t1) <= (16/(a r^2))(e^{2a t2}-e^{2a t1}) E(0)."""
    if r1 >= r2:
        raise ValueError("r1 must be smaller than r2")
    if r2 >= 0.5 * length:
        raise ValueError(f"ball radius {r2:g} exceeds half the domain")
    if a <= 0.0:
        raise ValueError("the bound needs a > 0")
    r = 0.5 * (r2 - r1)
    idx = _subsample(len(t))
    small = ball_small[idx]
    big = ball_big[idx]
    grow = np.exp(2.0 * a * t[idx])
    lhs_mat = small[None, :] - big[:, None]
    rhs_mat = (16.0 / (a * r * r)) * (grow[None, :] - grow[:, None]) * e0
    return _worst_upper("local_energy_lemma", lhs_mat, rhs_mat)


def moment_growth_check(t, m_p, cum_m_p, cum_d2f_p, cum_gft_p, p, a, c4,
                        noise_floor=0.0) -> tuple[InequalityReport,
                                                  InequalityReport]:
    """The p-moment growth bound, in the plain and the full cumulative form.

    Plain:  M_p(t2) - M_p(t1) <= 2a(p+1) int_{t1}^{t2} M_p.
    Full adds C4(p) int int |df|^2|f_t|^{p+2} + (p+2)/2 int int
    |grad f_t|^2 |f_t|^p to the left side.

    At a discrete fixed point both sides are rounding dust (f_t is pure
    noise), so the relative tol degenerates; noise_floor is an absolute
    allowance the caller sizes from the stencil amplification of machine
    epsilon, see moment_noise_floor.
    """
    rhs = (2.0 * a * (p + 1.0)) * cum_m_p
    plain = _pair_report(f"moment_growth_p{p:g}", t, m_p, rhs,
                         atol=noise_floor)
    extra = c4 * cum_d2f_p + (0.5 * (p + 2.0)) * cum_gft_p
    full = _pair_report(f"moment_growth_full_p{p:g}", t, m_p + extra, rhs,
                        atol=noise_floor)
    return plain, full


def moment_noise_floor(p, t_span, grid, v_min, v_max) -> float:
    """Absolute rounding-noise bound for p-moment comparisons.

    A node of f_t carries absolute rounding error up to
    delta = eps * (stencil norm 8/h^2) / min v, so time-integrated moment
    terms are bounded by (span) * area * (8/h^2) * max(v,1) * delta^(p+2),
    the gradient term being the worst amplifier.
    """
    eps = float(np.finfo(float).eps)
    h2 = grid.h * grid.h
    delta = eps * 8.0 / (h2 * max(v_min, np.finfo(float).tiny))
    area = grid.length * grid.length
    return (max(t_span, 1.0) * area * (8.0 / h2) * max(v_max, 1.0)
            * delta ** (p + 2.0))


def k_cap_check(t, m0, a, e0) -> InequalityReport:
    """M_0(t) <= K(0) + 2a E(0) for all recorded t, K(0) = M_0(0)."""
    cap = float(m0[0] + 2.0 * a * e0)
    tol = 1e-6 * abs(cap) + 0.05 * cap
    k = int(np.argmax(m0))
    lhs = float(m0[k])
    return InequalityReport("moment0_cap", lhs, cap, tol,
                            lhs <= cap + tol, cap - lhs)


def e_pu_constant(p: float, a: float, b: float) -> float:
    """Growth constant for the v-moment bound at order p > 2.

    Along v_t = 2b|df|^2 - 2av the production rate of v^{p/2} per unit
    |df|^p is (p/2) v^{p/2-1}(2b|df|^2 - 2av)/|df|^p, maximized in v at
    v* = (p-2)b|df|^2/(pa); substituting gives
    2b((p-2)b/(ap))^{(p-2)/2}, independent of |df|^2.
    """
    if p <= 2.0:
        raise ValueError("needs p > 2")
    if a <= 0.0:
        raise ValueError("needs a > 0")
    return 2.0 * b * ((p - 2.0) * b / (a * p)) ** (0.5 * (p - 2.0))


def e_pu_inequality_check(t, epu, cum_dfp, p, a, b) -> InequalityReport:
    """integrate(v^{p/2})(t) bounded by its past value plus the |df|^p
    time integral times the sharp growth constant."""
    rhs = e_pu_constant(p, a, b) * cum_dfp
    return _pair_report(f"e_pu_p{p:g}", t, epu, rhs)


# -- phenomenology ---------------------------------------------------------


def blowup_detector(t, ball_series, eps1):
    """Flag the first sample where a tracked smallest ball has shed more
    than eps1 of energy from its running maximum (an energy quantum
    leaving the concentration scale).  Returns (center_index, t_flag) or
    None.
    """
    best = None
    for ci, series in enumerate(ball_series):
        run_max = np.maximum.accumulate(series)
        hits = np.nonzero(run_max - series > eps1)[0]
        if hits.size:
            t_flag = float(t[hits[0]])
            if best is None or t_flag < best[1]:
                best = (ci, t_flag)
    return best


def classify_points(t, ball_series, eps2, window):
    """Label each tracked center over the trailing time window.

    uniform: ball energy > eps2 at every sample in the window;
    regular: never above eps2 in the window; sequential: in between.
    """
    t_end = float(t[-1])
    in_win = t >= t_end - window
    labels = []
    for series in ball_series:
        above = series[in_win] > eps2
        if above.all():
            labels.append("uniform")
        elif above.any():
            labels.append("sequential")
        else:
            labels.append("regular")
    return labels


def moment_limit_report(t, m_p, p) -> dict:
    """Descriptive late-time trend of the p-moment (no pass/fail)."""
    t_end = float(t[-1])
    tail = t >= 0.1 * t_end
    tail_max = float(m_p[tail].max())
    pos = m_p > 0.0
    t_weighted_min = float((t[pos] * m_p[pos]).min()) if pos.any() else 0.0
    late = (t > 0.5 * t_end) & pos
    if late.sum() >= 2:
        slope = float(np.polyfit(t[late], np.log(m_p[late]), 1)[0])
    else:
        slope = 0.0
    return {"p": p, "tail_max": tail_max, "t_weighted_min": t_weighted_min,
            "late_log_slope": slope}


# -- recorded history ------------------------------------------------------


class RunHistory:
    """Column-oriented view of a recorded run (live or re-read from CSV)."""

    def __init__(self, names, rows, meta=None):
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] != len(names):
            raise ValueError("malformed history rows")
        self.names = list(names)
        self._cols = {nm: data[:, k].copy() for k, nm in enumerate(names)}
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self._cols["t"])

    def col(self, name: str) -> np.ndarray:
        if name not in self._cols:
            raise KeyError(f"no recorded column {name!r}")
        return self._cols[name]

    @property
    def t(self) -> np.ndarray:
        return self._cols["t"]

    def group(self, prefix: str) -> list[np.ndarray]:
        """Columns named prefix0, prefix1, ... in index order."""
        out = []
        k = 0
        while f"{prefix}{k}" in self._cols:
            out.append(self._cols[f"{prefix}{k}"])
            k += 1
        return out

    @staticmethod
    def from_csv(path, meta=None) -> "RunHistory":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            names = next(reader)
            rows = [[float(x) for x in row] for row in reader if row]
        return RunHistory(names, rows, meta=meta)

    @staticmethod
    def from_run_dir(path) -> "RunHistory":
        import os
        meta = {}
        meta_path = os.path.join(path, "meta.txt")
        if os.path.exists(meta_path):
            with open(meta_path) as fh:
                for line in fh:
                    line = line.strip()
                    if not line or "=" not in line:
                        continue
                    key, val = line.split("=", 1)
                    meta[key.strip()] = val.strip()
        return RunHistory.from_csv(os.path.join(path, "run.csv"), meta=meta)
