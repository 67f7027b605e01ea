"""Time integration of the conformally weighted heat flow.

Operator splitting per step: the map f moves first (explicit Euler on
f_t = (1/v)(lap f + |df|^2 f) followed by projection to the sphere, or an
IMEX solve for stiff long runs), then the conformal density v is advanced
by the exact solution of its linear ODE with |df|^2 frozen.

The explicit scheme reports f_t as the pre-projection velocity
(1/v)*tension(f); the IMEX scheme reports the post-projection difference
quotient.  Accumulated time integrals (dissipation, moments, ...) use the
trapezoid rule on per-step integrand samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .backends import get_kernels
from .fields import (MIN_PROJECT_NORM, ConformalField, FlowParams, MapField,
                     ProjectionFailure)
from .grid import Grid

#: exponent of the conformal-density moment integral tracked for the
#: e^{pu}-type inequality check (integrate(v^{p/2}) with p = P_EPU).
P_EPU = 6.0

_RETRY_LIMIT = 10


class StepFailure(RuntimeError):
    """A time step could not be completed (after retries, if allowed)."""


@dataclass
class StepReport:
    dt_used: float
    max_update: float
    v_min: float
    v_max: float
    rejected: bool = False


@dataclass
class Instant:
    """Instantaneous integrands evaluated at one state."""

    flux: float          # integrate(v * |f_t|^2)
    vmin: float
    dfp: float           # integrate(|df|^{P_EPU})
    m: np.ndarray        # integrate(v * |f_t|^{p+2}) per tracked p
    d2f: np.ndarray      # integrate(|df|^2 |f_t|^{p+2}) per tracked p
    gft: np.ndarray      # integrate(|grad f_t|^2 |f_t|^p) per tracked p


@dataclass
class Accumulators:
    """Trapezoid time integrals of the Instant quantities from t = 0."""

    diss: float
    dfp: float
    m: np.ndarray
    d2f: np.ndarray
    gft: np.ndarray

    @staticmethod
    def zeros(n_moments: int) -> "Accumulators":
        return Accumulators(0.0, 0.0, np.zeros(n_moments),
                            np.zeros(n_moments), np.zeros(n_moments))

    def stepped(self, prev: Instant, cur: Instant, dt: float) -> "Accumulators":
        half_dt = 0.5 * dt
        return Accumulators(
            diss=self.diss + half_dt * (prev.flux + cur.flux),
            dfp=self.dfp + half_dt * (prev.dfp + cur.dfp),
            m=self.m + half_dt * (prev.m + cur.m),
            d2f=self.d2f + half_dt * (prev.d2f + cur.d2f),
            gft=self.gft + half_dt * (prev.gft + cur.gft),
        )


@dataclass
class FlowState:
    t: float
    f: MapField
    v: ConformalField
    last_ft: np.ndarray
    step_count: int
    dc: np.ndarray        # centered density |df|^2 of f
    ft2: np.ndarray       # |f_t|^2 node field
    inst: Instant
    cum: Accumulators


def step_v_exact(v: ConformalField, density: np.ndarray, a: float, b: float,
                 dt: float) -> ConformalField:
    """Advance v_t = 2b*density - 2a*v exactly with the density frozen.

    For a > 0 this is v <- e^{-2a dt} v + (b/a)(1 - e^{-2a dt}) density;
    the a = 0 limit is v + 2b*dt*density.  Always positive.
    """
    decay, q = _v_coeffs(a, b, dt)
    return ConformalField(decay * v.values + q * density, v.grid)


def _v_coeffs(a: float, b: float, dt: float):
    if a > 0.0:
        decay = math.exp(-2.0 * a * dt)
        q = (b / a) * (1.0 - decay)
    else:
        decay = 1.0
        q = 2.0 * b * dt
    return decay, q


def _dot(x: np.ndarray, y: np.ndarray) -> float:
    # shared between backends so CG trajectories match bit for bit
    return float(np.dot(x.ravel(), y.ravel()))


class Stepper:
    """Precomputed-coefficient driver for one flow on one grid."""

    def __init__(self, grid: Grid, params: FlowParams,
                 moments=(0.0, 2.0), backend: str | None = None):
        self.grid = grid
        self.params = params
        p_list = sorted({0.0} | {float(p) for p in moments})
        if any(p < 0 for p in p_list):
            raise ValueError("moment orders must be >= 0")
        self.p_list = tuple(p_list)
        self.kernels = get_kernels(backend)
        h = grid.h
        self.h2 = h * h
        self.h2inv = 1.0 / self.h2
        self.half_h2inv = 0.5 * self.h2inv
        self.inv2h = 0.5 / h
        self.e_arr = np.array([0.5 * (p + 2.0) for p in self.p_list])
        self.p_half_arr = np.array([0.5 * p for p in self.p_list])
        self.pe_half = 0.5 * P_EPU
        self.imex_dt_cap = params.imex_dt_cap
        if self.imex_dt_cap is None:
            self.imex_dt_cap = 0.1 * h
        self.last_report: StepReport | None = None
        self._lap_eigs = None  # spectral preconditioner table, built lazily

    # -- state construction ------------------------------------------------

    def init_state(self, f0: MapField, v0: ConformalField | None = None) -> FlowState:
        f0.assert_on_sphere()
        if v0 is None:
            v0 = ConformalField.ones(self.grid)
        v_new, ft, dc, ft2, scalars = self._post(f0.values, v0.values, 0.0)
        inst = self._instant(ft, ft2, scalars)
        return FlowState(t=0.0, f=f0.copy(),
                         v=ConformalField(v_new, self.grid),
                         last_ft=ft, step_count=0, dc=dc, ft2=ft2, inst=inst,
                         cum=Accumulators.zeros(len(self.p_list)))

    def _post(self, f_vals, v_vals, dt, ft_in=None):
        decay, q = _v_coeffs(self.params.a, self.params.b, dt)
        return self.kernels.post_step(f_vals, v_vals, decay, q, self.h2inv,
                                      self.half_h2inv, self.inv2h, self.h2,
                                      self.e_arr, self.pe_half, ft_in=ft_in)

    def _instant(self, ft, ft2, scalars) -> Instant:
        P = len(self.p_list)
        gft = self.kernels.grad_moment_sums(ft, ft2, self.inv2h, self.h2,
                                            self.p_half_arr)
        return Instant(flux=float(scalars[0]), vmin=float(scalars[1]),
                       dfp=float(scalars[2]),
                       m=np.asarray(scalars[3:3 + P]),
                       d2f=np.asarray(scalars[3 + P:3 + 2 * P]), gft=gft)

    # -- single steps ------------------------------------------------------

    def stable_dt(self, state: FlowState, cfl: float | None = None) -> float:
        if cfl is None:
            cfl = self.params.cfl
        return cfl * self.h2 * state.inst.vmin / 4.0

    def step_f_explicit(self, state: FlowState, dt: float):
        """Euler step along the cached f_t, then project.  Returns the new
        map and the f_t that was used (the pre-projection velocity)."""
        f_new, min_norm, max_disp = self.kernels.explicit_update(
            state.f.values, state.last_ft, dt)
        if min_norm < MIN_PROJECT_NORM:
            raise ProjectionFailure(
                f"node norm collapsed to {min_norm:.3e} during explicit step")
        return MapField(f_new, self.grid), state.last_ft, max_disp

    def step_f_imex(self, state: FlowState, dt: float):
        """Implicit diffusion / explicit nonlinearity step.

        Solves (v - dt*lap) f_new = (v + dt*|df|_nb^2) f by preconditioned
        CG, projects, and reports f_t as the difference quotient.
        """
        params = self.params
        f, v = state.f.values, state.v.values
        dnb = self.kernels.neighbor_density(f, self.half_h2inv)
        rhs = (v + dt * dnb)[..., None] * f
        x = self._solve_helmholtz(f, v, dt, rhs)
        if x is None:
            raise _SolveFailure(dt)
        f_new, min_norm, _ = self.kernels.explicit_update(x, x, 0.0)
        if min_norm < MIN_PROJECT_NORM:
            raise ProjectionFailure(
                f"node norm collapsed to {min_norm:.3e} after implicit solve")
        ft = (f_new - f) / dt
        max_disp = dt * math.sqrt(float((ft * ft).sum(axis=-1).max()))
        return MapField(f_new, self.grid), ft, max_disp

    def _precond(self, r, v_mean, dt):
        """Apply (v_mean - dt*lap)^{-1} spectrally.

        This is the exact inverse at spatially uniform v, which is the
        regime where the raw operator is worst conditioned (late-time
        v ~ e^{-2at} makes the constant mode nearly singular).  Shared
        numpy code on every backend, so CG iterates stay bit-identical.
        """
        if self._lap_eigs is None:
            n = self.grid.n
            sx = np.sin(np.pi * np.arange(n) / n) ** 2
            sy = np.sin(np.pi * np.arange(n // 2 + 1) / n) ** 2
            self._lap_eigs = (4.0 * self.h2inv) * (sx[:, None] + sy[None, :])
        spec = np.fft.rfft2(r, axes=(0, 1))
        spec /= (v_mean + dt * self._lap_eigs)[..., None]
        n = self.grid.n
        return np.fft.irfft2(spec, s=(n, n), axes=(0, 1))

    def _solve_helmholtz(self, x0, v, dt, rhs):
        k = self.kernels
        dth2 = dt * self.h2inv
        v_mean = float(v.mean())
        b_norm = math.sqrt(_dot(rhs, rhs))
        # the reachable residual floor scales with ||A||*||x||, not ||b||;
        # keep the tolerance meaningful when v (hence b) underflows to 0
        op_scale = (v_mean + 8.0 * dt * self.h2inv) * self.grid.n
        tol = self.params.imex_tol * max(b_norm, op_scale)
        x = x0.copy()
        r = rhs - k.matvec_helmholtz(x, v, dth2)
        z = self._precond(r, v_mean, dt)
        rz = _dot(r, z)
        p = z.copy()
        for _ in range(self.params.imex_max_iter):
            if math.sqrt(_dot(r, r)) <= tol:
                return x
            ap = k.matvec_helmholtz(p, v, dth2)
            alpha = rz / _dot(p, ap)
            x = x + alpha * p
            r = r - alpha * ap
            z = self._precond(r, v_mean, dt)
            rz_next = _dot(r, z)
            beta = rz_next / rz
            rz = rz_next
            p = z + beta * p
        if math.sqrt(_dot(r, r)) <= tol:
            return x
        return None

    def step(self, state: FlowState, dt: float, t_new: float | None = None) -> FlowState:
        """One full split step (f first, then v); dt must be positive."""
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.params.scheme == "explicit":
            f_new, ft_used, max_disp = self.step_f_explicit(state, dt)
            ft_in = None
        else:
            f_new, ft_used, max_disp = self.step_f_imex(state, dt)
            ft_in = ft_used
        v_new_vals, ft, dc, ft2, scalars = self._post(
            f_new.values, state.v.values, dt, ft_in=ft_in)
        inst = self._instant(ft, ft2, scalars)
        cum = state.cum.stepped(state.inst, inst, dt)
        v_new = ConformalField(v_new_vals, self.grid)
        t = state.t + dt if t_new is None else t_new
        self.last_report = StepReport(dt_used=dt, max_update=max_disp,
                                      v_min=inst.vmin,
                                      v_max=float(v_new_vals.max()))
        return FlowState(t=t, f=f_new, v=v_new, last_ft=ft,
                         step_count=state.step_count + 1, dc=dc, ft2=ft2,
                         inst=inst, cum=cum)

    # -- driving -----------------------------------------------------------

    def _dt_choice(self, state: FlowState) -> float:
        if self.params.scheme == "explicit":
            return self.stable_dt(state)
        return self.imex_dt_cap

    def advance_to(self, state: FlowState, t_target: float) -> FlowState:
        """Step until state.t == t_target exactly (last step is clipped)."""
        while state.t < t_target:
            dt = self._dt_choice(state)
            remaining = t_target - state.t
            if dt >= remaining:
                dt, t_new = remaining, t_target
            else:
                t_new = state.t + dt
            state = self._step_with_retry(state, dt, t_new)
        return state

    def _step_with_retry(self, state: FlowState, dt: float, t_new: float) -> FlowState:
        for attempt in range(_RETRY_LIMIT + 1):
            try:
                return self.step(state, dt, t_new if attempt == 0 else None)
            except (_SolveFailure, ProjectionFailure) as exc:
                if self.last_report is not None:
                    self.last_report.rejected = True
                if attempt == _RETRY_LIMIT:
                    raise StepFailure(
                        f"step at t={state.t:.6g} failed after "
                        f"{_RETRY_LIMIT} halvings: {exc}") from exc
                dt *= 0.5
        raise AssertionError("unreachable")

    def advance(self, state: FlowState, t_target: float,
                sample_dt: float | None = None, hook=None) -> FlowState:
        """Advance to t_target, invoking hook(state) at the sample cadence.

        The hook fires at t = k*sample_dt (k >= 1) and at t_target; sample
        times are landed on exactly.  With no sample_dt the hook fires only
        at t_target.
        """
        if t_target < state.t:
            raise ValueError("t_target precedes current time")
        if sample_dt is None:
            state = self.advance_to(state, t_target)
            if hook is not None:
                hook(state)
            return state
        k = int(math.floor(state.t / sample_dt + 1e-9)) + 1
        while state.t < t_target:
            t_next = min(k * sample_dt, t_target)
            k += 1
            if t_next <= state.t:
                continue
            state = self.advance_to(state, t_next)
            if hook is not None:
                hook(state)
        return state


class _SolveFailure(RuntimeError):
    def __init__(self, dt):
        super().__init__(f"linear solve did not converge at dt={dt:.3e}")


def hmf_step(f: MapField, dt: float, backend: str | None = None) -> MapField:
    """One explicit harmonic-map-flow step (the v = 1, a = b = 0 baseline)."""
    kernels = get_kernels(backend)
    grid = f.grid
    h2inv = 1.0 / (grid.h * grid.h)
    ones = np.ones((grid.n, grid.n))
    _, ft, _, _, _ = kernels.post_step(f.values, ones, 1.0, 0.0, h2inv,
                                       0.5 * h2inv, 0.5 / grid.h,
                                       grid.h * grid.h, np.array([1.0]), 1.0)
    f_new, min_norm, _ = kernels.explicit_update(f.values, ft, dt)
    if min_norm < MIN_PROJECT_NORM:
        raise ProjectionFailure(
            f"node norm collapsed to {min_norm:.3e} during baseline step")
    return MapField(f_new, grid)
