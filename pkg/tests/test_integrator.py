import math

import numpy as np
import pytest

from chflow.fields import ConformalField, FlowParams
from chflow.grid import make_grid
from chflow.integrator import Stepper, StepFailure, hmf_step, step_v_exact
from chflow.scenarios import Scenario, generate
from chflow.stencil import energy_forward


def make_state(n=32, kind="perturbed", amplitude=0.2, seed=1234, a=1.0, b=4.0,
               scheme="explicit", **kw):
    g = make_grid(n, 2 * np.pi)
    st = Stepper(g, FlowParams(a=a, b=b, scheme=scheme, **kw))
    state = st.init_state(generate(Scenario(kind=kind, amplitude=amplitude,
                                            seed=seed), g))
    return g, st, state


def test_v_update_closed_forms():
    g = make_grid(8, 1.0)
    v = ConformalField(np.full((8, 8), 2.0), g)
    zero = np.zeros((8, 8))
    # no source: pure exponential decay
    out = step_v_exact(v, zero, a=1.0, b=4.0, dt=0.3)
    assert np.allclose(out.values, 2.0 * math.exp(-0.6), rtol=1e-15)
    # a = 0: linear growth 2*b*dt*density
    d = np.full((8, 8), 0.5)
    out = step_v_exact(v, d, a=0.0, b=4.0, dt=0.5)
    assert np.allclose(out.values, 2.0 + 2.0 * 4.0 * 0.5 * 0.5, rtol=1e-15)
    # equilibrium v = (b/a) * density is a fixed point
    vstar = ConformalField(np.full((8, 8), 4.0 * 0.5), g)
    out = step_v_exact(vstar, d, a=1.0, b=4.0, dt=0.7)
    assert np.allclose(out.values, vstar.values, rtol=1e-14)
    # dt = 0 is the identity
    out = step_v_exact(v, d, a=1.0, b=4.0, dt=0.0)
    assert np.array_equal(out.values, v.values)


def test_init_state():
    g, st, state = make_state(n=16, kind="constant", amplitude=0.0)
    assert state.t == 0.0
    assert state.step_count == 0
    assert np.array_equal(state.v.values, np.ones((16, 16)))
    assert np.array_equal(state.dc, np.zeros((16, 16)))
    assert state.inst.vmin == 1.0


def test_stable_dt_formula():
    g, st, state = make_state(n=16, kind="constant", amplitude=0.0)
    assert abs(st.stable_dt(state) - 0.25 * g.h**2 / 4.0) < 1e-18
    assert abs(st.stable_dt(state, cfl=1.0) - g.h**2 / 4.0) < 1e-18


def test_explicit_step_advances():
    g, st, state = make_state()
    dt = st.stable_dt(state)
    s1 = st.step(state, dt)
    assert s1.t == dt
    assert s1.step_count == 1
    assert s1.f.max_sphere_defect() < 1e-12
    assert np.all(s1.v.values > 0.0)
    assert not np.array_equal(s1.f.values, state.f.values)
    report = st.last_report
    assert report is not None and report.dt_used == dt


def test_energy_decreases_along_flow():
    g, st, state = make_state()
    e_prev = energy_forward(state.f.values, g)
    for _ in range(100):
        state = st.step(state, st.stable_dt(state))
        e = energy_forward(state.f.values, g)
        assert e <= e_prev + 1e-12
        e_prev = e


def test_sphere_and_positivity_preserved():
    g, st, state = make_state(n=16, amplitude=0.3, seed=4)
    for _ in range(50):
        state = st.step(state, st.stable_dt(state))
    assert state.f.max_sphere_defect() < 1e-12
    assert np.all(state.v.values > 0.0)


def test_advance_lands_exactly():
    g, st, state = make_state(n=16)
    times = []
    state = st.advance(state, 0.037, sample_dt=0.01,
                       hook=lambda s: times.append(s.t))
    assert state.t == 0.037
    assert times == [1 * 0.01, 2 * 0.01, 3 * 0.01, 0.037]


def test_advance_without_sampling():
    g, st, state = make_state(n=16)
    state = st.advance(state, 0.02)
    assert state.t == 0.02


def test_imex_explicit_consistency():
    # both schemes approximate the same flow; imex error is first order in dt
    g = make_grid(32, 2 * np.pi)
    f0 = generate(Scenario(kind="perturbed", amplitude=0.1, seed=2), g)
    T = 0.02

    ref_st = Stepper(g, FlowParams(a=1.0, b=4.0, scheme="explicit"))
    ref = ref_st.init_state(f0)
    nref = 2000
    for _ in range(nref):
        ref = ref_st.step(ref, T / nref)

    errs = []
    for nsteps in (20, 40):
        st = Stepper(g, FlowParams(a=1.0, b=4.0, scheme="imex"))
        s = st.init_state(f0)
        for _ in range(nsteps):
            s = st.step(s, T / nsteps)
        errs.append(np.abs(s.f.values - ref.f.values).max())
    ratio = errs[0] / errs[1]
    assert errs[1] < errs[0]
    assert 1.5 < ratio < 2.6


def test_imex_long_step_stable():
    # imex takes steps far beyond the explicit CFL bound without blowing up
    g, st, state = make_state(n=32, scheme="imex", amplitude=0.1)
    dt = 20.0 * st.stable_dt(state)
    e0 = energy_forward(state.f.values, g)
    for _ in range(10):
        state = st.step(state, dt)
    assert energy_forward(state.f.values, g) <= e0
    assert state.f.max_sphere_defect() < 1e-12


def test_imex_solver_failure_raises():
    g, st, state = make_state(n=16, scheme="imex", imex_max_iter=1)
    with pytest.raises(StepFailure):
        st.advance(state, 0.05)


def test_hmf_step_matches_zero_coefficient_flow():
    g = make_grid(16, 2 * np.pi)
    f0 = generate(Scenario(kind="perturbed", amplitude=0.2, seed=3), g)
    st = Stepper(g, FlowParams(a=0.0, b=0.0, scheme="explicit"))
    state = st.init_state(f0)
    dt = st.stable_dt(state)
    f_base = f0
    for _ in range(10):
        state = st.step(state, dt)
        f_base = hmf_step(f_base, dt)
    assert np.array_equal(state.f.values, f_base.values)
    assert np.array_equal(state.v.values, np.ones((16, 16)))


def test_moment_order_list():
    g = make_grid(16, 2 * np.pi)
    st = Stepper(g, FlowParams(), moments=(2.0,))
    assert st.p_list == (0.0, 2.0)  # p = 0 is always tracked
    with pytest.raises(ValueError):
        Stepper(g, FlowParams(), moments=(-1.0,))
