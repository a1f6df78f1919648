import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from memodyn.circuits import (
    CanonicalChuaParams,
    MmoParams,
    RegularChuaParams,
    as_state_array,
    linear_system_matrix,
)
from memodyn.integrator import (
    IntegratorOptions,
    Trajectory,
    cumulative_integral,
    integrate,
    read_csv,
    resample,
)
from memodyn.memelement import Polynomial


CONST_G = Polynomial((0.3,))


def _linear_cases():
    return [
        RegularChuaParams(k=1.1, alpha=2.0, beta=3.7, gamma=0.45, xi=1.3, g=CONST_G),
        CanonicalChuaParams(k=0.9, alpha=1.7, beta=2.2, gamma=0.31, g=CONST_G),
        MmoParams(
            epsilon=0.4, alpha=1.3, K=0.7, beta=1.9, eta=2.5, s_c=1.2, a_s=0.0, g=CONST_G
        ),
    ]


@pytest.mark.parametrize("method,kw", [("rk4", {"h": 5e-4}), ("dopri45", {"rtol": 1e-11, "atol": 1e-13})])
def test_matches_matrix_exponential(method, kw):
    rng = np.random.default_rng(42)
    for params in _linear_cases():
        s0 = as_state_array(rng.normal(size=4) * 0.4)
        A = linear_system_matrix(params)
        opts = IntegratorOptions(method=method, t0=0.0, t1=1.0, **kw)
        traj = integrate(params, s0, opts)
        # check a handful of grid points, not just the endpoint
        for i in (0, len(traj) // 3, len(traj) // 2, len(traj) - 1):
            exact = expm(A * (traj.times[i] - traj.times[0])) @ s0
            assert_allclose(traj.states[i], exact, rtol=1e-8, atol=1e-11)


def test_fixed_and_adaptive_agree_on_nonlinear_run():
    params = CanonicalChuaParams(
        k=1.0, alpha=1.6, beta=2.1, gamma=0.25, g=Polynomial((0.2, 0.1, 0.3))
    )
    s0 = [0.3, -0.2, 0.1, 0.05]
    fixed = integrate(params, s0, IntegratorOptions(method="rk4", t0=0, t1=5, h=1e-3))
    adapt = integrate(
        params, s0, IntegratorOptions(method="dopri45", t0=0, t1=5, rtol=1e-11, atol=1e-13, h=1e-3)
    )
    assert_allclose(fixed.times, adapt.times, rtol=0, atol=1e-12)
    assert_allclose(fixed.states, adapt.states, rtol=1e-7, atol=1e-9)


def test_deterministic_rerun_bit_identical():
    params = _linear_cases()[2]
    s0 = [0.2, -0.1, 0.15, 0.0]
    opts = IntegratorOptions(method="dopri45", t0=0, t1=3.0, rtol=1e-9, atol=1e-11)
    a = integrate(params, s0, opts)
    b = integrate(params, s0, opts)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.times, b.times)


def test_integral_columns_consistency():
    # I_w, I_y, I_z are time integrals of w, y, z; I_gGt integrates I_gG
    params = CanonicalChuaParams(
        k=1.0, alpha=1.6, beta=2.1, gamma=0.25, g=Polynomial((0.2, 0.1, 0.3))
    )
    traj = integrate(
        params,
        [0.3, -0.2, 0.1, 0.05],
        IntegratorOptions(method="dopri45", t0=0, t1=4, rtol=1e-11, atol=1e-13),
    )
    t = traj.times
    for integrand, integral in (("w", "I_w"), ("y", "I_y"), ("z", "I_z"), ("I_gG", "I_gGt")):
        ref = cumulative_integral(t, traj.column(integrand))
        assert_allclose(traj.column(integral), ref, rtol=1e-7, atol=1e-9)


def test_record_grid_uniform_and_strided():
    params = _linear_cases()[1]
    opts = IntegratorOptions(method="rk4", t0=0, t1=1.0, h=1e-3, record_stride=8)
    traj = integrate(params, [0.1, 0.0, 0.0, 0.0], opts)
    dts = np.diff(traj.times)
    assert_allclose(dts, dts[0], rtol=1e-12)
    assert_allclose(dts[0], 8e-3, rtol=1e-12)
    assert traj.times[0] == 0.0 and traj.times[-1] == 1.0


def test_stiffness_guard_refuses_coarse_fixed_step():
    params = MmoParams(
        epsilon=5e-4, alpha=1.0, K=1.0, beta=1.0, eta=10.0, s_c=1.0, a_s=0.01, g=CONST_G
    )
    with pytest.raises(ValueError, match="stiffness guard"):
        integrate(params, np.zeros(4), IntegratorOptions(method="rk4", t0=0, t1=1, h=1e-3))
    # a fine enough step is allowed
    opts = IntegratorOptions(method="rk4", t0=0, t1=0.01, h=4e-5)
    traj = integrate(params, np.zeros(4), opts)
    assert np.all(np.isfinite(traj.states))


def test_divergence_raises_runtime_error():
    # strongly negative constant conductance pumps energy in: finite-time blowup
    params = CanonicalChuaParams(k=1.0, alpha=5.0, beta=1.0, gamma=0.0, g=Polynomial((-3.0,)))
    with pytest.raises(RuntimeError, match="divergence at t="):
        integrate(
            params,
            [1.0, 1.0, 1.0, 0.0],
            IntegratorOptions(method="rk4", t0=0.0, t1=400.0, h=0.05),
        )


def test_csv_round_trip_bit_exact(tmp_path):
    params = _linear_cases()[0]
    traj = integrate(
        params, [0.2, 0.1, -0.1, 0.0], IntegratorOptions(method="rk4", t0=0, t1=1, h=1e-2)
    )
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = read_csv(path)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.states, traj.states)
    header = path.read_text().splitlines()[0]
    assert header == "t,x,y,z,w,I_w,I_gG,I_gGt,I_y,I_z"


def test_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,x\n0,1\n")
    with pytest.raises(ValueError, match="header"):
        read_csv(path)


def test_resample_preserves_smooth_content():
    params = _linear_cases()[1]
    traj = integrate(
        params,
        [0.3, 0.0, -0.1, 0.0],
        IntegratorOptions(method="dopri45", t0=0, t1=2.0, rtol=1e-10, atol=1e-12),
    )
    fine = resample(traj, 4 * (len(traj) - 1) + 1)
    # every 4th fine sample lands exactly on the original grid
    idx = np.arange(0, len(fine), 4)
    assert len(idx) == len(traj)
    assert_allclose(fine.times[idx], traj.times, rtol=0, atol=1e-12)
    assert_allclose(fine.states[idx], traj.states, rtol=1e-9, atol=1e-11)


def test_cumulative_integral_exact_for_cubics_with_derivative():
    t = np.linspace(0.0, 3.0, 31)
    f = 2.0 - t + 0.5 * t**2 - 0.25 * t**3
    fp = -1.0 + t - 0.75 * t**2
    exact = 2.0 * t - t**2 / 2 + 0.5 * t**3 / 3 - 0.25 * t**4 / 4
    assert_allclose(cumulative_integral(t, f, fp), exact, rtol=1e-13, atol=1e-13)


def test_options_validation():
    with pytest.raises(ValueError, match="t1 must exceed"):
        IntegratorOptions(method="rk4", t0=1.0, t1=0.5, h=0.1)
    with pytest.raises(ValueError, match="requires h"):
        IntegratorOptions(method="rk4", t0=0.0, t1=1.0)
    with pytest.raises(ValueError, match="unknown method"):
        IntegratorOptions(method="euler", t0=0.0, t1=1.0)
    with pytest.raises(ValueError, match="record_stride"):
        IntegratorOptions(method="dopri45", t0=0.0, t1=1.0, record_stride=0)
    # spelled-out method names are accepted
    assert IntegratorOptions(method="RK4Fixed", t0=0, t1=1, h=0.1).method == "rk4"
    assert IntegratorOptions(method="DormandPrince45Adaptive", t0=0, t1=1).method == "dopri45"
