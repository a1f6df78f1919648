"""Fixed- and adaptive-step integration of the circuit models.

Two steppers are provided: a classical fixed-step RK4 and an adaptive
Dormand-Prince 4(5) embedded pair.  Both record the solution on a uniform
time grid — the fixed stepper through cubic Hermite interpolation inside each
step, the adaptive one through the pair's quartic continuous extension — so
downstream period detection, loop integrals and resampling always see evenly
spaced samples regardless of how the stepper chose its internal steps.

The state vector is 9-dimensional: the four core variables followed by five
running integrals that the force-law checks need,

    [x, y, z, w, I_w, I_gG, I_gGt, I_y, I_z]

where I_w' = w, I_gG' = g(w) w', I_gGt' = I_gG, I_y' = y, I_z' = z, and all
five start at zero.

Numerical failures raise RuntimeError ("stiffness failure", "divergence at
t=..."); bad arguments raise ValueError.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

STATE_COLUMNS = ("x", "y", "z", "w", "I_w", "I_gG", "I_gGt", "I_y", "I_z")

_CSV_HEADER = "t," + ",".join(STATE_COLUMNS)

# Dormand-Prince 4(5) tableau (FSAL: last stage of an accepted step is the
# first stage of the next).
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_DP_E = _DP_B5 - _DP_B4

# Coefficients of the pair's quartic continuous extension: inside an accepted
# step, y(t + theta h) = y + h * (K^T P) @ [theta, theta^2, theta^3, theta^4],
# one order more accurate than cubic Hermite on the same data.
_DP_P = np.array(
    [
        [
            1,
            -8048581381 / 2820520608,
            8663915743 / 2820520608,
            -12715105075 / 11282082432,
        ],
        [0, 0, 0, 0],
        [
            0,
            131558114200 / 32700410799,
            -68118460800 / 10900136933,
            87487479700 / 32700410799,
        ],
        [
            0,
            -1754552775 / 470086768,
            14199869525 / 1410260304,
            -10690763975 / 1880347072,
        ],
        [
            0,
            127303824393 / 49829197408,
            -318862633887 / 49829197408,
            701980252875 / 199316789632,
        ],
        [
            0,
            -282668133 / 205662961,
            2019193451 / 616988883,
            -1453857185 / 822651844,
        ],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_H_MIN = 1e-14


def _norm_method(name: str) -> str:
    table = {
        "rk4": "rk4",
        "rk4fixed": "rk4",
        "dopri45": "dopri45",
        "dormandprince45adaptive": "dopri45",
    }
    key = name.replace("_", "").replace("-", "").lower()
    if key not in table:
        raise ValueError(f"unknown method {name!r}")
    return table[key]


@dataclass(frozen=True)
class IntegratorOptions:
    """How to march and how to record.

    method : "rk4" (fixed step, needs h) or "dopri45" (adaptive, rtol/atol).
    h : fixed step size; for the adaptive method it sets the record-grid
        spacing instead (default span/2048).
    record_stride : record every record_stride-th grid interval.
    n_record : when set, record exactly n_record+1 uniformly spaced samples
        (overrides h/record_stride for the output grid only; stepping is
        unchanged).  Dense sampling costs only interpolation, so this is the
        knob for closure-sensitive post-processing.
    """

    method: str = "dopri45"
    t0: float = 0.0
    t1: float = 1.0
    h: Optional[float] = None
    rtol: float = 1e-8
    atol: float = 1e-10
    record_stride: int = 1
    n_record: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "method", _norm_method(self.method))
        if not self.t1 > self.t0:
            raise ValueError("t1 must exceed t0")
        if self.method == "rk4" and (self.h is None or self.h <= 0):
            raise ValueError("fixed-step method requires h > 0")
        if self.h is not None and self.h <= 0:
            raise ValueError("h must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")
        if self.n_record is not None and self.n_record < 1:
            raise ValueError("n_record must be a positive integer")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class Trajectory:
    """Uniformly sampled solution: times (N,) and states (N, 9).

    `model` is the model tag ("mmo", "regular_chua", "canonical_chua") and
    `params` the parameter object, when known; CSV round-trips keep only the
    numbers.
    """

    times: np.ndarray
    states: np.ndarray
    model: Optional[str] = None
    params: object = None
    columns: tuple = field(default=STATE_COLUMNS)

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.times
        try:
            return self.states[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"no column named {name!r}") from None

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return self.times.shape[0]

    def window(self, t_lo: float, t_hi: float) -> "Trajectory":
        """Samples with t_lo <= t <= t_hi (no interpolation)."""
        m = (self.times >= t_lo) & (self.times <= t_hi)
        return Trajectory(self.times[m], self.states[m], self.model, self.params)

    def to_csv(self, path) -> None:
        write_csv(self, path)

    @staticmethod
    def from_csv(path) -> "Trajectory":
        return read_csv(path)


def write_csv(traj: Trajectory, path) -> None:
    """17-significant-digit CSV; reading it back reproduces the floats exactly."""
    buf = io.StringIO()
    buf.write(_CSV_HEADER + "\n")
    data = np.column_stack([traj.times, traj.states])
    for row in data:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    with open(path, "w", newline="\n") as fh:
        fh.write(buf.getvalue())


def read_csv(path) -> Trajectory:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != _CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != 10:
        raise ValueError("trajectory CSV must have 10 columns")
    return Trajectory(data[:, 0].copy(), data[:, 1:].copy())


def cumulative_integral(t, f, fprime=None) -> np.ndarray:
    """Cumulative integral of sampled f(t), starting at zero.

    With derivative samples available, uses the Hermite-corrected trapezoid
    (exact for cubics on each interval); otherwise integrates a cubic-spline
    fit.  This is the one quadrature rule shared by the element simulator and
    the waveform reconstructions.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    if t.ndim != 1 or t.shape != f.shape or t.size < 2:
        raise ValueError("need matching 1-D arrays with at least 2 samples")
    if fprime is not None:
        fp = np.asarray(fprime, dtype=float)
        dt = np.diff(t)
        seg = 0.5 * dt * (f[:-1] + f[1:]) + dt**2 / 12.0 * (fp[:-1] - fp[1:])
        out = np.empty_like(f)
        out[0] = 0.0
        np.cumsum(seg, out=out[1:])
        return out
    spline = CubicSpline(t, f)
    return spline.antiderivative()(t) - 0.0


def resample(traj: Trajectory, n: int) -> Trajectory:
    """Cubic-spline resample onto n uniform samples over the same span."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    tt = np.linspace(traj.times[0], traj.times[-1], n)
    spline = CubicSpline(traj.times, traj.states, axis=0)
    return Trajectory(tt, spline(tt), traj.model, traj.params)


def _record_grid(opts: IntegratorOptions) -> np.ndarray:
    span = opts.t1 - opts.t0
    if opts.n_record is not None:
        n = opts.n_record
    else:
        if opts.h is not None:
            dt = opts.h * opts.record_stride
        else:
            dt = span / 2048.0 * opts.record_stride
        n = max(1, int(round(span / dt)))
    return opts.t0 + span * np.arange(n + 1) / n


def _check_finite(t: float, s: np.ndarray) -> None:
    if not np.all(np.isfinite(s)):
        raise RuntimeError(f"divergence at t={t:.6g}")


def _hermite(t0, s0, f0, t1, s1, f1, tq):
    """Cubic Hermite values at tq (vector) for a step [t0, t1]."""
    h = t1 - t0
    th = (tq - t0) / h
    th = th[:, None]
    h00 = (1 + 2 * th) * (1 - th) ** 2
    h10 = th * (1 - th) ** 2
    h01 = th**2 * (3 - 2 * th)
    h11 = th**2 * (th - 1)
    return h00 * s0 + h10 * h * f0 + h01 * s1 + h11 * h * f1


def _run_fixed(rhs, s0, opts, grid):
    h = opts.h
    t_end = opts.t1
    nrec = grid.shape[0]
    out = np.empty((nrec, s0.shape[0]))
    out[0] = s0
    irec = 1
    t, s = opts.t0, s0.copy()
    f = rhs(t, s)
    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        step = min(h, t_end - t)
        k1 = f
        k2 = rhs(t + 0.5 * step, s + 0.5 * step * k1)
        k3 = rhs(t + 0.5 * step, s + 0.5 * step * k2)
        k4 = rhs(t + step, s + step * k3)
        s_new = s + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t_new = t + step
        _check_finite(t_new, s_new)
        f_new = rhs(t_new, s_new)
        while irec < nrec and grid[irec] <= t_new + 1e-12 * max(1.0, abs(t_new)):
            out[irec] = _hermite(t, s, f, t_new, s_new, f_new, grid[irec : irec + 1])[0]
            irec += 1
        t, s, f = t_new, s_new, f_new
    if irec < nrec:
        out[irec:] = s
    return out


def _initial_step(rhs, t0, s0, f0, rtol, atol, span):
    scale = atol + rtol * np.abs(s0)
    d0 = np.sqrt(np.mean((s0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 * span if d1 < 1e-15 else 0.01 * d0 / d1
    return min(h0 if h0 > 0 else 1e-6 * span, 0.1 * span)


def _run_adaptive(rhs, s0, opts, grid):
    t_end = opts.t1
    nrec = grid.shape[0]
    out = np.empty((nrec, s0.shape[0]))
    out[0] = s0
    irec = 1
    t, s = opts.t0, s0.copy()
    f = rhs(t, s)
    h = opts.h if opts.h is not None else _initial_step(
        rhs, t, s, f, opts.rtol, opts.atol, t_end - opts.t0
    )
    k = np.empty((7, s0.shape[0]))
    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        h = min(h, t_end - t)
        if h < _H_MIN:
            raise RuntimeError(f"stiffness failure: step size {h:.3e} at t={t:.6g}")
        k[0] = f
        for i in range(1, 7):
            k[i] = rhs(t + _DP_C[i] * h, s + h * (_DP_A[i] @ k[:i]))
        s_new = s + h * (_DP_B5 @ k)
        err_vec = h * (_DP_E @ k)
        scale = opts.atol + opts.rtol * np.maximum(np.abs(s), np.abs(s_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))
        if not np.isfinite(err):
            raise RuntimeError(f"divergence at t={t + h:.6g}")
        if err <= 1.0:
            t_new = t + h
            _check_finite(t_new, s_new)
            f_new = k[6]  # FSAL
            if irec < nrec and grid[irec] <= t_new + 1e-12 * max(1.0, abs(t_new)):
                Q = k.T @ _DP_P
                while irec < nrec and grid[irec] <= t_new + 1e-12 * max(
                    1.0, abs(t_new)
                ):
                    theta = (grid[irec] - t) / h
                    out[irec] = s + h * (Q @ theta ** np.arange(1, 5))
                    irec += 1
            t, s, f = t_new, s_new, f_new
        factor = 0.9 * err ** -0.2 if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))
    if irec < nrec:
        out[irec:] = s
    return out


def integrate(params, s0, opts: IntegratorOptions) -> Trajectory:
    """Integrate a circuit model and record it on a uniform grid.

    Parameters
    ----------
    params : MmoParams | RegularChuaParams | CanonicalChuaParams
    s0 : AugmentedState or array of length 4 (core, integrals zeroed) or 9.
    opts : IntegratorOptions

    Returns
    -------
    Trajectory

    Raises
    ------
    ValueError
        For invalid arguments, including the stiffness guard: a fast/slow
        model with epsilon < 1e-3 refuses the fixed-step method unless
        h < epsilon/10.
    RuntimeError
        "stiffness failure" when the adaptive step underflows, or
        "divergence at t=..." when the state leaves the representable range.
    """
    from . import circuits

    model, rhs = circuits.rhs_for(params)
    s0 = circuits.as_state_array(s0)
    eps = getattr(params, "epsilon", None)
    if (
        eps is not None
        and eps < 1e-3
        and opts.method == "rk4"
        and opts.h >= eps / 10.0
    ):
        raise ValueError(
            "stiffness guard: epsilon=%g requires the adaptive method or h < epsilon/10"
            % eps
        )
    grid = _record_grid(opts)
    # let inf/nan propagate to the finite-state check instead of warning
    with np.errstate(over="ignore", invalid="ignore"):
        if opts.method == "rk4":
            states = _run_fixed(rhs, s0, opts, grid)
        else:
            states = _run_adaptive(rhs, s0, opts, grid)
    return Trajectory(grid, states, model=model, params=params)
