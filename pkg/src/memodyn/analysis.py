"""Waveform analysis: periods, cycle signatures, loop and rms quantities.

Period detection works on crossing times of a Poincare section rather than
on FFT bins: mixed large/small amplitude cycles cross the section several
times per true period, so the detector looks for the smallest block length
under which the sequence of crossing intervals repeats.

The loop bookkeeping evaluates, over one closed period, the six pairings of
element quantities (output, drive, state, accumulated response) whose
forward and backward loop integrals must cancel, together with the running
action/coaction pair and the rms magnitudes that feed the linear-equivalent
construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .integrator import Trajectory, resample
from .memelement import MemElementKind, MemElementSpec, vi_roles


@dataclass(frozen=True)
class PeriodEstimate:
    T: float
    converged: bool
    samples_per_period: float
    n_crossings: int
    block: int  # crossings per period
    t_start: float  # crossing time the period window is anchored at

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "converged": self.converged,
            "samples_per_period": self.samples_per_period,
            "n_crossings": self.n_crossings,
            "block": self.block,
            "t_start": self.t_start,
        }


def _section_crossings(t: np.ndarray, y: np.ndarray, level: float) -> np.ndarray:
    """Times of upward crossings of y through `level`.

    Sign changes between samples bracket the crossings; each one is then
    polished to a root of the cubic spline through the samples, so crossing
    times inherit the interpolation accuracy of the grid rather than the
    O(dt^2) error of linear interpolation.
    """
    d = y - level
    idx = np.nonzero((d[:-1] < 0.0) & (d[1:] >= 0.0))[0]
    if idx.size == 0:
        return np.empty(0)
    spline = CubicSpline(t, d)
    return np.array([brentq(spline, t[i], t[i + 1]) for i in idx])


def detect_period(
    traj: Trajectory,
    transient_fraction: float = 0.5,
    tol: float = 1e-3,
    section: str = "y",
) -> PeriodEstimate:
    """Estimate the period of a settled oscillation.

    The last (1 - transient_fraction) of the trajectory is sectioned at the
    mean level of the chosen column; the period is the smallest block of
    consecutive crossing intervals that repeats to relative tolerance `tol`.

    Raises
    ------
    ValueError
        "non-oscillatory trajectory" when fewer than 4 section crossings
        remain after the transient.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must lie in [0, 1)")
    i0 = int(len(traj) * transient_fraction)
    t = traj.times[i0:]
    y = traj.column(section)[i0:]
    crossings = _section_crossings(t, y, float(np.mean(y)))
    if crossings.size < 4:
        raise ValueError("non-oscillatory trajectory")
    d = np.diff(crossings)
    d_scale = float(np.max(d))
    for p in range(1, d.size // 3 + 1):
        if np.all(np.abs(d[p:] - d[:-p]) <= tol * d_scale):
            spans = crossings[p:] - crossings[:-p]
            T = float(np.mean(spans))
            return PeriodEstimate(
                T=T,
                converged=True,
                samples_per_period=T / traj.dt,
                n_crossings=int(crossings.size),
                block=p,
                t_start=float(crossings[0]),
            )
    T = float(np.mean(d))
    return PeriodEstimate(
        T=T,
        converged=False,
        samples_per_period=T / traj.dt,
        n_crossings=int(crossings.size),
        block=0,
        t_start=float(crossings[0]),
    )


def extract_period(
    traj: Trajectory, estimate: Optional[PeriodEstimate] = None, n: int = 2048
) -> Trajectory:
    """One closed period, resampled to n+1 uniform samples (ends included).

    The window is anchored at a section crossing, so the first and last
    samples should agree up to the settling quality of the trajectory.
    """
    est = estimate if estimate is not None else detect_period(traj)
    t0, t1 = est.t_start, est.t_start + est.T
    if t1 > traj.times[-1] + 1e-9 * est.T:
        raise ValueError("period window extends past the end of the trajectory")
    tt = np.linspace(t0, t1, n + 1)
    spline = CubicSpline(traj.times, traj.states, axis=0)
    return Trajectory(tt, spline(tt), traj.model, traj.params)


def closure_defect(period_traj: Trajectory) -> float:
    """Relative mismatch between the first and last sample of a period window."""
    s = period_traj.states[:, :4]
    span = np.maximum(np.max(s, axis=0) - np.min(s, axis=0), 1e-30)
    return float(np.max(np.abs(s[-1] - s[0]) / span))


def refine_cycle(
    params,
    state,
    period,
    phase_index: int = 0,
    tol: float = 1e-10,
    max_iter: int = 20,
):
    """Newton-polish a nearby periodic orbit by single shooting.

    `state` (4 core components) and `period` seed the iteration — typically
    the section anchor and T from detect_period.  The `phase_index`
    coordinate is frozen as the phase condition; the remaining three
    components and the period are updated until the flow map returns to the
    start within `tol` relative to the state scale.  This matters for cycles
    approached through a slowly contracting memory direction, where no
    affordable settling run closes the orbit to quadrature accuracy.

    Every rest state of these models has a zero fast coordinate, so the
    default phase condition (freeze coordinate 0 at its nonzero anchor
    value) keeps the iteration away from the degenerate fixed-point branch
    on which any period would close.

    Returns (state, period) of the closed orbit.

    Raises
    ------
    ValueError
        when the frozen coordinate of the seed is zero (the phase plane
        would contain the rest states).
    RuntimeError
        "cycle refinement did not converge" when max_iter Newton steps
        leave the closure above tol.
    """
    from .integrator import IntegratorOptions, integrate

    s = np.asarray(state, dtype=float)[:4].copy()
    T = float(period)
    if s[phase_index] == 0.0:
        raise ValueError(
            "refine_cycle needs a nonzero frozen coordinate; re-anchor the "
            "seed or pick another phase_index"
        )

    def flow(s4, T):
        start = np.zeros(9)
        start[:4] = s4
        opts = IntegratorOptions(
            method="dopri45", t0=0.0, t1=T, rtol=1e-12, atol=1e-14, n_record=8
        )
        return integrate(params, start, opts).states[-1, :4]

    from .circuits import rhs_for

    _, rhs = rhs_for(params)
    scale = max(1.0, float(np.max(np.abs(s))))
    free = [k for k in range(4) if k != phase_index]
    for _ in range(max_iter):
        end = flow(s, T)
        resid = end - s
        if np.max(np.abs(resid)) <= tol * scale:
            return s.copy(), T
        jac = np.empty((4, 4))
        for col, k in enumerate(free):
            h = 1e-7 * max(1.0, abs(s[k]))
            pert = s.copy()
            pert[k] += h
            jac[:, col] = (flow(pert, T) - end) / h
            jac[k, col] -= 1.0
        end9 = np.zeros(9)
        end9[:4] = end
        jac[:, 3] = rhs(0.0, end9)[:4]
        step = np.linalg.solve(jac, -resid)
        s[free] += step[:3]
        T += float(step[3])
    raise RuntimeError("cycle refinement did not converge")


def classify_mmo(x, threshold: float = 0.5) -> list:
    """Signature of a one-period waveform as (large_count, small_count) blocks.

    Peaks are local maxima of the cyclic waveform; a peak is "large" when it
    rises above `threshold` of the full waveform range measured from the
    waveform minimum.  The signature starts at a large peak that follows a
    small one (or is just [(n, 0)] when no small peaks exist).  A pure
    sinusoid therefore classifies as [(1, 0)].
    """
    if hasattr(x, "column"):
        x = x.column("x")
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        raise ValueError("degenerate waveform")
    closed = x.size > 3 and abs(x[-1] - x[0]) <= 1e-9 * max(1.0, np.ptp(x))
    xs = x[:-1] if closed else x
    n = xs.size
    lo, rng = float(np.min(xs)), float(np.ptp(xs))
    if rng == 0.0:
        raise ValueError("degenerate waveform")
    prev = np.roll(xs, 1)
    nxt = np.roll(xs, -1)
    is_peak = (xs > prev) & (xs >= nxt) & (xs - lo > 1e-9 * rng)
    peaks = np.nonzero(is_peak)[0]
    if peaks.size == 0:
        raise ValueError("degenerate waveform")
    large = (xs[peaks] - lo) >= threshold * rng
    if np.all(large):
        return [(int(peaks.size), 0)]
    # rotate so the label sequence starts at a large peak preceded by a small
    labels = large.tolist()
    m = len(labels)
    start = next(
        i for i in range(m) if labels[i] and not labels[(i - 1) % m]
    )
    labels = labels[start:] + labels[:start]
    sig = []
    i = 0
    while i < m:
        n_large = 0
        while i < m and labels[i]:
            n_large += 1
            i += 1
        n_small = 0
        while i < m and not labels[i]:
            n_small += 1
            i += 1
        sig.append((n_large, n_small))
    return sig


def signature_string(sig: list) -> str:
    return " ".join(f"{L}^{s}" for L, s in sig)


def loop_integral(f, h) -> float:
    """Trapezoid loop integral  sum (f_i + f_{i+1})/2 * (h_{i+1} - h_i)."""
    f = np.asarray(f, dtype=float)
    h = np.asarray(h, dtype=float)
    if f.shape != h.shape or f.ndim != 1:
        raise ValueError("mismatched waveform lengths")
    if f.size < 3:
        raise ValueError("degenerate waveform")
    return float(np.sum(0.5 * (f[:-1] + f[1:]) * np.diff(h)))


def time_integral(t, f) -> float:
    return float(np.trapezoid(np.asarray(f, dtype=float), np.asarray(t, dtype=float)))


def rms(t, f) -> float:
    """Root-mean-square of a sampled waveform over its full span."""
    t = np.asarray(t, dtype=float)
    span = t[-1] - t[0]
    return float(np.sqrt(time_integral(t, np.asarray(f) ** 2) / span))


def element_waveforms(period_traj: Trajectory, element: Optional[MemElementSpec] = None) -> dict:
    """Element-level waveforms along a closed period window.

    Returns a dict with the element drive "x" (= dw/dt along the circuit
    trajectory), output "y" = g(w) x, state "w", accumulated response "G",
    and the voltage/current pair ("v", "i") that the element kind assigns to
    those roles (derivative-valued roles are differentiated by spline).
    """
    params = period_traj.params
    if element is None:
        if params is None:
            raise ValueError("need an element spec or a parameterized trajectory")
        element = MemElementSpec(MemElementKind.VCMR, params.g)
    t = period_traj.times
    w = period_traj.column("w")
    if params is not None:
        from .circuits import MmoParams, physical_fast

        scale = params.s_c if isinstance(params, MmoParams) else params.k
        x_e = scale * physical_fast(params, period_traj)
    else:
        x_e = CubicSpline(t, w)(t, 1)
    g_of_w = element.g(w)
    y_e = g_of_w * x_e
    G_of_w = element.g.antideriv()(w)
    out = {"t": t, "x": x_e, "y": y_e, "w": w, "G": G_of_w}
    role_v, role_i = vi_roles(element.kind)

    def realize(role):
        if role.endswith("'"):
            return CubicSpline(t, out[role[0]])(t, 1)
        return out[role]

    out["v"] = realize(role_v)
    out["i"] = realize(role_i)
    return out


@dataclass(frozen=True)
class LoopQuantities:
    """One-period loop bookkeeping for an element inside a circuit."""

    T: float
    pair_sums: dict  # name -> (forward, backward, sum)
    action: float
    coaction: float
    action_closure: float
    v_rms: float
    i_rms: float
    energy: float  # integral of v*i over the period
    sq_v_int: float  # integral of v^2 dt
    sq_i_int: float  # integral of i^2 dt
    closure: float  # relative endpoint mismatch of the window

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["pair_sums"] = {k: list(v) for k, v in self.pair_sums.items()}
        return json.dumps(d, indent=2)


_PAIRS = (
    ("y_vs_x", "y", "x"),
    ("x_vs_G", "x", "G"),
    ("y_vs_w", "y", "w"),
    ("G_vs_w", "G", "w"),
    ("y_vs_G", "y", "G"),
    ("x_vs_w", "x", "w"),
)


def table_quantities(
    period_traj: Trajectory, element: Optional[MemElementSpec] = None
) -> LoopQuantities:
    """All paired loop integrals, action/coaction and rms magnitudes for one period."""
    wf = element_waveforms(period_traj, element)
    t = wf["t"]
    T = float(t[-1] - t[0])
    pair_sums = {}
    for name, fk, hk in _PAIRS:
        fwd = loop_integral(wf[fk], wf[hk])
        bwd = loop_integral(wf[hk], wf[fk])
        pair_sums[name] = (fwd, bwd, fwd + bwd)
    action = loop_integral(wf["G"], wf["w"])
    coaction = loop_integral(wf["w"], wf["G"])
    return LoopQuantities(
        T=T,
        pair_sums=pair_sums,
        action=action,
        coaction=coaction,
        action_closure=action + coaction,
        v_rms=rms(t, wf["v"]),
        i_rms=rms(t, wf["i"]),
        energy=time_integral(t, wf["v"] * wf["i"]),
        sq_v_int=time_integral(t, wf["v"] ** 2),
        sq_i_int=time_integral(t, wf["i"] ** 2),
        closure=closure_defect(period_traj),
    )


def action_series(period_traj: Trajectory, element: Optional[MemElementSpec] = None):
    """Running action and coaction along a period window.

    Both vanish at the window start; their sum equals G(w) w minus its start
    value pointwise, and both return to zero when the window closes.
    """
    wf = element_waveforms(period_traj, element)
    w, G = wf["w"], wf["G"]
    dw = np.diff(w)
    dG = np.diff(G)
    A = np.concatenate(([0.0], np.cumsum(0.5 * (G[:-1] + G[1:]) * dw)))
    Ahat = np.concatenate(([0.0], np.cumsum(0.5 * (w[:-1] + w[1:]) * dG)))
    return A, Ahat


def analysis_report(
    traj: Trajectory,
    element: Optional[MemElementSpec] = None,
    transient_fraction: float = 0.5,
    n: int = 2048,
    threshold: float = 0.5,
) -> dict:
    """Full waveform report: period, signature, loop quantities, warnings."""
    est = detect_period(traj, transient_fraction=transient_fraction)
    ptraj = extract_period(traj, est, n=n)
    quantities = table_quantities(ptraj, element)
    sig = classify_mmo(ptraj, threshold=threshold)
    warnings = []
    if not est.converged:
        warnings.append("period detector did not converge; treat T as approximate")
    if quantities.closure > 1e-4:
        warnings.append(
            f"period window does not close (relative defect {quantities.closure:.2e})"
        )
    d = {
        "period": est.to_dict(),
        "signature": [list(b) for b in sig],
        "signature_text": signature_string(sig),
        "quantities": json.loads(quantities.to_json()),
        "warnings": warnings,
    }
    return d
