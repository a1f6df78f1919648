"""Second-order force reformulations of the circuit models, with memory.

Each third/fourth-order circuit collapses onto one coordinate obeying a
Newtonian equation  m q'' = F(t, q, q', memory)  with unit mass, where the
memory enters through running integrals of the trajectory (I_w, I_gG, I_gGt,
I_y, I_z) plus constants fixed by the state at the window start.  This module
evaluates those force laws along a computed trajectory and reports how well
the identity  q'' = F  holds — a strong end-to-end consistency check of
model, integrator and bookkeeping at once.

Also provided: fourth-order single-variable ("jounce") residuals that
eliminate the memory terms entirely for two of the models, and three
independent reconstructions of the element state w from single measured
coordinates.

Exact time derivatives of the sampled states are produced by Taylor-jet
recursion through the right-hand side (see _jets), never by finite
differences, so residuals measure modelling error and integrator error only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _jets
from .circuits import (
    CanonicalChuaParams,
    CircuitParams,
    MmoParams,
    RegularChuaParams,
    model_tag,
)
from .integrator import Trajectory, cumulative_integral

MASS = 1.0  # the reformulations are stated for a unit inertial coefficient


@dataclass(frozen=True)
class ForceContext:
    """A trajectory window prepared for force-law evaluation.

    Times are measured from the window start and the running integrals are
    rebased to vanish there, so the start-state correction constants inside
    the force laws are exactly the first sample's core state.
    """

    params: CircuitParams
    t: np.ndarray
    state: np.ndarray  # (N, 9), integrals rebased
    start: np.ndarray  # (9,)

    def col(self, idx: int) -> np.ndarray:
        return self.state[:, idx]


def force_context(traj: Trajectory) -> ForceContext:
    if traj.params is None:
        raise ValueError("trajectory carries no parameter object")
    t = traj.times - traj.times[0]
    s = traj.states.copy()
    s0 = traj.states[0]
    # Rebase the five integral columns so they are zero at the window start.
    # I_gGt integrates I_gG, so its rebase picks up a secular term.
    s[:, 4] -= s0[4]
    s[:, 6] -= s0[6] + s0[5] * t
    s[:, 5] -= s0[5]
    s[:, 7] -= s0[7]
    s[:, 8] -= s0[8]
    return ForceContext(traj.params, t, s, s[0].copy())


# ---------------------------------------------------------------------------
# exact sample derivatives via jets


def _jet_rhs(params: CircuitParams):
    g_coef = params.g.coef

    if isinstance(params, MmoParams):
        s, e, al, K, be, eta, a_s = (
            params.s_c,
            params.epsilon,
            params.alpha,
            params.K,
            params.beta,
            params.eta,
            params.a_s,
        )

        def rhs(S):
            x, y, z, w = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
            gw = _jets.jet_polyval(g_coef, w)
            F = np.zeros_like(S)
            F[:, 0] = s / e * (-y / eta - _jets.jet_mul(gw, x))
            F[:, 1] = s * al * (eta * x - K * y - z)
            F[0, 1, :] += s * al * a_s
            F[:, 2] = -s * be * y
            F[:, 3] = s * eta * x
            F[:, 4] = w
            F[:, 5] = _jets.jet_mul(gw, F[:, 3])
            F[:, 6] = S[:, 5]
            F[:, 7] = y
            F[:, 8] = z
            return F

        return rhs

    if isinstance(params, RegularChuaParams):
        k, al, be, ga, xi = params.k, params.alpha, params.beta, params.gamma, params.xi

        def rhs(S):
            x, y, z, w = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
            gw = _jets.jet_polyval(g_coef, w)
            F = np.zeros_like(S)
            F[:, 0] = k * al * (y + (xi - 1.0) * x - _jets.jet_mul(gw, x))
            F[:, 1] = k * (x - y + z)
            F[:, 2] = -k * (be * y + ga * z)
            F[:, 3] = k * x
            F[:, 4] = w
            F[:, 5] = _jets.jet_mul(gw, F[:, 3])
            F[:, 6] = S[:, 5]
            F[:, 7] = y
            F[:, 8] = z
            return F

        return rhs

    if isinstance(params, CanonicalChuaParams):
        k, al, be, ga = params.k, params.alpha, params.beta, params.gamma

        def rhs(S):
            x, y, z, w = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
            gw = _jets.jet_polyval(g_coef, w)
            F = np.zeros_like(S)
            F[:, 0] = k * al * (y - _jets.jet_mul(gw, x))
            F[:, 1] = k * (z - x)
            F[:, 2] = -k * (be * y + ga * z)
            F[:, 3] = k * x
            F[:, 4] = w
            F[:, 5] = _jets.jet_mul(gw, F[:, 3])
            F[:, 6] = S[:, 5]
            F[:, 7] = y
            F[:, 8] = z
            return F

        return rhs

    raise TypeError(f"not a circuit parameter object: {params!r}")


def derivative_chain(params: CircuitParams, states, order: int = 4) -> np.ndarray:
    """Time derivatives 0..order of every state component at every sample.

    Parameters
    ----------
    params : circuit parameters (fix the vector field).
    states : (N, 9) sample states.
    order : highest derivative order.

    Returns
    -------
    D : (order+1, 9, N) with D[m, j] the m-th derivative of component j.
        For the fast/slow model the x rows are derivatives of the *stored*
        (scaled) fast coordinate.
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    S = _jets.state_jets(_jet_rhs(params), states, order)
    return _jets.jets_to_derivatives(S)


# ---------------------------------------------------------------------------
# force laws (unit mass)


def force_regular_chua(ctx: ForceContext) -> np.ndarray:
    """Memory force driving w for the drive-feedback circuit."""
    p = ctx.params
    if not isinstance(p, RegularChuaParams):
        raise TypeError("context does not hold regular-circuit parameters")
    k, al, be, ga, xi = p.k, p.alpha, p.beta, p.gamma, p.xi
    x0, y0, z0, w0 = ctx.start[:4]
    t = ctx.t
    w, I_w, I_gG, I_gGt = ctx.col(3), ctx.col(4), ctx.col(5), ctx.col(6)
    wdot = k * ctx.col(0)
    hw = xi - 1.0 - p.g(w)
    # running integrals of h(w) w' and its time integral, via G-bookkeeping
    J_h = (xi - 1.0) * (w - w0) - I_gG
    K_h = (xi - 1.0) * (I_w - w0 * t) - I_gGt
    c0 = k**2 * (al * y0 + (1.0 + ga) * x0 + (be + ga - al) * w0)
    c1 = k**3 * (al * z0 + (be + ga) * x0 + al * ga * (y0 - w0))
    return (
        k * al * hw * wdot
        - k * (1.0 + ga) * wdot
        + k**2 * (al - be - ga) * w
        + al * k**3 * ga * I_w
        + al * k**2 * (1.0 + ga) * J_h
        + al * k**3 * (be + ga) * K_h
        + c0
        + c1 * t
    )


def force_canonical_chua(ctx: ForceContext) -> np.ndarray:
    """Memory force driving w for the feedback-free circuit."""
    p = ctx.params
    if not isinstance(p, CanonicalChuaParams):
        raise TypeError("context does not hold canonical-circuit parameters")
    k, al, be, ga = p.k, p.alpha, p.beta, p.gamma
    x0, y0, z0, w0 = ctx.start[:4]
    t = ctx.t
    w, I_w, I_gG, I_gGt = ctx.col(3), ctx.col(4), ctx.col(5), ctx.col(6)
    wdot = k * ctx.col(0)
    c0 = k**2 * (al * y0 + (al + be) * w0 + ga * x0)
    c1 = k**3 * (al * z0 + be * x0 + al * ga * (y0 + w0))
    return (
        -k * al * p.g(w) * wdot
        - k * ga * wdot
        - k**2 * (al + be) * w
        - al * k**3 * ga * I_w
        - al * k**2 * ga * I_gG
        - al * k**3 * be * I_gGt
        + c0
        + c1 * t
    )


def _mmo_ctx(ctx: ForceContext) -> MmoParams:
    p = ctx.params
    if not isinstance(p, MmoParams):
        raise TypeError("context does not hold fast/slow-model parameters")
    return p


def force_mmo_w(ctx: ForceContext) -> np.ndarray:
    """Memory force driving w for the fast/slow model."""
    p = _mmo_ctx(ctx)
    s, e, al, K, be = p.s_c, p.epsilon, p.alpha, p.K, p.beta
    y0, z0, w0 = ctx.start[1], ctx.start[2], ctx.start[3]
    wdot0 = s * p.eta * ctx.start[0]
    t = ctx.t
    w, I_gG, I_gGt = ctx.col(3), ctx.col(5), ctx.col(6)
    wdot = s * p.eta * ctx.col(0)
    c0 = s * y0 - s * al * (1.0 - be * e) * w0 - al * K * e * wdot0
    c1 = s * al * be * e * wdot0 - s**2 * al * z0
    return -(s / e) * (
        (p.g(w) + al * K * e) * wdot
        + s * al * (1.0 - be * e) * w
        + s * al * K * I_gG
        - s**2 * al * be * I_gGt
        + s**2 * al * p.a_s * t
        + c0
        + c1 * t
    )


def force_mmo_x(ctx: ForceContext) -> np.ndarray:
    """Memory force on the physical fast coordinate of the fast/slow model."""
    p = _mmo_ctx(ctx)
    s, e, al, K, be = p.s_c, p.epsilon, p.alpha, p.K, p.beta
    x = p.eta * ctx.col(0)
    x0, z0 = p.eta * ctx.start[0], ctx.start[2]
    w, I_gG = ctx.col(3), ctx.col(5)
    gw = p.g(w)
    xdot = (s / e) * (-ctx.col(1) - gw * x)
    return -(s / e) * (
        (al * K * e + gw) * xdot
        + (s * al * (1.0 - be * e) + s * al * K * gw + s * p.g.deriv()(w) * x) * x
        - s * al * be * I_gG
        + s * al * (p.a_s - z0 + be * e * x0)
    )


def force_mmo_y(ctx: ForceContext) -> np.ndarray:
    """Memory force on the slow coordinate y of the fast/slow model."""
    p = _mmo_ctx(ctx)
    s, e, al, K, be = p.s_c, p.epsilon, p.alpha, p.K, p.beta
    y, z0 = ctx.col(1), ctx.start[2]
    w, I_y = ctx.col(3), ctx.col(7)
    gw = p.g(w)
    ydot = s * al * (p.eta * ctx.col(0) - K * y - ctx.col(2) + p.a_s)
    return (
        -(s * al * K + (s / e) * gw) * ydot
        + s**2 * al * (be - 1.0 / e - (K / e) * gw) * y
        + (s**3 * al * be / e) * gw * I_y
        + (s**2 * al / e) * gw * (p.a_s - z0)
    )


def force_mmo_z(ctx: ForceContext) -> np.ndarray:
    """Memory force on the slowest coordinate z of the fast/slow model."""
    p = _mmo_ctx(ctx)
    s, e, al, K, be = p.s_c, p.epsilon, p.alpha, p.K, p.beta
    z, I_gG = ctx.col(2), ctx.col(5)
    x0, z0 = p.eta * ctx.start[0], ctx.start[2]
    zdot = -s * be * ctx.col(1)
    return (
        -s * al * K * zdot
        + s**2 * al * (be - 1.0 / e) * z
        + (s**2 * al * be / e) * I_gG
        + (s**2 * al / e) * z0
        - s**2 * al * be * (x0 + p.a_s)
    )


# ---------------------------------------------------------------------------
# residual reports


@dataclass(frozen=True)
class ResidualReport:
    claim: str
    max_abs: float
    rms: float
    normalized_max: float
    n_samples: int
    mass: float = MASS
    tolerance: Optional[float] = None

    @property
    def passed(self) -> Optional[bool]:
        if self.tolerance is None:
            return None
        return self.normalized_max <= self.tolerance

    def summary(self) -> str:
        status = (
            ""
            if self.tolerance is None
            else ("  PASS" if self.passed else "  FAIL")
        )
        return (
            f"{self.claim}: normalized max {self.normalized_max:.3e} "
            f"(max {self.max_abs:.3e}, rms {self.rms:.3e}, n={self.n_samples})"
            + status
        )


def _report(claim, residual, scale, tol) -> ResidualReport:
    residual = np.asarray(residual)
    norm = max(1.0, float(np.max(np.abs(scale))))
    return ResidualReport(
        claim=claim,
        max_abs=float(np.max(np.abs(residual))),
        rms=float(np.sqrt(np.mean(residual**2))),
        normalized_max=float(np.max(np.abs(residual)) / norm),
        n_samples=int(residual.size),
        tolerance=tol,
    )


_FORCE_LAWS = {
    "force_w_regular": (RegularChuaParams, 3, force_regular_chua),
    "force_w_canonical": (CanonicalChuaParams, 3, force_canonical_chua),
    "force_w_mmo": (MmoParams, 3, force_mmo_w),
    "force_x_mmo": (MmoParams, 0, force_mmo_x),
    "force_y_mmo": (MmoParams, 1, force_mmo_y),
    "force_z_mmo": (MmoParams, 2, force_mmo_z),
}


def force_residual(traj: Trajectory, claim: str, tol: Optional[float] = None) -> ResidualReport:
    """Residual q'' - F(...)/m for one force law along a trajectory window."""
    cls, col, law = _FORCE_LAWS[claim]
    ctx = force_context(traj)
    if not isinstance(ctx.params, cls):
        raise TypeError(f"{claim} does not apply to {model_tag(ctx.params)!r}")
    D = derivative_chain(ctx.params, ctx.state, order=2)
    accel = D[2, col]
    if isinstance(ctx.params, MmoParams) and col == 0:
        accel = ctx.params.eta * accel  # stored fast coordinate is scaled
    force = law(ctx) / MASS
    return _report(claim, accel - force, accel, tol)


def jounce_residual_canonical(traj: Trajectory, tol: Optional[float] = None) -> ResidualReport:
    """Fourth-order single-variable identity for the feedback-free circuit.

    All memory integrals cancel after two more time derivatives, leaving a
    relation between w and its first four derivatives only.
    """
    ctx = force_context(traj)
    p = ctx.params
    if not isinstance(p, CanonicalChuaParams):
        raise TypeError("jounce identity applies to the feedback-free circuit")
    k, al, be, ga = p.k, p.alpha, p.beta, p.gamma
    D = derivative_chain(p, ctx.state, order=4)
    w, w1, w2, w3, w4 = D[0, 3], D[1, 3], D[2, 3], D[3, 3], D[4, 3]
    g, g1, g2 = p.g(w), p.g.deriv()(w), p.g.deriv(2)(w)
    lhs = (
        w4
        + k * (al * g + ga) * w3
        + k * (k * al + k * be + k * al * ga * g + 3.0 * al * g1 * w1) * w2
        + k**3 * al * (be * g + ga) * w1
        + k**2 * al * ga * g1 * w1**2
        + k * al * g2 * w1**3
    )
    return _report("jounce_canonical", lhs, w4, tol)


def jounce_residual_mmo(traj: Trajectory, tol: Optional[float] = None) -> ResidualReport:
    """Fourth-order single-variable identity for the fast/slow model.

    Stated for the bias-free model; with a nonzero bias use the second-order
    force check instead.
    """
    ctx = force_context(traj)
    p = ctx.params
    if not isinstance(p, MmoParams):
        raise TypeError("jounce identity applies to the fast/slow model")
    if p.a_s != 0.0:
        raise ValueError("jounce residual requires zero bias")
    s, e, al, K, be = p.s_c, p.epsilon, p.alpha, p.K, p.beta
    D = derivative_chain(p, ctx.state, order=4)
    w = D[0, 3]
    w1, w2, w3, w4 = D[1, 3], D[2, 3], D[3, 3], D[4, 3]
    g, g1, g2 = p.g(w), p.g.deriv()(w), p.g.deriv(2)(w)
    lhs = (
        e * w4
        + s * (al * K * e + g) * w3
        + (s**2 * al * (1.0 - be * e) + s**2 * al * K * g + 3.0 * s * g1 * w1) * w2
        - s**3 * al * be * g * w1
        + s**2 * al * K * g1 * w1**2
        + s * g2 * w1**3
    )
    return _report("jounce_mmo", lhs, e * w4, tol)


def jounce_characteristic_coefficients(params: CircuitParams) -> tuple:
    """Quartic coefficients (descending powers) of the jounce identity when g
    is constant — they must match the characteristic polynomial of the core
    linear block times lambda."""
    if not params.g.is_constant():
        raise ValueError("characteristic form requires a constant g")
    g0 = params.g.coef[0]
    if isinstance(params, CanonicalChuaParams):
        k, al, be, ga = params.k, params.alpha, params.beta, params.gamma
        return (
            1.0,
            k * (al * g0 + ga),
            k**2 * (al + be + al * ga * g0),
            k**3 * al * (be * g0 + ga),
            0.0,
        )
    if isinstance(params, MmoParams):
        s, e, al, K, be = (
            params.s_c,
            params.epsilon,
            params.alpha,
            params.K,
            params.beta,
        )
        return (
            e,
            s * (al * K * e + g0),
            s**2 * al * (1.0 - be * e) + s**2 * al * K * g0,
            -(s**3) * al * be * g0,
            0.0,
        )
    raise TypeError("jounce identity covers the feedback-free and fast/slow models")


# ---------------------------------------------------------------------------
# reconstructing the element state from single measured coordinates


def reconstruct_w_from_x(traj: Trajectory) -> np.ndarray:
    """w from the fast coordinate alone, by quadrature of w' = s_c * x.

    Uses the derivative-corrected cumulative rule with exact x' from the
    model equations, so the quadrature is locally cubic.
    """
    ctx = force_context(traj)
    p = _mmo_ctx(ctx)
    s = p.s_c
    x = p.eta * ctx.col(0)
    xdot = s / p.epsilon * (-ctx.col(1) - p.g(ctx.col(3)) * x)
    return ctx.start[3] + s * cumulative_integral(ctx.t, x, xdot)


def reconstruct_w_from_y(traj: Trajectory) -> np.ndarray:
    """w from the slow coordinate and its running integrals, in closed form."""
    ctx = force_context(traj)
    p = _mmo_ctx(ctx)
    s = p.s_c
    y, I_y, I_z = ctx.col(1), ctx.col(7), ctx.col(8)
    y0, w0 = ctx.start[1], ctx.start[3]
    return (
        w0
        + (y - y0) / p.alpha
        + s * p.K * I_y
        + s * I_z
        - s * p.a_s * ctx.t
    )


def reconstruct_w_from_z(traj: Trajectory) -> np.ndarray:
    """w from the slowest coordinate: its derivative is -s_c * beta * y, so the
    slow-coordinate identity can be rewritten in z alone plus one integral."""
    ctx = force_context(traj)
    p = _mmo_ctx(ctx)
    s, be = p.s_c, p.beta
    z, I_z = ctx.col(2), ctx.col(8)
    z0, w0 = ctx.start[2], ctx.start[3]
    zdot = -s * be * ctx.col(1)
    zdot0 = -s * be * ctx.start[1]
    return (
        w0
        - (zdot - zdot0) / (s * p.alpha * be)
        - (p.K / be) * (z - z0)
        + s * I_z
        - s * p.a_s * ctx.t
    )


def reconstruction_report(traj: Trajectory, which: str, tol: Optional[float] = None) -> ResidualReport:
    rec = {
        "x": reconstruct_w_from_x,
        "y": reconstruct_w_from_y,
        "z": reconstruct_w_from_z,
    }[which](traj)
    w = traj.column("w")
    return _report(f"reconstruct_w_from_{which}", rec - w, w, tol)


def verify_all(
    traj: Trajectory,
    force_tol: float = 1e-5,
    reconstruct_tol: float = 1e-6,
) -> list:
    """Every applicable identity for the trajectory's model, as reports."""
    if traj.params is None:
        raise ValueError("trajectory carries no parameter object")
    tag = model_tag(traj.params)
    reports = []
    if tag == "regular_chua":
        reports.append(force_residual(traj, "force_w_regular", force_tol))
    elif tag == "canonical_chua":
        reports.append(force_residual(traj, "force_w_canonical", force_tol))
        reports.append(jounce_residual_canonical(traj, force_tol))
    else:
        for claim in ("force_w_mmo", "force_x_mmo", "force_y_mmo", "force_z_mmo"):
            reports.append(force_residual(traj, claim, force_tol))
        if traj.params.a_s == 0.0:
            reports.append(jounce_residual_mmo(traj, force_tol))
        for which in ("x", "y", "z"):
            reports.append(reconstruction_report(traj, which, reconstruct_tol))
    return reports
