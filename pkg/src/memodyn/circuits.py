"""Three oscillator models built around a single memory element.

Each model couples three linear first-order equations to one state-dependent
conductance g(w), with w driven by the first coordinate.  The integrator sees
all of them through a common 9-component state vector

    [x, y, z, w, I_w, I_gG, I_gGt, I_y, I_z]

whose tail tracks the running integrals needed by the second-order force
reformulations: I_w' = w, I_gG' = g(w) w', I_gGt' = I_gG, I_y' = y,
I_z' = z (all zero at the start time).

Models
------
* ``MmoParams`` — a fast/slow relaxation oscillator with a small parameter
  ``epsilon`` on the fast coordinate and a constant bias ``a_s``; produces
  mixed large/small amplitude cycles.  The stored fast coordinate is the
  scaled one (physical value = eta * stored value), which keeps the state
  well-conditioned when eta is large.
* ``RegularChuaParams`` — the double-scroll-family circuit with the piecewise
  element replaced by a smooth polynomial conductance; the extra ``xi`` term
  feeds the drive back into the fast equation.
* ``CanonicalChuaParams`` — same family with the feedback term absent and the
  second equation inverted; dual to the regular form under sign reflection
  of the damping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict, field
from typing import Callable, Tuple, Union

import numpy as np

from .memelement import Polynomial, quadratic_g

N_STATE = 9


@dataclass(frozen=True)
class AugmentedState:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    w: float = 0.0
    I_w: float = 0.0
    I_gG: float = 0.0
    I_gGt: float = 0.0
    I_y: float = 0.0
    I_z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.x, self.y, self.z, self.w, self.I_w, self.I_gG, self.I_gGt, self.I_y, self.I_z]
        )

    @staticmethod
    def from_array(a) -> "AugmentedState":
        a = np.asarray(a, dtype=float)
        return AugmentedState(*a.tolist())


def as_state_array(s0) -> np.ndarray:
    """Accept an AugmentedState, a 4-vector (integrals zeroed) or a 9-vector."""
    if isinstance(s0, AugmentedState):
        return s0.as_array()
    a = np.asarray(s0, dtype=float).ravel()
    if a.size == 4:
        out = np.zeros(N_STATE)
        out[:4] = a
        return out
    if a.size == N_STATE:
        return a.copy()
    raise ValueError("initial state must have 4 or 9 components")


def _check_finite(name, value):
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class MmoParams:
    """Fast/slow oscillator parameters.

    epsilon scales the fast equation (must be positive and is where the
    stiffness lives), s_c is the common time-scale factor, eta the fast-
    coordinate scaling (>= 1), a_s the constant bias, and g the element
    response polynomial.
    """

    epsilon: float
    alpha: float
    K: float
    beta: float
    eta: float
    s_c: float
    a_s: float
    g: Polynomial

    def __post_init__(self):
        for name in ("epsilon", "alpha", "K", "beta", "eta", "s_c", "a_s"):
            _check_finite(name, getattr(self, name))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.s_c <= 0:
            raise ValueError("s_c must be positive")
        if self.eta < 1.0:
            raise ValueError("eta must be at least 1")


@dataclass(frozen=True)
class RegularChuaParams:
    """Double-scroll-family circuit with drive feedback term xi."""

    k: float
    alpha: float
    beta: float
    gamma: float
    xi: float
    g: Polynomial

    def __post_init__(self):
        for name in ("k", "alpha", "beta", "gamma", "xi"):
            _check_finite(name, getattr(self, name))


@dataclass(frozen=True)
class CanonicalChuaParams:
    """Feedback-free variant of the double-scroll-family circuit."""

    k: float
    alpha: float
    beta: float
    gamma: float
    g: Polynomial

    def __post_init__(self):
        for name in ("k", "alpha", "beta", "gamma"):
            _check_finite(name, getattr(self, name))


CircuitParams = Union[MmoParams, RegularChuaParams, CanonicalChuaParams]

_MODEL_TAGS = {
    MmoParams: "mmo",
    RegularChuaParams: "regular_chua",
    CanonicalChuaParams: "canonical_chua",
}


def model_tag(params: CircuitParams) -> str:
    try:
        return _MODEL_TAGS[type(params)]
    except KeyError:
        raise TypeError(f"not a circuit parameter object: {params!r}") from None


def rhs_mmo(t: float, s: np.ndarray, p: MmoParams) -> np.ndarray:
    x, y, z, w = s[0], s[1], s[2], s[3]
    gw = p.g(w)
    ds = np.empty(N_STATE)
    ds[0] = p.s_c / p.epsilon * (-y / p.eta - gw * x)
    ds[1] = p.s_c * p.alpha * (p.eta * x - p.K * y - z + p.a_s)
    ds[2] = -p.s_c * p.beta * y
    wdot = p.s_c * p.eta * x
    ds[3] = wdot
    ds[4] = w
    ds[5] = gw * wdot
    ds[6] = s[5]
    ds[7] = y
    ds[8] = z
    return ds


def rhs_regular_chua(t: float, s: np.ndarray, p: RegularChuaParams) -> np.ndarray:
    x, y, z, w = s[0], s[1], s[2], s[3]
    gw = p.g(w)
    ds = np.empty(N_STATE)
    ds[0] = p.k * p.alpha * (y + (p.xi - 1.0) * x - gw * x)
    ds[1] = p.k * (x - y + z)
    ds[2] = -p.k * (p.beta * y + p.gamma * z)
    wdot = p.k * x
    ds[3] = wdot
    ds[4] = w
    ds[5] = gw * wdot
    ds[6] = s[5]
    ds[7] = y
    ds[8] = z
    return ds


def rhs_canonical_chua(t: float, s: np.ndarray, p: CanonicalChuaParams) -> np.ndarray:
    x, y, z, w = s[0], s[1], s[2], s[3]
    gw = p.g(w)
    ds = np.empty(N_STATE)
    ds[0] = p.k * p.alpha * (y - gw * x)
    ds[1] = p.k * (z - x)
    ds[2] = -p.k * (p.beta * y + p.gamma * z)
    wdot = p.k * x
    ds[3] = wdot
    ds[4] = w
    ds[5] = gw * wdot
    ds[6] = s[5]
    ds[7] = y
    ds[8] = z
    return ds


def rhs_for(params: CircuitParams) -> Tuple[str, Callable]:
    """Model tag and an f(t, s) -> ds closure for the integrator."""
    tag = model_tag(params)
    fn = {"mmo": rhs_mmo, "regular_chua": rhs_regular_chua, "canonical_chua": rhs_canonical_chua}[tag]
    return tag, lambda t, s: fn(t, s, params)


def physical_fast(params: CircuitParams, traj_or_x):
    """Physical fast coordinate: eta * stored value for the fast/slow model,
    the stored value itself otherwise."""
    x = traj_or_x.column("x") if hasattr(traj_or_x, "column") else np.asarray(traj_or_x)
    if isinstance(params, MmoParams):
        return params.eta * x
    return x


def is_equilibrium(params: CircuitParams, s0, tol: float = 1e-12) -> bool:
    _, rhs = rhs_for(params)
    ds = rhs(0.0, as_state_array(s0))
    return bool(np.max(np.abs(ds[:4])) <= tol)


def linear_system_matrix(params: CircuitParams) -> np.ndarray:
    """The 9x9 generator of the augmented dynamics when g is constant.

    Only valid for a degree-0 response polynomial (and, for the fast/slow
    model, zero bias); raises ValueError otherwise.  Intended for closed-form
    cross-checks against matrix exponentials.
    """
    if not params.g.is_constant():
        raise ValueError("linear system matrix requires a constant g")
    g0 = params.g.coef[0]
    A = np.zeros((N_STATE, N_STATE))
    if isinstance(params, MmoParams):
        if params.a_s != 0.0:
            raise ValueError("linear system matrix requires zero bias")
        s, e, al, K, be, eta = (
            params.s_c,
            params.epsilon,
            params.alpha,
            params.K,
            params.beta,
            params.eta,
        )
        A[0, 0] = -s / e * g0
        A[0, 1] = -s / (e * eta)
        A[1, 0] = s * al * eta
        A[1, 1] = -s * al * K
        A[1, 2] = -s * al
        A[2, 1] = -s * be
        A[3, 0] = s * eta
        A[5, 0] = g0 * s * eta
    elif isinstance(params, RegularChuaParams):
        k, al, be, ga, xi = params.k, params.alpha, params.beta, params.gamma, params.xi
        A[0, 0] = k * al * (xi - 1.0 - g0)
        A[0, 1] = k * al
        A[1, 0] = k
        A[1, 1] = -k
        A[1, 2] = k
        A[2, 1] = -k * be
        A[2, 2] = -k * ga
        A[3, 0] = k
        A[5, 0] = g0 * k
    elif isinstance(params, CanonicalChuaParams):
        k, al, be, ga = params.k, params.alpha, params.beta, params.gamma
        A[0, 0] = -k * al * g0
        A[0, 1] = k * al
        A[1, 0] = -k
        A[1, 2] = k
        A[2, 1] = -k * be
        A[2, 2] = -k * ga
        A[3, 0] = k
        A[5, 0] = g0 * k
    else:
        raise TypeError(f"not a circuit parameter object: {params!r}")
    A[4, 3] = 1.0
    A[6, 5] = 1.0
    A[7, 1] = 1.0
    A[8, 2] = 1.0
    return A


def params_to_json(params: CircuitParams) -> str:
    d = {"model": model_tag(params)}
    for key, val in asdict(params).items():
        d[key] = list(val["coef"]) if key == "g" else val
    return json.dumps(d, indent=2)


def params_from_json(text_or_dict) -> CircuitParams:
    d = dict(text_or_dict) if isinstance(text_or_dict, dict) else json.loads(text_or_dict)
    model = d.pop("model", None)
    if model not in _MODEL_TAGS.values():
        raise ValueError(f"unknown model {model!r}")
    cls = {v: k for k, v in _MODEL_TAGS.items()}[model]
    try:
        g = Polynomial(tuple(d.pop("g")))
        return cls(g=g, **d)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad parameter block for model {model!r}: {exc}") from None


def default_mmo_params() -> MmoParams:
    """Shipped starting point for the two-timescale model.

    From a near-zero start this point settles onto a stable relaxation
    cycle (single large excursion per period).  It is meant as the seed
    of a parameter sweep, not as a tuned mixed-mode regime; use the sweep
    tooling to explore neighbouring biases and curvatures.
    """
    return MmoParams(
        epsilon=0.01,
        alpha=1.0,
        K=1.0,
        beta=1.0,
        eta=10.0,
        s_c=1.0,
        a_s=0.01,
        g=quadratic_g(-0.1, 0.1),
    )
