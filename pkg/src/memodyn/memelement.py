"""Memory elements with polynomial state dependence.

An element is described by an algebraic transfer y(t) = g(w(t)) x(t) together
with a state equation w'(t) = x(t): the instantaneous response is scaled by a
function of the accumulated history of the drive.  Six element kinds cover the
resistive, capacitive and inductive cases depending on which electrical
quantities play the roles of x, y and w.

g is a polynomial in w (ascending coefficients).  Its antiderivative G, fixed
by G(0) = 0, is the natural potential for loop/action bookkeeping downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as npoly


class MemElementKind(str, Enum):
    """Element kind, named by what controls it and what it behaves as.

    The triple (x, y, w) maps onto electrical quantities as follows::

        VCMR  x=v    y=i    w=flux          (voltage-controlled memristive)
        CCMR  x=i    y=v    w=charge        (current-controlled memristive)
        QCMC  x=q    y=v    w=int. charge   (charge-controlled memcapacitive)
        VCMC  x=v    y=q    w=flux          (voltage-controlled memcapacitive)
        FCML  x=flux y=i    w=int. flux     (flux-controlled meminductive)
        CCML  x=i    y=flux w=charge        (current-controlled meminductive)
    """

    VCMR = "VCMR"
    CCMR = "CCMR"
    QCMC = "QCMC"
    VCMC = "VCMC"
    FCML = "FCML"
    CCML = "CCML"


# role table: for each kind, which of (x, y) is the voltage-like and which the
# current-like quantity, and whether that quantity is a stored sample or the
# time derivative of one.  ("x'", "y'") mark derivative-valued roles.
_VI_ROLES = {
    MemElementKind.VCMR: ("x", "y"),
    MemElementKind.CCMR: ("y", "x"),
    MemElementKind.QCMC: ("y", "x'"),
    MemElementKind.VCMC: ("x", "y'"),
    MemElementKind.FCML: ("x'", "y"),
    MemElementKind.CCML: ("y'", "x"),
}


def vi_roles(kind: MemElementKind) -> tuple[str, str]:
    """Return (voltage_role, current_role) for a kind, using 'x', 'y', "x'", "y'"."""
    return _VI_ROLES[MemElementKind(kind)]


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with ascending coefficients: coef[k] multiplies w**k."""

    coef: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coef)
        if not c:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coef", c)

    def __call__(self, w):
        return npoly.polyval(w, self.coef)

    def deriv(self, m: int = 1) -> "Polynomial":
        d = npoly.polyder(self.coef, m)
        return Polynomial(tuple(d) if len(d) else (0.0,))

    def antideriv(self) -> "Polynomial":
        """Antiderivative with zero constant term."""
        return Polynomial(tuple(npoly.polyint(self.coef)))

    @property
    def degree(self) -> int:
        return len(self.coef) - 1

    def is_constant(self) -> bool:
        return all(c == 0.0 for c in self.coef[1:])


def quadratic_g(a: float, b: float) -> Polynomial:
    """The even-quadratic response g(w) = a + 3 b w**2 (so G(w) = a w + b w**3)."""
    return Polynomial((a, 0.0, 3.0 * b))


@dataclass(frozen=True)
class MemElementSpec:
    """An element kind together with its response polynomial g."""

    kind: MemElementKind
    g: Polynomial

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind.value, "g": list(self.g.coef)})

    @staticmethod
    def from_json(text: str) -> "MemElementSpec":
        d = json.loads(text)
        return MemElementSpec(MemElementKind(d["kind"]), Polynomial(tuple(d["g"])))


def eval_g(spec: MemElementSpec, w):
    """Evaluate the response polynomial g at state value(s) w."""
    return spec.g(w)


def eval_G(spec: MemElementSpec, w):
    """Evaluate the accumulated response G(w) = integral of g from 0 to w."""
    return spec.g.antideriv()(w)


def simulate_element(spec: MemElementSpec, t, x, w0: float = 0.0):
    """Drive an element with a sampled waveform and return its state and output.

    Parameters
    ----------
    spec : MemElementSpec
    t : array_like
        Sample times, strictly increasing.
    x : array_like
        Drive samples x(t); the state obeys w' = x.
    w0 : float
        Initial state value.

    Returns
    -------
    w, y : ndarray
        State history (x integrated by the same cubic quadrature rule the
        integrator module uses for resampled output) and the element output
        y = g(w) x.  The output is exactly zero wherever the drive is zero,
        whatever the history — the pinched-loop fingerprint.
    """
    from .integrator import cumulative_integral

    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.size == 0 or x.size == 0:
        raise ValueError("empty waveform")
    if t.shape != x.shape or t.ndim != 1:
        raise ValueError("t and x must be 1-D arrays of equal length")
    if t.size < 2:
        raise ValueError("empty waveform")
    w = w0 + cumulative_integral(t, x)
    y = spec.g(w) * x
    return w, y
