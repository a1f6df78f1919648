"""Linear one-ports that are rms-equivalent to a periodic nonlinear element.

Given one period of the element's terminal voltage and current, construct
the parallel conductance-capacitance pair (and, dually, the series
resistance-inductance pair) that draws the same average power and the same
rms current at the same rms voltage.  The conductance carries the in-phase
power; the reactive branch absorbs the remaining rms magnitude, with the
fundamental frequency 2 pi / T fixing the element value.

By construction the admittance magnitude identity

    G**2 + (2 pi C / T)**2 == (integral of i**2) / (integral of v**2)

holds exactly (up to rounding), which makes it a sharp self-test.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt
from typing import Optional

import numpy as np

from .analysis import time_integral

# the radicand is a Cauchy-Schwarz gap, so it is nonnegative in exact
# arithmetic; tiny negative values are rounding and get clamped.
_RADICAND_REL_FLOOR = -1e-12


@dataclass(frozen=True)
class EquivalentGC:
    """Parallel G-C one-port matched to a periodic (v, i) waveform pair."""

    G: float
    C: float
    T: float
    v_rms: float
    i_rms: float
    power: float


@dataclass(frozen=True)
class EquivalentRL:
    """Series R-L one-port matched to a periodic (v, i) waveform pair."""

    R: float
    L: float
    T: float
    v_rms: float
    i_rms: float
    power: float


def _waveform_moments(t, v, i, T: Optional[float]):
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    if t.ndim != 1 or t.shape != v.shape or t.shape != i.shape:
        raise ValueError("mismatched waveform lengths")
    if t.size < 3:
        raise ValueError("degenerate waveform")
    period = float(T) if T is not None else float(t[-1] - t[0])
    if period <= 0:
        raise ValueError("degenerate waveform")
    sv = time_integral(t, v**2)
    si = time_integral(t, i**2)
    e = time_integral(t, v * i)
    return period, sv, si, e


def _reactive_root(sv: float, si: float, e: float) -> float:
    rad = sv * si - e**2
    floor = _RADICAND_REL_FLOOR * max(sv * si, e**2)
    if rad < floor:
        raise ValueError("degenerate waveform: negative reactive radicand")
    return sqrt(max(rad, 0.0))


def gc_equivalent(t, v, i, T: Optional[float] = None) -> EquivalentGC:
    """Parallel G-C equivalent of one period of a (v, i) waveform pair.

    G = (integral of v i) / (integral of v**2) matches the average power;
    C places the leftover rms content in the quadrature branch at the
    fundamental frequency.  T defaults to the waveform span.
    """
    period, sv, si, e = _waveform_moments(t, v, i, T)
    if sv <= 0.0:
        raise ValueError("degenerate waveform: zero voltage content")
    root = _reactive_root(sv, si, e)
    return EquivalentGC(
        G=e / sv,
        C=period / (2.0 * pi * sv) * root,
        T=period,
        v_rms=sqrt(sv / period),
        i_rms=sqrt(si / period),
        power=e / period,
    )


def rl_equivalent(t, v, i, T: Optional[float] = None) -> EquivalentRL:
    """Series R-L equivalent: the voltage/current dual of gc_equivalent."""
    period, sv, si, e = _waveform_moments(t, v, i, T)
    if si <= 0.0:
        raise ValueError("degenerate waveform: zero current content")
    root = _reactive_root(sv, si, e)
    return EquivalentRL(
        R=e / si,
        L=period / (2.0 * pi * si) * root,
        T=period,
        v_rms=sqrt(sv / period),
        i_rms=sqrt(si / period),
        power=e / period,
    )


def admittance_magnitude(eq: EquivalentGC) -> float:
    """|Y| of the G-C pair at its fundamental: sqrt(G^2 + (2 pi C / T)^2)."""
    return sqrt(eq.G**2 + (2.0 * pi * eq.C / eq.T) ** 2)


def impedance_magnitude(eq: EquivalentRL) -> float:
    """|Z| of the R-L pair at its fundamental: sqrt(R^2 + (2 pi L / T)^2)."""
    return sqrt(eq.R**2 + (2.0 * pi * eq.L / eq.T) ** 2)
