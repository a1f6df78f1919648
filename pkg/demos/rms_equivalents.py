"""Distilling a one-period waveform pair into an equivalent linear port.

Any periodic voltage/current pair (v, i) defines three moments: the two
mean squares and the mean product.  Matching those moments with a
conductance in parallel with a capacitance -- or dually, a resistance in
series with an inductance -- gives the unique linear one-port with the
same rms drive, rms response, and average power over the period.

First we sanity-check the extraction on a synthetic port whose answer
is known exactly; then we distill the memory element of a fast/slow
oscillator on its polished limit cycle.
"""

import numpy as np
from scipy.interpolate import CubicSpline

from memodyn import (
    IntegratorOptions,
    MemElementKind,
    MemElementSpec,
    MmoParams,
    admittance_magnitude,
    detect_period,
    eval_g,
    gc_equivalent,
    impedance_magnitude,
    integrate,
    physical_fast,
    quadratic_g,
    refine_cycle,
    rl_equivalent,
)

# --- 1. Known linear port: recover G and C from its waveforms. -------------
# The fit matches mean-square voltage, mean-square current and average
# power, reading the reactive part at the fundamental; a single-harmonic
# port is therefore recovered exactly, while overtones in the drive fold
# into an rms-weighted effective capacitance.
G_true, C_true, T = 0.7, 0.05, 2.0
omega = 2.0 * np.pi / T
t = np.linspace(0.0, T, 4097)
v = 1.3 * np.sin(omega * t)
i = G_true * v + C_true * 1.3 * omega * np.cos(omega * t)

eq = gc_equivalent(t, v, i, T=T)
print("synthetic parallel port, single harmonic:")
print(f"  G = {eq.G:.10f}   (true {G_true})")
print(f"  C = {eq.C:.10f}   (true {C_true})")
print()

# --- 2. The memory element on a closed oscillator cycle. -------------------
params = MmoParams(
    epsilon=0.1, alpha=1.0, K=1.0, beta=1.0, eta=2.0, s_c=1.0, a_s=0.0,
    g=quadratic_g(-0.1, 0.1),
)
traj = integrate(
    params,
    np.array([0.1, 0.0, 0.0, 0.0]),
    IntegratorOptions(method="dopri45", t0=0.0, t1=60.0, rtol=1e-10, atol=1e-12, n_record=8192),
)
est = detect_period(traj)
anchor = CubicSpline(traj.times, traj.states, axis=0)(est.t_start)[:4]
s_star, T_star = refine_cycle(params, anchor, est.T)
cycle = integrate(
    params,
    np.concatenate([s_star, np.zeros(5)]),
    IntegratorOptions(method="dopri45", t0=0.0, t1=T_star, rtol=1e-12, atol=1e-14, n_record=8192),
)

element = MemElementSpec(kind=MemElementKind.VCMR, g=params.g)
v = physical_fast(params, cycle)
i = eval_g(element, cycle.column("w")) * v

gc = gc_equivalent(cycle.times, v, i)
rl = rl_equivalent(cycle.times, v, i)

print(f"memory element over one period (T = {gc.T:.6f}):")
print(f"  rms voltage        {gc.v_rms:.6f}")
print(f"  rms current        {gc.i_rms:.6f}")
print(f"  average power      {gc.power:+.6f}")
print(f"  parallel G-C       G = {gc.G:+.6f},  C = {gc.C:+.6e}")
print(f"  series R-L         R = {rl.R:+.6f},  L = {rl.L:+.6e}")
print(f"  |admittance|       {admittance_magnitude(gc):.6f}")
print(f"  |impedance|        {impedance_magnitude(rl):.6f}")
print()

# Both fits describe the same waveform pair, so the admittance magnitude
# of one is the reciprocal impedance magnitude of the other (each equals
# the rms current-to-voltage ratio, in its own direction).
mag_gap = abs(admittance_magnitude(gc) * impedance_magnitude(rl) - 1.0)
print(f"|Y| * |Z| - 1 (parallel vs series fit of the same pair): {mag_gap:.2e}")

# An element with negative average power over the cycle is pumping energy
# into the rest of the circuit -- the locally active regime that keeps the
# oscillation alive.  The fitted conductance inherits that sign.
if gc.power < 0.0:
    print("negative average power: the element is active on this cycle, "
          "and the fitted G is negative accordingly.")
