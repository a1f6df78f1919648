"""Checking force laws and memory identities on simulated trajectories.

Each circuit model in this package carries a family of claims that every
solution must satisfy: second-derivative force laws for each coordinate
(with history entering through running integrals of the state), a
fourth-order scalar equation for the fast coordinate, and closed-form
reconstructions of the element state from the other coordinates.

None of these identities are imposed by the integrator -- it only steps
the first-order system -- so evaluating them on a recorded trajectory is
a real consistency test of both the model algebra and the integration.
This script runs all three models from generic initial data and prints
every applicable residual, normalized by the magnitude of the signal it
constrains.
"""

import numpy as np

from memodyn import (
    CanonicalChuaParams,
    IntegratorOptions,
    MmoParams,
    RegularChuaParams,
    integrate,
    quadratic_g,
    verify_all,
)

runs = [
    (
        "regular Chua",
        RegularChuaParams(k=1.05, alpha=1.8, beta=2.4, gamma=0.35, xi=1.4,
                          g=quadratic_g(-0.5, 0.25)),
        np.array([0.4, -0.2, 0.3, 0.1]),
    ),
    (
        "canonical Chua",
        CanonicalChuaParams(k=0.95, alpha=1.6, beta=2.1, gamma=0.28,
                            g=quadratic_g(-0.4, 0.2)),
        np.array([0.3, 0.2, -0.25, 0.15]),
    ),
    (
        "fast/slow oscillator",
        MmoParams(epsilon=0.12, alpha=1.3, K=0.8, beta=1.6, eta=2.0, s_c=1.1,
                  a_s=0.0, g=quadratic_g(-0.1, 0.1)),
        np.array([0.1, 0.0, 0.0, 0.0]),
    ),
]

opts = IntegratorOptions(method="dopri45", t0=0.0, t1=20.0, rtol=1e-10, atol=1e-12)

worst = 0.0
for label, params, start in runs:
    traj = integrate(params, start, opts)
    reports = verify_all(traj)
    print(f"{label}:")
    for rep in reports:
        status = "ok" if rep.normalized_max <= rep.tolerance else "FAILED"
        print(
            f"  {rep.claim:28s}  max residual {rep.normalized_max:9.2e}"
            f"  (tol {rep.tolerance:.0e})  {status}"
        )
        worst = max(worst, rep.normalized_max)
    print()

print(f"worst normalized residual across all models and claims: {worst:.2e}")
