"""Independent one-dimensional reference solutions of ``q_t + q q_s = nu q_ss``.

Two oracles that share no code with the 2D solvers or the Hopf-Cole
quadrature:

* the closed-form solution for step data, and
* a Crank-Nicolson finite-difference solver (Newton on the implicit
  nonlinear system, tridiagonal solves).
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import expit, log_ndtr

from .errors import NoConvergence


def riemann_viscous(s, t, u_left, u_right, nu):
    """Exact solution at time ``t > 0`` for the step ``u_left | u_right`` at ``s = 0``."""
    s = np.asarray(s, dtype=float)
    root = np.sqrt(2.0 * nu * t)
    log_a = -u_left * s / (2 * nu) + u_left**2 * t / (4 * nu) + log_ndtr(-(s - u_left * t) / root)
    log_b = -u_right * s / (2 * nu) + u_right**2 * t / (4 * nu) + log_ndtr((s - u_right * t) / root)
    return u_left + (u_right - u_left) * expit(log_b - log_a)


def crank_nicolson(u0, s, nu, t0, t1, dt, boundary, newton_tol=1e-13, max_newton=30):
    """Advance nodal values ``u0`` on the uniform grid ``s`` from ``t0`` to ``t1``.

    ``boundary(t)`` returns the Dirichlet pair ``(left, right)``. Fluxes
    ``u^2/2`` and the diffusion are both centered, so the scheme is second
    order in space and time.
    """
    s = np.asarray(s, dtype=float)
    h = s[1] - s[0]
    u = np.array(u0, dtype=float, copy=True)
    nsteps = max(1, int(np.ceil((t1 - t0) / dt - 1e-12)))
    dt = (t1 - t0) / nsteps
    lam = nu / (h * h)

    def operator(v):
        # interior values of  (v^2/2)_s - nu v_ss
        f = 0.5 * v * v
        return (f[2:] - f[:-2]) / (2 * h) - lam * (v[2:] - 2 * v[1:-1] + v[:-2])

    t = t0
    for _ in range(nsteps):
        t_new = t + dt
        left, right = boundary(t_new)
        old = operator(u)
        v = u.copy()
        v[0], v[-1] = left, right
        for _ in range(max_newton):
            res = v[1:-1] - u[1:-1] + 0.5 * dt * (operator(v) + old)
            # tridiagonal Jacobian w.r.t. the interior values, banded storage
            ab = np.empty((3, v.size - 2))
            ab[0, 0] = ab[2, -1] = 0.0
            ab[0, 1:] = 0.5 * dt * (v[2:-1] / (2 * h) - lam)
            ab[1] = 1.0 + dt * lam
            ab[2, :-1] = 0.5 * dt * (-v[1:-2] / (2 * h) - lam)
            delta = solve_banded((1, 1), ab, -res)
            v[1:-1] += delta
            if np.abs(delta).max() <= newton_tol * max(1.0, np.abs(v).max()):
                break
        else:
            raise NoConvergence("Crank-Nicolson Newton iteration stalled")
        u = v
        t = t_new
    return u
