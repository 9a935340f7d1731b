"""Time-stepping kernels for the lattice module.

The leapfrog sweep is the one genuinely sequential hot loop in the package
(everything else is LAPACK-bound), so it carries a numba ``@njit`` fast path
with a pure-numpy fallback.  Set the environment variable ``QCAUSAL_NO_NUMBA``
to any non-empty value to force the fallback; it is also selected
automatically when numba is not importable.  Both paths evaluate the same
arithmetic expression per site and produce bit-identical tables.

Scheme: second-order leapfrog for the discrete Klein-Gordon equation on a
periodic spatial circle, unit spacing and unit time step, with the mass term
averaged over the two neighbouring time slices:

    phi[t+1, x] = (phi[t, x-1] + phi[t, x+1]) / (1 + m^2/2) - phi[t-1, x]

At the unit (magic) time step the plain explicit mass term is unstable for
any m > 0; the time-averaged form is neutrally stable for every mass while
keeping the update's dependence cone at exactly one site per step and
keeping the evolution time-reversal symmetric.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = bool(os.environ.get("QCAUSAL_NO_NUMBA", ""))

try:
    if _FORCE_NUMPY:
        raise ImportError("numba disabled by QCAUSAL_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _impulse_response_numpy(n_sites: int, n_steps: int, mass: float) -> np.ndarray:
    g = np.zeros((n_steps, n_sites))
    if n_steps > 1:
        g[1, 0] = 1.0
    denom = 1.0 + 0.5 * mass * mass
    for t in range(2, n_steps):
        prev = g[t - 1]
        g[t] = (np.roll(prev, 1) + np.roll(prev, -1)) / denom - g[t - 2]
    return g


def _impulse_response_loops(n_sites: int, n_steps: int, mass: float) -> np.ndarray:
    g = np.zeros((n_steps, n_sites))
    if n_steps > 1:
        g[1, 0] = 1.0
    denom = 1.0 + 0.5 * mass * mass
    for t in range(2, n_steps):
        for x in range(n_sites):
            left = g[t - 1, x - 1] if x > 0 else g[t - 1, n_sites - 1]
            right = g[t - 1, x + 1] if x < n_sites - 1 else g[t - 1, 0]
            g[t, x] = (left + right) / denom - g[t - 2, x]
    return g


if HAS_NUMBA:
    _impulse_response_jit = njit(cache=True)(_impulse_response_loops)

    def impulse_response(n_sites: int, n_steps: int, mass: float) -> np.ndarray:
        """Leapfrog table g[t, x]: unit momentum kick at site 0, time 0."""
        return _impulse_response_jit(n_sites, n_steps, mass)

else:

    def impulse_response(n_sites: int, n_steps: int, mass: float) -> np.ndarray:
        """Leapfrog table g[t, x]: unit momentum kick at site 0, time 0."""
        return _impulse_response_numpy(n_sites, n_steps, mass)
