"""Independent reference computations used by the tests.

Nothing here imports the package's quadrature: kernels are evaluated with a
fixed-grid trapezoid rule on the raw frequency integrands.
"""

import numpy as np

N_NODES = 10**6


def _grid(omega_c):
    return np.linspace(0.0, omega_c, N_NODES + 1)


def trapezoid_kernel(name, kappa, T, t, omega_c=1.0):
    """S, Sbar, E, A, B, Gamma or gamma for J = kappa*w below omega_c."""
    w = _grid(omega_c)
    x = w / T
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        nbar = 1.0 / np.expm1(x)
        one_minus_cos = 1.0 - np.cos(w * t)
        if name == "gamma":
            y = 4 * kappa * w / np.tanh(x / 2) * np.sin(w * t) / w
            y[0] = 4 * kappa * 2 * T * t
        else:
            coef = {
                "A": 2 / nbar,
                "B": 2 * (2 * nbar + 1) / nbar,
                "S": 4 * np.exp(x),
                "Sbar": 4 * np.exp(-x),
                "E": 8 * np.sinh(x),
                "Gamma": 4 / np.tanh(x / 2),
            }[name]
            y = kappa * w * coef * one_minus_cos / w**2
            # w -> 0 limits
            y[0] = {"A": 0.0, "B": 0.0, "S": 0.0, "Sbar": 0.0, "E": 0.0,
                    "Gamma": 4 * kappa * T * t * t}[name]
    return float(np.trapezoid(y, w))


def trapezoid_decoherence_time(kappa, T, lo, hi, omega_c=1.0):
    from scipy.optimize import brentq
    return brentq(lambda s: trapezoid_kernel("Gamma", kappa, T, s, omega_c) - 1.0, lo, hi,
                  xtol=1e-12)
