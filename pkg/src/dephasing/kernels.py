"""Time and temperature kernels of the dephasing model.

All double time integrals are reduced analytically,

    int_0^t ds int_0^s dtau cos(w (s - tau)) = (1 - cos w t) / w**2,
    int_0^t ds cos(w s) = sin(w t) / w,

so every kernel is a single frequency integral over the support of J.
Kernels carrying a ``exp(w/T)`` weight are integrated with that weight
divided out at the top of the band, which keeps them representable in log
space at any temperature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize, special

from .model import BathSpec, QubitBloch, ReducedState, j_over_omega
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, QuadratureError, integrate, panel_edges

#: Largest omega_c/T for which exp-weighted kernels are returned as floats.
MAX_EXPONENT = 700.0
#: Use oscillation-scale panels once omega_c * t exceeds this.
OSCILLATION_SPLIT = 50.0
#: Beyond this many oscillation panels the band tail is handled by a
#: Fourier-weighted rule instead.
MAX_PANELS = 20000
#: Oscillation periods resolved panel by panel on the large-t path.
HEAD_PERIODS = 32
#: Upper end of the bracket search for the decoherence time, in 1/omega_c.
T_BRACKET_MAX = 1e8


class KernelOverflowError(OverflowError):
    """Kernel value not representable; compare through ``exceeds_threshold``."""


class NoDecoherenceError(ArithmeticError):
    """The accumulated decoherence exponent never reaches 1."""


class Kernel(enum.Enum):
    A = "A"
    B = "B"
    S = "S"
    SBAR = "Sbar"
    E = "E"
    GAMMA = "Gamma"


# omega * c(omega) with the factor exp(omega/T) removed for the scaled kernels.
def _coef_a(w, T):
    return 2.0 * w * -np.expm1(-w / T)


def _coef_b(w, T):
    return 2.0 * w * (1.0 + np.exp(-w / T))


def _coef_s(w, T):
    return 4.0 * w


def _coef_e(w, T):
    return 4.0 * w * -np.expm1(-2.0 * w / T)


def _coef_sbar(w, T):
    return 4.0 * w * np.exp(-w / T)


def _coef_gamma(w, T):
    # 4 w coth(w/2T) -> 8T as w -> 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(w == 0, 8.0 * T, 4.0 * w / np.tanh(0.5 * w / T))


_COEFFICIENTS = {
    Kernel.A: (_coef_a, True),
    Kernel.B: (_coef_b, True),
    Kernel.S: (_coef_s, True),
    Kernel.E: (_coef_e, True),
    Kernel.SBAR: (_coef_sbar, False),
    Kernel.GAMMA: (_coef_gamma, False),
}


def _one_minus_cos_over_w2(w, t):
    return 0.5 * t * t * np.sinc(w * t / (2.0 * np.pi)) ** 2


def _sin_over_w(w, t):
    return t * np.sinc(w * t / np.pi)


def _edges(bath: BathSpec, t: float) -> np.ndarray:
    lo, hi = bath.support
    width = np.pi / t if hi * t > OSCILLATION_SPLIT else None
    return panel_edges(lo, hi, width)


def _is_large_t(bath: BathSpec, t: float) -> bool:
    return bath.support[1] * t / np.pi > MAX_PANELS


def _weight(kind: Kernel, bath: BathSpec):
    """Smooth prefactor h(w) = J(w) c(w) / scale and log(scale)."""
    coef, scaled = _COEFFICIENTS[kind]
    T = bath.temperature
    top = bath.support[1]

    def h(w):
        val = j_over_omega(bath, w) * coef(w, T)
        if scaled:
            val = val * np.exp((w - top) / T)
        return val

    return h, (top / T if scaled else 0.0)


def _oscillatory_integral(h, bath: BathSpec, t: float, cfg: QuadratureConfig, form: str) -> float:
    """``int h(w) F(w, t) dw`` over the support of J.

    ``form`` selects ``F = (1 - cos wt)/w^2`` ("cos") or ``F = sin(wt)/w``
    ("sin").  Small ``t`` uses panels of width pi/t; very large ``t``
    resolves the first ``HEAD_PERIODS`` oscillations with panels and
    integrates the remaining band with QUADPACK's Fourier-weighted rule.
    """
    factor = _one_minus_cos_over_w2 if form == "cos" else _sin_over_w
    lo, hi = bath.support
    if not _is_large_t(bath, t):
        value, _ = integrate(lambda w: h(w) * factor(w, t), _edges(bath, t), cfg)
        return value
    split = lo + HEAD_PERIODS * 2.0 * np.pi / t
    head, _ = integrate(lambda w: h(w) * factor(w, t), panel_edges(lo, split, np.pi / t), cfg)
    opts = dict(epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=max(50, cfg.max_subdivisions))
    # low-order Taylor terms of h are integrated in closed form so the
    # Fourier-weighted remainder stays bounded
    h0 = float(h(lo))
    dw = 1e-4 * (hi - lo)
    h1 = (float(h(lo + dw)) - h0) / dw
    (si_a, ci_a), (si_b, ci_b) = special.sici(split * t), special.sici(hi * t)
    if form == "cos":
        ua, ub = split * t, hi * t
        exact = (h0 * t * ((si_b - (1 - math.cos(ub)) / ub) - (si_a - (1 - math.cos(ua)) / ua))
                 + h1 * (math.log(hi / split) - ci_b + ci_a))
        k = lambda w: (float(h(w)) - h0 - h1 * w) / (w * w)
        plain, err1 = sp_integrate.quad(k, split, hi, **opts)
        osc, err2 = sp_integrate.quad(k, split, hi, weight="cos", wvar=t, **opts)
        tail, err = exact + plain - osc, err1 + err2
    else:
        exact = h0 * (si_b - si_a) + h1 * (math.cos(split * t) - math.cos(hi * t)) / t
        k = lambda w: (float(h(w)) - h0 - h1 * w) / w
        rest, err = sp_integrate.quad(k, split, hi, weight="sin", wvar=t, **opts)
        tail = exact + rest
    value = head + tail
    if err > max(cfg.abs_tol, 10 * cfg.rel_tol * abs(value)):
        raise QuadratureError("Fourier-weighted tail did not converge", value, err)
    return value


def log_kernel(kind: Kernel, bath: BathSpec, t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Natural log of a nonnegative kernel; ``-inf`` at t = 0."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return -math.inf
    h, log_scale = _weight(kind, bath)
    value = _oscillatory_integral(h, bath, t, cfg, "cos")
    if value <= 0:
        return -math.inf
    return log_scale + math.log(value)


def kernel(kind: Kernel, bath: BathSpec, t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Value of a kernel at ``(bath.temperature, t)``.

    Raises
    ------
    KernelOverflowError
        If the kernel carries an ``exp(omega/T)`` weight and
        ``omega_c/T > MAX_EXPONENT``.
    """
    if _COEFFICIENTS[kind][1] and bath.support[1] / bath.temperature > MAX_EXPONENT:
        raise KernelOverflowError(
            f"{kind.value} overflows at T={bath.temperature!r}; use exceeds_threshold"
        )
    return math.exp(log_kernel(kind, bath, t, cfg))


def big_A(bath, t, cfg=DEFAULT_QUADRATURE):
    return kernel(Kernel.A, bath, t, cfg)


def big_B(bath, t, cfg=DEFAULT_QUADRATURE):
    return kernel(Kernel.B, bath, t, cfg)


def big_S(bath, t, cfg=DEFAULT_QUADRATURE):
    """Separability kernel ``4 int J exp(w/T) (1 - cos wt)/w^2 dw``."""
    return kernel(Kernel.S, bath, t, cfg)


def big_Sbar(bath, t, cfg=DEFAULT_QUADRATURE):
    return kernel(Kernel.SBAR, bath, t, cfg)


def big_E(bath, t, cfg=DEFAULT_QUADRATURE):
    """Entanglement kernel ``8 int J sinh(w/T) (1 - cos wt)/w^2 dw``."""
    return kernel(Kernel.E, bath, t, cfg)


def gamma(bath: BathSpec, t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Time-dependent decoherence rate ``4 int J coth(w/2T) sin(wt)/w dw``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    h, _ = _weight(Kernel.GAMMA, bath)
    return _oscillatory_integral(h, bath, t, cfg, "sin")


def gamma_integral(bath: BathSpec, t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Accumulated decoherence exponent, the time integral of ``gamma``."""
    return kernel(Kernel.GAMMA, bath, t, cfg)


def decoherence_factor(bath: BathSpec, omega_q: float, t: float,
                       cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    return complex(np.exp(-1j * omega_q * t - gamma_integral(bath, t, cfg)))


def reduced_state(initial: QubitBloch, bath: BathSpec, omega_q: float, t: float,
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ReducedState:
    """Qubit state at time t: populations frozen, coherence multiplied by D(t)."""
    d = decoherence_factor(bath, omega_q, t, cfg)
    return ReducedState(
        rho00=0.5 * (1.0 + initial.z),
        rho11=0.5 * (1.0 - initial.z),
        rho01=d * 0.5 * complex(initial.x, -initial.y),
    )


@dataclass(frozen=True)
class KernelValue:
    A: float
    B: float
    S: float
    Sbar: float
    E: float
    gamma: float
    Gamma: float


def kernel_values(bath: BathSpec, t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> KernelValue:
    return KernelValue(
        A=big_A(bath, t, cfg),
        B=big_B(bath, t, cfg),
        S=big_S(bath, t, cfg),
        Sbar=big_Sbar(bath, t, cfg),
        E=big_E(bath, t, cfg),
        gamma=gamma(bath, t, cfg),
        Gamma=gamma_integral(bath, t, cfg),
    )


def exceeds_threshold(kind: Kernel, bath: BathSpec, t: float, bound: float,
                      cfg: QuadratureConfig = DEFAULT_QUADRATURE, n_chunks: int = 4) -> bool:
    """Whether a kernel exceeds ``bound``, without ever forming its value.

    The band is integrated chunk by chunk starting from the top, where the
    thermal weight is largest; the nonnegative partial sum is compared with
    the bound in log space after each chunk.
    """
    if kind not in (Kernel.S, Kernel.E):
        raise ValueError("exceeds_threshold supports the S and E kernels")
    if not bound >= 0:
        raise ValueError("bound must be nonnegative")
    if t < 0:
        raise ValueError("t must be >= 0")
    if math.isinf(bound) or t == 0:
        return False
    log_bound = math.log(bound) if bound > 0 else -math.inf
    if _is_large_t(bath, t):
        return log_kernel(kind, bath, t, cfg) > log_bound
    h, log_scale = _weight(kind, bath)
    edges = _edges(bath, t)
    if len(edges) == 2:
        edges = np.linspace(edges[0], edges[1], n_chunks + 1)
    cuts = np.unique(np.linspace(0, len(edges) - 1, n_chunks + 1).round().astype(int))
    partial = 0.0
    for lo_i, hi_i in reversed(list(zip(cuts[:-1], cuts[1:]))):
        value, _ = integrate(lambda w: h(w) * _one_minus_cos_over_w2(w, t),
                             edges[lo_i:hi_i + 1], cfg)
        partial += value
        if partial > 0 and log_scale + math.log(partial) > log_bound:
            return True
    return False


def decoherence_time(bath: BathSpec, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Time at which the accumulated exponent first reaches 1 (coherence down to 1/e)."""
    def g(t):
        return gamma_integral(bath, t, cfg) - 1.0

    t_hi = 1.0 / bath.omega_c
    if g(t_hi) < 0:
        while True:
            t_lo = t_hi
            t_hi *= 2.0
            if t_hi > T_BRACKET_MAX:
                raise NoDecoherenceError(
                    f"Gamma(t) < 1 up to t={T_BRACKET_MAX:g} for {bath}"
                )
            if g(t_hi) >= 0:
                break
    else:
        t_lo = t_hi
        while g(t_lo) >= 0:
            t_hi = t_lo
            t_lo *= 0.5
    return optimize.brentq(g, t_lo, t_hi, xtol=1e-14, rtol=1e-12)
