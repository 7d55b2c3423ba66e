"""Separability and entanglement criteria for the qubit + bath state.

The total state is certified separable while ``S(T, t)`` stays below
``sep_bound`` and certified entangled once ``E(T, t)`` exceeds
``ent_bound``.  Both criteria are one-sided, so points satisfying neither
are labelled ``UNKNOWN``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .kernels import (
    MAX_EXPONENT,
    Kernel,
    decoherence_time,
    exceeds_threshold,
    log_kernel,
)
from .model import T_MIN, BathSpec, QubitBloch
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig


class RegionLabel(enum.Enum):
    SEPARABLE = "SEPARABLE"
    ENTANGLED = "ENTANGLED"
    UNKNOWN = "UNKNOWN"


class InconsistentCriteriaError(RuntimeError):
    """Both one-sided criteria fired at the same point."""


class GridPointError(RuntimeError):
    def __init__(self, T: float, t: float, cause: Exception):
        super().__init__(f"at T={T!r}, t={t!r}: {cause}")
        self.T = T
        self.t = t
        self.cause = cause


def sep_bound(state: QubitBloch) -> float:
    """``0.5*ln[(1 - z^2)/(x^2 + y^2)]``; infinite for states on the z axis."""
    rho2 = state.rho_perp_sq
    if rho2 == 0:
        return math.inf
    return max(0.5 * math.log((1.0 - state.z ** 2) / rho2), 0.0)


def ent_bound(state: QubitBloch) -> float:
    """``ln[(r - z^2)/(x^2 + y^2)]``; infinite for states on the z axis."""
    rho2 = state.rho_perp_sq
    if rho2 == 0:
        return math.inf
    # r - z^2 >= r^2 - z^2 = rho2; clip round-off below zero
    return max(math.log((state.r - state.z ** 2) / rho2), 0.0)


def classify(bath: BathSpec, t: float, state: QubitBloch,
             cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> RegionLabel:
    """Label the total state at time ``t``.

    Raises
    ------
    InconsistentCriteriaError
        If the separability and entanglement criteria hold simultaneously.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    b_sep = sep_bound(state)
    if math.isinf(b_sep):
        return RegionLabel.SEPARABLE
    separable = not exceeds_threshold(Kernel.S, bath, t, b_sep, cfg)
    entangled = exceeds_threshold(Kernel.E, bath, t, ent_bound(state), cfg)
    if separable and entangled:
        raise InconsistentCriteriaError(
            f"separability and entanglement criteria both hold at T={bath.temperature!r}, "
            f"t={t!r}, state={state}"
        )
    if separable:
        return RegionLabel.SEPARABLE
    if entangled:
        return RegionLabel.ENTANGLED
    return RegionLabel.UNKNOWN


def _check_axis(axis, name: str, minimum: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d sequence")
    if np.any(np.diff(axis) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    if axis[0] < minimum:
        raise ValueError(f"{name} starts below {minimum!r}")
    return axis


@dataclass
class PhaseDiagram:
    T_axis: np.ndarray
    t_axis: np.ndarray
    labels: list[list[RegionLabel]]
    state: QubitBloch
    bath: BathSpec
    tau_dec: np.ndarray | None = None

    def label_array(self) -> np.ndarray:
        return np.array([[lab.value for lab in row] for row in self.labels])


def parallel_map(fn, items, threads: int = 1):
    """Ordered map, optionally on a thread pool (``threads=0`` means one per core)."""
    items = list(items)
    if threads == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(fn, items))


def phase_diagram(bath: BathSpec, state: QubitBloch, T_axis, t_axis,
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE, *,
                  with_tau_dec: bool = False, threads: int = 1) -> PhaseDiagram:
    """Classify every point of a (T, t) grid.

    ``bath`` acts as a template; its temperature is replaced by each entry of
    ``T_axis``.  Rows are independent and may be evaluated on ``threads``
    worker threads (0 means one per core); assembly order is fixed.
    """
    T_axis = _check_axis(T_axis, "T_axis", T_MIN)
    t_axis = _check_axis(t_axis, "t_axis", 0.0)

    def row(T):
        b = bath.with_temperature(float(T))
        out = []
        for t in t_axis:
            try:
                out.append(classify(b, float(t), state, cfg))
            except Exception as exc:
                raise GridPointError(float(T), float(t), exc) from exc
        return out

    labels = parallel_map(row, T_axis, threads)
    tau = None
    if with_tau_dec:
        tau = np.array(parallel_map(lambda T: decoherence_time(bath.with_temperature(float(T)), cfg),
                            T_axis, threads))
    return PhaseDiagram(T_axis, t_axis, labels, state, bath, tau)


def tau_ent(bath: BathSpec, state: QubitBloch, t_max: float,
            cfg: QuadratureConfig = DEFAULT_QUADRATURE, n_scan: int = 400) -> float | None:
    """First time in ``(0, t_max]`` at which entanglement is certified.

    Returns ``None`` if the criterion never fires up to ``t_max`` and 0.0
    for pure states, where it fires immediately.
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    bound = ent_bound(state)
    if math.isinf(bound):
        return None
    if bound == 0:
        return 0.0
    log_bound = math.log(bound)
    grid = np.union1d(np.geomspace(t_max * 1e-6, t_max, n_scan),
                      np.linspace(t_max / n_scan, t_max, n_scan))
    prev = 0.0
    for t in grid:
        if exceeds_threshold(Kernel.E, bath, float(t), bound, cfg):
            if prev == 0.0:
                return float(t)
            return optimize.brentq(
                lambda s: log_kernel(Kernel.E, bath, s, cfg) - log_bound,
                prev, float(t), rtol=1e-6,
            )
        prev = float(t)
    return None


def _log_kernel_at_tau_dec(kind: Kernel, bath: BathSpec, cfg: QuadratureConfig) -> float:
    return log_kernel(kind, bath, decoherence_time(bath, cfg), cfg)


def separable_fraction(bath: BathSpec, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Volume fraction of the Bloch ball still certified separable at the decoherence time.

    The separability condition reads ``rho_perp^2 <= exp(-2S)(1 - z^2)``;
    slicing the ball at height z scales every disc by the same factor, so the
    fraction is ``exp(-2S)``.
    """
    tau = decoherence_time(bath, cfg)
    if bath.support[1] / bath.temperature > MAX_EXPONENT:
        # exp(-2S) underflows once S > ~372
        if exceeds_threshold(Kernel.S, bath, tau, 375.0, cfg):
            return 0.0
    s = math.exp(min(log_kernel(Kernel.S, bath, tau, cfg), 700.0))
    return math.exp(-2.0 * s)


def sample_ball(n: int, seed: int | None = None) -> np.ndarray:
    """``n`` points distributed uniformly in the unit ball, shape ``(n, 3)``."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.random(n)[:, None] ** (1.0 / 3.0)


def monte_carlo_fraction(bath: BathSpec, n: int = 1_000_000, seed: int | None = 0,
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                         p_ref: float | None = None) -> tuple[float, float]:
    """Monte-Carlo estimate of ``separable_fraction``.

    Counts uniformly sampled Bloch vectors satisfying ``S <= sep_bound`` at the
    decoherence time.  The standard error is the binomial one evaluated at
    ``p_ref`` when given (e.g. the analytic fraction, so that a zero count is
    still testable), otherwise at the estimate.
    """
    pts = sample_ball(n, seed)
    tau = decoherence_time(bath, cfg)
    s = math.exp(min(log_kernel(Kernel.S, bath, tau, cfg), 700.0))
    rho2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
    with np.errstate(divide="ignore"):
        bounds = 0.5 * np.log((1.0 - pts[:, 2] ** 2) / rho2)
    p = float(np.count_nonzero(s <= bounds)) / n
    q = p if p_ref is None else p_ref
    return p, math.sqrt(q * (1.0 - q) / n)


@dataclass
class BoundaryCurve:
    """Boundary in the phi = 0 cut of the Bloch ball; NaN where no boundary exists."""

    z: np.ndarray
    rho: np.ndarray
    temperature: float = math.nan
    points: list[tuple[float, float]] = field(init=False)

    def __post_init__(self):
        self.points = [(float(a), float(b)) for a, b in zip(self.z, self.rho)]


def _check_z(z_axis) -> np.ndarray:
    z = np.asarray(z_axis, dtype=float)
    if np.any(np.abs(z) >= 1):
        raise ValueError("z values must lie in (-1, 1)")
    return z


def bloch_cut_separable(bath: BathSpec, z_axis, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> BoundaryCurve:
    """States below the curve are still certified separable at the decoherence time."""
    z = _check_z(z_axis)
    s = math.exp(min(_log_kernel_at_tau_dec(Kernel.S, bath, cfg), 700.0))
    return BoundaryCurve(z, np.sqrt(1.0 - z ** 2) * math.exp(-s), bath.temperature)


def entangled_boundary_rho(z: float, log_e: float) -> float:
    """Radius rho_perp in the phi = 0 cut where ``ent_bound`` equals ``exp(log_e)``.

    The bound decreases monotonically in rho_perp at fixed z, so the root is
    unique; it is bracketed in log(rho_perp).
    """
    rho_max = math.sqrt(1.0 - z * z)
    e = math.exp(min(log_e, 700.0))
    if e == 0.0:
        return rho_max
    if z == 0.0:
        return math.exp(-e)

    def f(u):
        rho2 = math.exp(2.0 * u)
        r = math.sqrt(rho2 + z * z)
        return math.log(r - z * z) - 2.0 * u - e

    hi = math.log(rho_max)
    if f(hi) >= 0:
        return rho_max
    lo = hi - 1.0
    while f(lo) < 0:
        if lo < -350.0:
            # r - z^2 has reached |z|(1 - |z|)
            return math.exp(0.5 * (math.log(abs(z) * (1.0 - abs(z))) - e))
        lo = hi - 2.0 * (hi - lo)
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-12))


def bloch_cut_entangled(bath: BathSpec, z_axis, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> BoundaryCurve:
    """States outside the curve are certified entangled at the decoherence time."""
    z = _check_z(z_axis)
    log_e = _log_kernel_at_tau_dec(Kernel.E, bath, cfg)
    rho = np.array([entangled_boundary_rho(float(zi), log_e) for zi in z])
    return BoundaryCurve(z, rho, bath.temperature)


def count_alternations(bath: BathSpec, state: QubitBloch, t_axis,
                       cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> tuple[int, list[RegionLabel]]:
    """Number of SEPARABLE <-> ENTANGLED switches along ``t_axis``.

    UNKNOWN points are skipped when counting, so a SEPARABLE, UNKNOWN,
    ENTANGLED run counts as one switch.
    """
    t_axis = _check_axis(t_axis, "t_axis", 0.0)
    labels = [classify(bath, float(t), state, cfg) for t in t_axis]
    known = [lab for lab in labels if lab is not RegionLabel.UNKNOWN]
    count = sum(a is not b for a, b in zip(known, known[1:]))
    return count, labels
