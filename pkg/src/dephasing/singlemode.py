"""Exact qubit + single-mode dynamics in a truncated Fock space.

The mode plays the role of a one-oscillator environment.  Because the
coupling is proportional to sigma_z, the total propagator is block diagonal,

    U(t) = diag(exp(-i H_+ t), exp(-i H_- t)),
    H_pm = pm Omega/2 + omega a^dag a pm g (a + a^dag),

and each block is exponentiated through one Hermitian eigendecomposition
that is reused for every time.  The partial transpose acts on the qubit
factor.  Basis ordering is qubit-major: index ``q*N + n`` for qubit level
``q`` (0 <-> sigma_z = +1) and Fock number ``n``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .criteria import ent_bound
from .kernels import KernelValue
from .model import ModelError, QubitBloch, thermal_occupation

#: Thermal weight allowed beyond the truncation.
TAIL_TOL = 1e-10
#: Population allowed in the two highest Fock levels after evolution.
LEAKAGE_TOL = 1e-6
#: PT eigenvalues above -NPT_TOL count as PPT (truncation artefacts sit near the thermal tail).
NPT_TOL = 1e-8


class TruncationError(ModelError):
    """Fock truncation too small for the requested mode or evolution."""


def _tail(nbar: float, n: int) -> float:
    return (nbar / (nbar + 1.0)) ** n / (nbar + 1.0)


@dataclass(frozen=True)
class ModeSpec:
    """Single oscillator coupled to the qubit.

    ``g`` may be complex; only ``|g|`` enters, the phase being removable by
    a rotation of the mode.  When ``n_trunc`` is omitted it is chosen as
    ``max(10*nbar + 20, N_tail)`` where ``N_tail`` is the smallest dimension
    whose thermal tail is below ``TAIL_TOL``.
    """

    omega: float
    g: float
    temperature: float
    n_trunc: int | None = None
    nbar: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.omega > 0:
            raise ModelError("mode frequency must be positive")
        if not self.temperature > 0:
            raise ModelError("temperature must be positive")
        object.__setattr__(self, "g", abs(self.g))
        nbar = thermal_occupation(self.omega, self.temperature)
        object.__setattr__(self, "nbar", nbar)
        if self.n_trunc is None:
            n_tail = 2
            while _tail(nbar, n_tail) >= TAIL_TOL:
                n_tail += 1
            object.__setattr__(self, "n_trunc", max(math.ceil(10 * nbar + 20), n_tail))
        if self.n_trunc < 2:
            raise TruncationError("n_trunc must be >= 2")
        if _tail(nbar, self.n_trunc) >= TAIL_TOL:
            raise TruncationError(
                f"thermal tail {_tail(nbar, self.n_trunc):.3g} at N={self.n_trunc} "
                f"exceeds {TAIL_TOL:g}; increase n_trunc"
            )


def thermal_state(mode: ModeSpec) -> np.ndarray:
    """Truncated, renormalised thermal density matrix of the mode."""
    n = np.arange(mode.n_trunc)
    p = _tail(mode.nbar, n)
    return np.diag(p / p.sum())


class FockSystem:
    """Operators and conditional Hamiltonians for one mode; immutable after construction."""

    def __init__(self, mode: ModeSpec, omega_q: float = 0.0):
        self.mode = mode
        self.omega_q = omega_q
        N = self.dim = mode.n_trunc
        self.a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1)
        self.adag = self.a.T.copy()
        self.number = np.diag(np.arange(N, dtype=float))
        x = self.a + self.adag
        eye = np.eye(N)
        self.h_plus = 0.5 * omega_q * eye + mode.omega * self.number + mode.g * x
        self.h_minus = -0.5 * omega_q * eye + mode.omega * self.number - mode.g * x
        self.eig_plus = np.linalg.eigh(self.h_plus)
        self.eig_minus = np.linalg.eigh(self.h_minus)
        self.thermal_weights = np.diag(thermal_state(mode)).copy()

    def propagator(self, sign: int, t: float) -> np.ndarray:
        e, v = self.eig_plus if sign > 0 else self.eig_minus
        return (v * np.exp(-1j * e * t)) @ v.conj().T

    def evolve(self, initial: QubitBloch, t: float, check_leakage: bool = True) -> np.ndarray:
        rho_q = initial.density_matrix()
        sq = np.sqrt(self.thermal_weights)
        w = [self.propagator(+1, t) * sq, self.propagator(-1, t) * sq]
        N = self.dim
        out = np.empty((2 * N, 2 * N), dtype=complex)
        for i in range(2):
            for j in range(2):
                out[i * N:(i + 1) * N, j * N:(j + 1) * N] = rho_q[i, j] * (w[i] @ w[j].conj().T)
        if check_leakage:
            pops = np.real(np.diag(out[:N, :N]) + np.diag(out[N:, N:]))
            if pops[-2:].sum() > LEAKAGE_TOL:
                raise TruncationError(
                    f"population {pops[-2:].sum():.3g} in the top Fock levels at t={t!r}; "
                    "enlarge n_trunc"
                )
        return out


@functools.lru_cache(maxsize=32)
def fock_system(mode: ModeSpec, omega_q: float = 0.0) -> FockSystem:
    return FockSystem(mode, omega_q)


def evolve_total(initial: QubitBloch, mode: ModeSpec, omega_q: float, t: float) -> np.ndarray:
    """Total qubit + mode density matrix at time ``t`` from ``rho_q (x) rho_thermal``."""
    return fock_system(mode, omega_q).evolve(initial, t)


def partial_transpose(state: np.ndarray) -> np.ndarray:
    """Transpose on the qubit factor: the two off-diagonal blocks are exchanged."""
    state = np.asarray(state)
    N = state.shape[0] // 2
    out = state.copy()
    out[:N, N:] = state[N:, :N]
    out[N:, :N] = state[:N, N:]
    return out


def min_pt_eigenvalue(state: np.ndarray) -> float:
    pt = partial_transpose(state)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])


def reduced_qubit(state: np.ndarray) -> np.ndarray:
    N = state.shape[0] // 2
    return np.array([[np.trace(state[i * N:(i + 1) * N, j * N:(j + 1) * N]) for j in range(2)]
                     for i in range(2)])


def tau_crit(initial: QubitBloch, mode: ModeSpec, omega_q: float, t_max: float,
             n_grid: int = 2000) -> list[float]:
    """Times in ``(0, t_max]`` at which the total state switches between PPT and NPT.

    ``min_pt_eigenvalue`` is scanned on a uniform grid and every sign change
    of ``min_pt_eigenvalue + NPT_TOL`` is refined by root finding.
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    system = fock_system(mode, omega_q)

    def f(t):
        return min_pt_eigenvalue(system.evolve(initial, t)) + NPT_TOL

    grid = np.linspace(0.0, t_max, n_grid + 1)
    values = np.array([f(t) for t in grid])
    npt = values < 0
    out = []
    for k in np.flatnonzero(npt[1:] != npt[:-1]):
        if k == 0 and npt[1]:
            # NPT from the first grid step: onset lies within (0, dt]
            lo, hi = grid[0], grid[1]
            if f(hi * 1e-9) < 0:
                out.append(0.0)
                continue
            lo = hi * 1e-9
        else:
            lo, hi = grid[k], grid[k + 1]
        out.append(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-8))
    return out


def _one_minus_cos_over_w2(omega: float, t: float) -> float:
    return 2.0 * math.sin(0.5 * omega * t) ** 2 / omega ** 2


def discrete_kernels(mode: ModeSpec, t: float) -> KernelValue:
    """Closed-form kernels for a single bath mode."""
    x = mode.omega / mode.temperature
    if x > 700.0:
        raise OverflowError(f"single-mode kernels diverge as nbar -> 0 (omega/T = {x:g})")
    g2 = mode.g ** 2
    q = _one_minus_cos_over_w2(mode.omega, t)
    coth = 1.0 / math.tanh(0.5 * x)
    return KernelValue(
        A=2.0 * g2 * math.expm1(x) * q,
        B=2.0 * g2 * (math.exp(x) + 1.0) * q,
        S=4.0 * g2 * math.exp(x) * q,
        Sbar=4.0 * g2 * math.exp(-x) * q,
        E=8.0 * g2 * math.sinh(x) * q,
        gamma=4.0 * g2 * coth * math.sin(mode.omega * t) / mode.omega,
        Gamma=4.0 * g2 * coth * q,
    )


def gamma_single(mode: ModeSpec, t: float) -> float:
    """Dephasing exponent ``4 g^2 (2 nbar + 1)(1 - cos wt)/w^2`` of a single mode."""
    return 4.0 * mode.g ** 2 * (2.0 * mode.nbar + 1.0) * _one_minus_cos_over_w2(mode.omega, t)


def tau_ent_single(initial: QubitBloch, mode: ModeSpec, t_max: float) -> list[float]:
    """Times in ``(0, t_max]`` at which the single-mode entanglement criterion switches.

    ``E(t) = 8 g^2 sinh(w/T)(1 - cos wt)/w^2`` crosses the bound where
    ``cos wt = 1 - bound w^2 / (8 g^2 sinh(w/T))``; entries alternate between
    onset and loss of detected entanglement.
    """
    bound = ent_bound(initial)
    if math.isinf(bound):
        return []
    if bound == 0:
        return [0.0]
    amp = 8.0 * mode.g ** 2 * math.sinh(mode.omega / mode.temperature) / mode.omega ** 2
    if amp == 0:
        return []
    c = 1.0 - bound / amp
    if c <= -1.0:
        return []
    theta = math.acos(c)
    out = []
    k = 0
    while True:
        t_on = (theta + 2.0 * math.pi * k) / mode.omega
        if t_on > t_max:
            break
        out.append(t_on)
        t_off = t_on + (2.0 * math.pi - 2.0 * theta) / mode.omega
        if t_off > t_max:
            break
        out.append(t_off)
        k += 1
    return out


def ept_value(initial: QubitBloch, mode: ModeSpec, t: float) -> float:
    """Expectation value of the partially transposed state in the optimal test state.

    Negative values certify entanglement.
    """
    r = initial.r
    if r == 0:
        raise ModelError("the test state is undefined for r = 0")
    k = discrete_kernels(mode, t)
    pref = math.exp(-k.A + 0.5 * k.Sbar) / (2.0 * (mode.nbar + 1.0))
    return pref * ((1.0 - initial.z ** 2 / r) - math.exp(k.E) * initial.rho_perp_sq / r)


def det_p(initial: QubitBloch, mode: ModeSpec, t: float) -> float:
    """Determinant of the partial P-function; nonnegative values certify separability."""
    k = discrete_kernels(mode, t)
    return math.exp(-2.0 * k.A) * ((1.0 - initial.z ** 2) - math.exp(2.0 * k.S) * initial.rho_perp_sq)
