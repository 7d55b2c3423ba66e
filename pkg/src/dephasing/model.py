"""Bath and qubit model types.

Units: hbar = k_B = 1.  Frequencies are measured in units of the cutoff
``omega_c`` (default 1), temperatures in ``hbar*omega_c/k_B`` and times in
``1/omega_c``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

#: Smallest temperature accepted by grid scans.
T_MIN = 1e-3


class ModelError(ValueError):
    """Invalid physical parameters."""


class DensityKind(enum.Enum):
    OHMIC_SHARP_CUTOFF = "ohmic_sharp_cutoff"


@dataclass(frozen=True)
class BathSpec:
    """Thermal oscillator bath.

    Parameters
    ----------
    kappa : float
        Dimensionless coupling strength.
    omega_c : float
        Cutoff frequency.
    temperature : float
        Bath temperature; zero temperature is not supported.
    density_kind : DensityKind
        Shape of the spectral density.
    """

    kappa: float
    omega_c: float = 1.0
    temperature: float = 1.0
    density_kind: DensityKind = DensityKind.OHMIC_SHARP_CUTOFF

    def __post_init__(self):
        for name in ("kappa", "omega_c", "temperature"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ModelError(f"{name} must be positive and finite, got {value!r}")

    def with_temperature(self, temperature: float) -> "BathSpec":
        return BathSpec(self.kappa, self.omega_c, temperature, self.density_kind)

    @property
    def support(self) -> tuple[float, float]:
        """Frequency interval outside which J vanishes."""
        return 0.0, self.omega_c


@dataclass(frozen=True)
class QubitBloch:
    """Initial qubit state given by its Bloch vector."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ModelError("Bloch coordinates must be finite")
        if self.r > 1.0 + 1e-12:
            raise ModelError(f"Bloch vector outside the unit ball (r={self.r!r})")

    @property
    def r(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @property
    def rho_perp_sq(self) -> float:
        return self.x * self.x + self.y * self.y

    @property
    def rho_perp(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def phi(self) -> float:
        return math.atan2(self.y, self.x)

    def density_matrix(self) -> np.ndarray:
        """2x2 density matrix, basis ordered (sigma_z = +1, sigma_z = -1)."""
        return 0.5 * np.array(
            [[1.0 + self.z, self.x - 1j * self.y],
             [self.x + 1j * self.y, 1.0 - self.z]]
        )


@dataclass(frozen=True)
class ReducedState:
    rho00: float
    rho11: float
    rho01: complex

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.rho00, self.rho01], [np.conj(self.rho01), self.rho11]], dtype=complex
        )


def qubit_from_polar(r: float, z: float, phi: float = 0.0) -> QubitBloch:
    """Build a Bloch vector from its length, height and azimuth."""
    if not 0.0 <= r <= 1.0:
        raise ModelError(f"r must lie in [0, 1], got {r!r}")
    if abs(z) > r:
        raise ModelError(f"|z| must not exceed r (r={r!r}, z={z!r})")
    rho = math.sqrt(max(r * r - z * z, 0.0))
    return QubitBloch(rho * math.cos(phi), rho * math.sin(phi), z)


def j_over_omega(bath: BathSpec, omega):
    """J(omega)/omega; finite at omega = 0."""
    omega = np.asarray(omega, dtype=float)
    if bath.density_kind is DensityKind.OHMIC_SHARP_CUTOFF:
        return np.where(omega < bath.omega_c, bath.kappa, 0.0)
    raise NotImplementedError(bath.density_kind)


def spectral_density(bath: BathSpec, omega):
    """Ohmic spectral density with a sharp cutoff, ``kappa*omega*Theta(omega_c - omega)``."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ModelError("spectral density is defined for omega >= 0")
    out = w * j_over_omega(bath, w)
    return float(out) if out.ndim == 0 else out


def thermal_occupation(omega, temperature):
    """Bose-Einstein occupation ``1/(exp(omega/T) - 1)``."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ModelError("thermal occupation diverges for omega <= 0")
    T = np.asarray(temperature, dtype=float)
    if not np.all(T > 0):
        raise ModelError("temperature must be positive")
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(w / T)
    return float(out) if out.ndim == 0 else out
