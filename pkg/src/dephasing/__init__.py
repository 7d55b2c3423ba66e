"""Exact pure-dephasing dynamics of a qubit in a thermal oscillator bath,
with separability and entanglement witnesses for the qubit + bath state."""

from .criteria import (
    BoundaryCurve,
    InconsistentCriteriaError,
    PhaseDiagram,
    RegionLabel,
    bloch_cut_entangled,
    bloch_cut_separable,
    classify,
    count_alternations,
    ent_bound,
    monte_carlo_fraction,
    phase_diagram,
    sep_bound,
    separable_fraction,
    tau_ent,
)
from .kernels import (
    Kernel,
    KernelValue,
    big_A,
    big_B,
    big_E,
    big_S,
    big_Sbar,
    decoherence_factor,
    decoherence_time,
    exceeds_threshold,
    gamma,
    gamma_integral,
    kernel_values,
    reduced_state,
)
from .model import (
    BathSpec,
    DensityKind,
    ModelError,
    QubitBloch,
    ReducedState,
    qubit_from_polar,
    spectral_density,
    thermal_occupation,
)
from .quadrature import QuadratureConfig, QuadratureError

__version__ = "0.1.0"

__all__ = [
    "BoundaryCurve", "InconsistentCriteriaError", "PhaseDiagram", "RegionLabel",
    "bloch_cut_entangled", "bloch_cut_separable", "classify", "count_alternations",
    "ent_bound", "monte_carlo_fraction", "phase_diagram", "sep_bound",
    "separable_fraction", "tau_ent", "Kernel", "KernelValue", "big_A", "big_B", "big_E",
    "big_S", "big_Sbar", "decoherence_factor", "decoherence_time", "exceeds_threshold",
    "gamma", "gamma_integral", "kernel_values", "reduced_state", "BathSpec",
    "DensityKind", "ModelError", "QubitBloch", "ReducedState", "qubit_from_polar",
    "spectral_density", "thermal_occupation", "QuadratureConfig", "QuadratureError",
]
