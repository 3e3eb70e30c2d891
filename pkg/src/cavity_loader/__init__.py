"""Loading simulations for trapped-atom quantum memories.

Computes the probability of transferring a traveling single photon (or
an entangled biphoton) into the metastable state of a trapped atom in a
single-ended cavity, for two-level, Lambda, double-Lambda and paired
double-Lambda configurations, and finds the coupling rates that maximize
it for a given input bandwidth.
"""

from .numerics import OdeFailure, OdeSystem, QuadratureFailure, QuadratureSpec
from .pulses import (
    PulseShape,
    effective_width,
    frequency_shifted,
    make_named,
    make_sech,
    make_tabulated,
    make_zero,
    read_pulse_csv,
)
from .two_level import (
    DerivedRates,
    Trajectory,
    TwoLevelParams,
    amplitude_closed_form,
    amplitude_ode,
    derived_rates,
    dimensionless_load,
    peak_loading,
    spectral_amplitude,
)
from .lambda_memory import (
    DarkBright,
    LambdaParams,
    ReducedParams,
    adiabatic_control_pulse,
    adiabatic_load_tpr,
    adiabatic_load_zed,
    compensated_pulse,
    dark_bright_decompose,
    full_ode,
    nonadiabatic_load,
    reduce,
    stark_compensation,
    timing_offset_scan,
)
from .entangled_loading import (
    BiphotonAmplitude,
    PolarizationQubit,
    SpdcParams,
    c_ee,
    mitnu_load,
    spdc_biphoton,
    v_level_load,
)
from .optimize import (
    OptimumPoint,
    SweepSpec,
    optimize_coupling,
    sweep,
    throughput_compare,
)

__version__ = "0.1.0"

__all__ = [
    "PulseShape",
    "make_sech",
    "make_named",
    "make_zero",
    "make_tabulated",
    "read_pulse_csv",
    "effective_width",
    "frequency_shifted",
    "OdeSystem",
    "QuadratureSpec",
    "OdeFailure",
    "QuadratureFailure",
    "TwoLevelParams",
    "DerivedRates",
    "Trajectory",
    "derived_rates",
    "amplitude_closed_form",
    "amplitude_ode",
    "spectral_amplitude",
    "peak_loading",
    "dimensionless_load",
    "LambdaParams",
    "ReducedParams",
    "DarkBright",
    "full_ode",
    "reduce",
    "stark_compensation",
    "compensated_pulse",
    "nonadiabatic_load",
    "adiabatic_control_pulse",
    "adiabatic_load_tpr",
    "adiabatic_load_zed",
    "dark_bright_decompose",
    "timing_offset_scan",
    "PolarizationQubit",
    "BiphotonAmplitude",
    "SpdcParams",
    "v_level_load",
    "spdc_biphoton",
    "c_ee",
    "mitnu_load",
    "OptimumPoint",
    "SweepSpec",
    "optimize_coupling",
    "sweep",
    "throughput_compare",
    "__version__",
]
