"""Photoexcitation of hydrogen-like atoms by Bessel-mode twisted photons."""

__version__ = "0.1.0"

from .atomic import (  # noqa: E402
    AtomicState,
    GFactors,
    QuadratureSpec,
    brace_combination,
    g_factor,
    g_factors,
    plane_wave_amplitude,
)
from .beam import (  # noqa: E402
    BeamParams,
    CylindricalPoint,
    FieldSample,
    electric_field,
    flux,
    magnetic_field,
    vector_potential,
    vector_potential_by_quadrature,
)
from .errors import Cancelled, InvalidArgumentError, NumericalError, QuadratureError  # noqa: E402
from .observables import (  # noqa: E402
    FluxConvention,
    FluxKind,
    RatioCurve,
    ScalingPrediction,
    TargetGeometry,
    amplitude,
    amplitude_factorized,
    excitation_rate,
    fit_scaling,
    predict_scaling,
    ratio_curve,
    ratio_rtw,
)
from .specfun import (  # noqa: E402
    RadialState,
    WignerIndex,
    bessel_j,
    hydrogen_radial,
    hydrogen_radial_derivative,
    spherical_harmonic,
    wigner_small_d,
)
