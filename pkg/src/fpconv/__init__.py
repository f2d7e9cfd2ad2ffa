"""Free additive convolution on the real line: edges, Stieltjes transforms and
logarithmic potentials via a variational energy, plus a random-matrix oracle."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BeyondEdge,
    ConfigError,
    DegenerateMu,
    DomainError,
    FPConvError,
    InsideOrRightOfSupport,
    InsideSupport,
    MeasureSpecError,
    NonIntegrable,
    OutOfDomain,
    OutOfE_Domain,
    OutOfRange,
    ResourceLimit,
    VerificationError,
    ZInsideSpectrum,
)
from .freeconv import (
    ConvolutionSummary,
    CriticalKind,
    CriticalPoint,
    CriticalPointReport,
    CriticalSource,
    HStarKind,
    classify_critical_points,
    conv_stieltjes,
    endpoint_summary,
    f_deriv,
    f_value,
    fixed_point_residual,
)
from .measures import (
    Atomic,
    JacobiDensity,
    MarchenkoPastur,
    Measure,
    Semicircle,
    delta,
    integrate,
    measure_from_json,
    moment,
    support,
    two_atom,
)
from .potential import PotentialResult, ProfileTable, e_deriv, e_value, emit_profile, u_direct, u_variational
from .rtransform import RTransformReal, r_transform
from .stieltjes import StieltjesEdgeData, edge_data, g_deriv, g_inverse, g_value

__all__ = [name for name in dir() if not name.startswith("_")]
