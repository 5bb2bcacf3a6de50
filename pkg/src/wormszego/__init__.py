"""Szego projection on the distinguished boundary of model worm domains.

A numerical library and CLI for the boundary projection of the unbounded
worm domain with winding parameter beta > pi: the operator is assembled as
a sum of sixteen Mellin-Fourier multiplier blocks over the four boundary
sheets, and the sharp L^p interval (2/(1+nu), 2/(1-nu)) and Sobolev
threshold nu/2, nu = pi/(2 beta - pi), are reproduced empirically through
truncated-norm growth of an explicit witness function.
"""

from .geometry import (
    BoundaryPoint,
    Sheet,
    SheetId,
    WormParams,
    embed,
    lambda_isometry,
    lambda_isometry_inverse,
    make_params,
    map_phi,
    measure_weight,
    psi_weight,
    sheet_id,
)
from .multipliers import (
    MultiplierTable,
    MuEta,
    StripSpec,
    block_symbol,
    block_symbol_table,
    d_factor,
    model_symbol_Ma,
    model_symbol_ma,
    mu_eta,
    strip_shift_check,
    strip_spec,
    tanh_symbol,
)
from .norms import (
    NormReport,
    bessel_sobolev_norm,
    fit_power_law,
    gagliardo_seminorm,
    lp_norm,
    weighted_l2_norm,
)
from .szego import (
    TruncationWindow,
    apply_block,
    apply_szego,
    compose_multipliers,
    lambda_a,
    p_a,
    q_a,
    truncated_cz,
)
from .transforms import (
    AngularGrid,
    BoundaryField,
    Grid2D,
    LogGrid,
    Spectrum,
    cayley,
    cayley_inverse,
    hilbert1,
    mf_forward,
    mf_inverse,
)

__version__ = "0.1.0"
