"""Numerics for relative entropy of diffeomorphism-induced states in chiral CFT.

Vector fields on the line or circle are exponentiated into diffeomorphism
flows with third-order jet transport; closed-form relative-entropy,
energy-bound, cocycle and extensivity formulas are then evaluated by
adaptive quadrature over those jets.
"""

from .fields import (
    VectorField,
    make_bump,
    make_cos2,
    make_trigpoly,
    zero_field,
    combine,
    eval_jet,
    cayley_pushforward,
    sobolev_norm,
    field_from_spec,
)
from .diffeo import (
    Jet3,
    Diffeomorphism,
    AffineMap,
    RotationMap,
    identity,
    compose,
    invert,
    moebius_fixing,
    schwarzian,
    log_derivative_ratio,
)
from .flows import (
    FlowConfig,
    FlowError,
    FlowMap,
    exponentiate,
    flow_jet,
    inverse_flow,
    closed_form_flow,
)
from .entropy import (
    STATE_VS_VACUUM,
    VACUUM_VS_STATE,
    Interval,
    EntropyReport,
    BekensteinRecord,
    dilation_density,
    entropy_half_line,
    entropy_half_line_derivatives,
    entropy_exchanged_derivative_formula,
    entropy_interval,
    entropy_interval_fixed_endpoint_forms,
    vacuum_energy,
    bekenstein_check,
    qnec_energy_density,
)
from .cocycles import (
    CocycleValue,
    bott_cocycle,
    coboundary_check,
    central_term_omega,
    anomaly_beta,
)
from .asymptotics import (
    ExtensivityReport,
    h_seq,
    sigma_seq,
    zeta_seq,
    nu_limit_integrals,
    glued_approximant,
    schwarzian_limit_check,
    schwarzian_limit_target,
    extensivity_delta,
    extensivity_report,
)

__version__ = "0.1.0"
