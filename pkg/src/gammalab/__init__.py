"""gammalab: exact and certified-precision workbench for the Sondow
decomposition I_n = C(2n,n) gamma + L_n - A_n of Euler's constant."""

__version__ = "0.1.0"

from .exact import (
    A_exact,
    IdentityViolation,
    bernoulli,
    binomial,
    factorial,
    harmonic,
    integrality_witness,
    lcm_upto,
    partial_fraction_coeffs,
    partial_fraction_residual,
    stirling1_row,
    tail_log_coefficient,
    tail_log_coefficient_reduced,
)
from .mpnum import (
    Bounded,
    PrecisionExhausted,
    PrecisionInsufficient,
    PrecisionPolicy,
    euler_gamma,
    frac_part_certified,
    log_factorial,
)
from .sequences import (
    CriterionPoint,
    SeqRecord,
    I_closed_form,
    I_series,
    L_from_factorial_logs,
    L_from_power_product,
    build_record,
    criterion_point,
    gamma_roundtrip,
    log_S,
    sondow_threshold,
    tail_probe,
)
from .asymptotics import LAWS, aitken_limit, convergence_report

__all__ = [
    "__version__",
    "A_exact",
    "IdentityViolation",
    "bernoulli",
    "binomial",
    "factorial",
    "harmonic",
    "integrality_witness",
    "lcm_upto",
    "partial_fraction_coeffs",
    "partial_fraction_residual",
    "stirling1_row",
    "tail_log_coefficient",
    "tail_log_coefficient_reduced",
    "Bounded",
    "PrecisionExhausted",
    "PrecisionInsufficient",
    "PrecisionPolicy",
    "euler_gamma",
    "frac_part_certified",
    "log_factorial",
    "CriterionPoint",
    "SeqRecord",
    "I_closed_form",
    "I_series",
    "L_from_factorial_logs",
    "L_from_power_product",
    "build_record",
    "criterion_point",
    "gamma_roundtrip",
    "log_S",
    "sondow_threshold",
    "tail_probe",
    "LAWS",
    "aitken_limit",
    "convergence_report",
]
