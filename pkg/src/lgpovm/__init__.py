"""Leggett-Garg inequality violation under a measurability-controlled two-outcome POVM on spin j."""
from .correlations import (
    CorrelationBreakdown,
    DynamicsParams,
    LgiResult,
    correlation_closed_form,
    k_lg,
    k_lg_four_measurements,
    maximally_mixed,
    post_state,
    two_time_correlation,
)
from .errors import InvalidInputError, InvalidStateError, LgpovmError, OutcomeImpossibleError
from .measurability import (
    MeasurabilityParam,
    MeasurabilityPovm,
    Partition,
    build_A,
    build_povm,
    edge_partition_5_2,
    f_value,
    neumark_verify,
    uniform_partition,
)
from .spin_ops import HalfInt, SpinSystem, jx_matrix, jy_matrix, jz_matrix, parity_matrix, rotation_x
from .sweep import SweepSpec, sweep_f_vs_sigma, sweep_k_vs_b, violation_threshold

__version__ = "0.1.0"
