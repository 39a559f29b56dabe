"""Spatially coupled LDPC laboratory.

Construction of block and spatially coupled parity-check matrices,
erasure density evolution with detector coupling, windowed quantized
min-sum decoding, and a seeded Monte-Carlo BER harness.
"""

from .construction import (
    LEFT_TERMINATED,
    ZERO_TERMINATED,
    Protograph,
    QCLiftSpec,
    SCCodeSpec,
    couple_protograph,
    design_rate,
    expand_protograph,
    lift,
    min_distance_upper_bound,
    random_lift_spec,
    sc_code_from_stacked_lift,
    stack_blocks,
)
from .de import (
    DEState,
    FlatnessResult,
    ThresholdResult,
    WaveSpeedResult,
    converges,
    de_step,
    met_de_step,
    required_channel_for_speed,
    threshold_flatness,
    threshold_search,
    wave_speed,
)
from .ensembles import CoupledEnsemble, DetectorModel, shannon_limit
from .girth import ShiftSearchResult, compute_girth, search_shifts
from .matrices import (
    DegreeProfile,
    SparseBinaryMatrix,
    measure_degree_profile,
    read_alist,
    validate_codeword,
    write_alist,
)

__version__ = "0.1.0"
