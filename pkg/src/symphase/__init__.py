"""Stable recovery up to global sign from magnitudes of symmetrized,
zero-padded Fourier measurements."""

__version__ = "0.1.0"

from .core import (
    circ_conv,
    circ_corr,
    conj_reverse,
    cyclic_shift,
    dft,
    direct_circ_conv,
    direct_circ_corr,
    direct_dft,
    direct_idft,
    idft,
    is_k_sparse,
    linear_conv,
    linear_conv_matrix,
    support,
    time_reverse,
)
from .errors import (
    MetadataError,
    NonRealLeadingEntry,
    NotAPerfectSquare,
    OddLeadingIndex,
    SymphaseError,
)
from .measurement import (
    MeasurementVector,
    NoiseModel,
    add_noise,
    autocorrelation_from,
    measure,
    measurement_length,
)
from .recovery import (
    RecoveryResult,
    dist_up_to_sign,
    poly_sqrt,
    recover_alternating,
    recover_direct,
)
from .symmetrization import (
    SymmetrizedVector,
    extract,
    is_conjugate_symmetric,
    symmetrize,
    symmetrize_padded,
    symmetrize_padded_A,
    symmetrize_padded_B,
)
