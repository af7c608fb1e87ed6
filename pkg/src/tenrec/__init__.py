"""Randomized low-rank tensor approximation and nonconvex tensor recovery."""

from .core import fold, inner, mode_product, norms, unfold
from .data import corrupt, metrics, synth_lowrank_smooth, synth_spectral_decay
from .gradient import GradientSet, grad, grad_adjoint, solve_grad_system
from .onebit import ObservationSet, gnobhtc, gnobrhtc, naive_estimate, onebit_observe
from .penalties import (
    L1,
    MCP,
    SCAD,
    CappedLq,
    Firm,
    LogPenalty,
    Lq,
    Penalty,
    make_penalty,
)
from .shrink import ShrinkStructure, gnhtctv_value, gnhtsvt, gnhtt, upsilon_value
from .sketch import (
    BLBPDiagnostics,
    SketchConfig,
    TuckerFactors,
    ad_rsthosvd_blbp,
    defl_qr,
    gnhtsvt_randomized,
    local_orthogonality_loss,
    rsthosvd_bki,
    sthosvd,
)
from .solvers import (
    SolveReport,
    SolverConfig,
    SolverState,
    default_lambda,
    gnhtc,
    gnrhtc,
    kkt_diagnostics,
)
from .tensorfile import read_tensor, write_tensor
from .transform import (
    Transform,
    TransformError,
    TSVDFactors,
    apply_transform,
    face_singular_values,
    htnn,
    identity_tensor,
    inverse_transform,
    tproduct,
    tsvd,
)

__version__ = "0.1.0"
