"""Passivity gains, secant-condition certificates, and cascade simulation
for rational transfer functions under unity negative feedback."""

from .cascade import (
    CascadeSpec,
    check_secant_condition,
    closed_loop_char_poly,
    closed_loop_stable,
    cyclic_char_poly,
    cyclic_matrix_hurwitz,
    secant_threshold,
)
from .errors import (
    AlgebraicLoopError,
    ConvergenceError,
    DegenerateInputError,
    InfiniteGainError,
    NotStableError,
    SimulationDivergedError,
    ToolkitError,
)
from .geometry import (
    VectorChain,
    angle,
    angle_sum_lower_bound,
    chain_cosine_product,
    jensen_cos_bound,
)
from .passivity import (
    LinearGain,
    MichaelisMenten,
    circle_certificate,
    hinf_gain,
    is_osp,
    is_spr,
    secant_gain,
    static_gain,
)
from .poly import Polynomial, RationalTransfer, real_roots_nonneg, routh_hurwitz
from .simulate import (
    FirstOrderBlock,
    LinearBlockSS,
    Signal,
    angle_T,
    empirical_gain_ratio,
    find_inhibitory_equilibrium,
    inner_product_T,
    l2_norm_T,
    realize,
    shift_equilibrium,
    simulate_closed_loop,
    simulate_open_loop,
    verify_osp_empirically,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Polynomial",
    "RationalTransfer",
    "routh_hurwitz",
    "real_roots_nonneg",
    "secant_gain",
    "hinf_gain",
    "is_osp",
    "is_spr",
    "circle_certificate",
    "static_gain",
    "MichaelisMenten",
    "LinearGain",
    "CascadeSpec",
    "secant_threshold",
    "check_secant_condition",
    "cyclic_char_poly",
    "cyclic_matrix_hurwitz",
    "closed_loop_char_poly",
    "closed_loop_stable",
    "VectorChain",
    "angle",
    "chain_cosine_product",
    "angle_sum_lower_bound",
    "jensen_cos_bound",
    "Signal",
    "FirstOrderBlock",
    "LinearBlockSS",
    "realize",
    "simulate_closed_loop",
    "simulate_open_loop",
    "find_inhibitory_equilibrium",
    "l2_norm_T",
    "inner_product_T",
    "angle_T",
    "verify_osp_empirically",
    "empirical_gain_ratio",
    "shift_equilibrium",
    "ToolkitError",
    "DegenerateInputError",
    "NotStableError",
    "InfiniteGainError",
    "AlgebraicLoopError",
    "ConvergenceError",
    "SimulationDivergedError",
]
