"""Finite-dimensional quantum detailed balance toolkit.

Channels are held as standard Choi matrices; detailed-balance conditions,
their reversed/recovery duals, parity variants and the classical Markov-chain
embedding are all exposed as executable checks.
"""

from .tolerances import DEFAULT_TOLS, ToleranceConfig
from .linalg import (
    HermEigen,
    herm_eig,
    partial_trace,
    partial_transpose,
    psd_power,
    swap_operator,
    tensor,
)
from .channel import Channel, DensityMatrix, RelativeChoi, adjoint, apply, cj_invert, cj_relative, from_kraus
from .transitions import (
    CJDecomposition,
    CompletenessReport,
    ElementaryTransition,
    decompose,
    elementary_map,
    is_complete,
    reverse_transition,
)
from .balance import (
    BalanceReport,
    CheckOutcome,
    ac_dual,
    check_etdb,
    check_invariance,
    check_sqdb,
    dual_channel,
    etdb_decomposition,
    kms_dual,
)
from .parity import (
    ParityOp,
    ReversingOp,
    apply_parity,
    apply_reversing,
    check_etdb_p,
    check_sqdb_theta,
    factor_theta,
    joint_diagonalize,
    parity_dual,
    q_map,
    shift_clock,
)
from .classical import (
    MarkovChain,
    check_classical_db,
    check_classical_db_parity,
    embed,
    reverse_chain,
    verify_classical_dual_consistency,
)

__all__ = [
    "DEFAULT_TOLS",
    "ToleranceConfig",
    "HermEigen",
    "herm_eig",
    "partial_trace",
    "partial_transpose",
    "psd_power",
    "swap_operator",
    "tensor",
    "Channel",
    "DensityMatrix",
    "RelativeChoi",
    "adjoint",
    "apply",
    "cj_invert",
    "cj_relative",
    "from_kraus",
    "CJDecomposition",
    "CompletenessReport",
    "ElementaryTransition",
    "decompose",
    "elementary_map",
    "is_complete",
    "reverse_transition",
    "BalanceReport",
    "CheckOutcome",
    "ac_dual",
    "check_etdb",
    "check_invariance",
    "check_sqdb",
    "dual_channel",
    "etdb_decomposition",
    "kms_dual",
    "ParityOp",
    "ReversingOp",
    "apply_parity",
    "apply_reversing",
    "check_etdb_p",
    "check_sqdb_theta",
    "factor_theta",
    "joint_diagonalize",
    "parity_dual",
    "q_map",
    "shift_clock",
    "MarkovChain",
    "check_classical_db",
    "check_classical_db_parity",
    "embed",
    "reverse_chain",
    "verify_classical_dual_consistency",
]
