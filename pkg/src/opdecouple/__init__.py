"""Quantum harmonic analysis on the finite phase space Z_n x Z_n.

Symplectic Fourier transform, symmetric time-frequency shifts, Schatten
norms, Werner's convolutions, a Wiener division kit for band-limited
operators, and lower-bound estimators for classical and quantum decoupling
constants.
"""

__version__ = "0.1.0"

from .convolutions import conv_fn_fn, conv_fn_op, conv_op_op, werner_young_margin
from .decoupling import (
    ClassicalFamily,
    DecouplingEstimate,
    OperatorFamily,
    Partition,
    PartitionError,
    equivalence_chain_check,
    estimate_decoupling,
    lift_family,
    lower_family,
    parabola_partition,
    ratio_classical,
    ratio_quantum,
)
from .division import (
    DivisionKit,
    ModulusFloorError,
    OmegaTooLargeError,
    build_division_kit,
    norm_equivalence_check,
    reconstruct_function,
    reconstruct_operator,
)
from .exponents import parse_exponent, young_target
from .objects import Operator, Signal
from .operators import (
    fourier_wigner,
    inverse_fourier_wigner,
    inverse_weyl_symbol,
    op_bandlimit,
    rank_one,
    schatten_norm,
    weyl_symbol,
)
from .phase_space import (
    CellSet,
    GridSpec,
    PhaseFunction,
    PhasePoint,
    bandlimit,
    lp_norm,
    symplectic_dft,
    symplectic_form,
)
from .weyl_rep import ambiguity, conjugate, parity, shift_operator

__all__ = [
    "__version__",
    "CellSet",
    "ClassicalFamily",
    "DecouplingEstimate",
    "DivisionKit",
    "GridSpec",
    "ModulusFloorError",
    "OmegaTooLargeError",
    "Operator",
    "OperatorFamily",
    "Partition",
    "PartitionError",
    "PhaseFunction",
    "PhasePoint",
    "Signal",
    "ambiguity",
    "bandlimit",
    "build_division_kit",
    "conjugate",
    "conv_fn_fn",
    "conv_fn_op",
    "conv_op_op",
    "equivalence_chain_check",
    "estimate_decoupling",
    "fourier_wigner",
    "inverse_fourier_wigner",
    "inverse_weyl_symbol",
    "lift_family",
    "lower_family",
    "lp_norm",
    "norm_equivalence_check",
    "op_bandlimit",
    "parabola_partition",
    "parity",
    "parse_exponent",
    "rank_one",
    "ratio_classical",
    "ratio_quantum",
    "reconstruct_function",
    "reconstruct_operator",
    "schatten_norm",
    "shift_operator",
    "symplectic_dft",
    "symplectic_form",
    "weyl_symbol",
    "werner_young_margin",
    "young_target",
]
