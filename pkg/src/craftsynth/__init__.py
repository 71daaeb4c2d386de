"""Clifford+T gate synthesis with remnant-error crafting."""

from .channels import (
    ChiDiag,
    Ptm,
    gram_to_chi,
    magic_vec,
    mixture_diamond,
    nonpauli_residual,
    ptm_of_channel,
    rx,
    ry,
    rz,
    unitary_diamond,
)
from .cliffordt import GateWord, enumerate_ma, eval_exact, eval_float, ma_normalize
from .craftopt import ConstraintFamily, CraftSolution, craft, uncrafted_mix
from .cptpcraft import CraftedPair, mix_pair, mu_nu, search_pair
from .lp import LpProblem, solve_lp
from .ring import ExactUnitary, RingElem
from .shiftgen import ShiftSpec, build_candidates, shift_unitary, theorem_vectors
from .synthesis import SynthRequest, SynthResult, synth_rz, synth_su2, synth_via_axial
from .whitenoise import NoiseLayerSpec, bias_bound, damping_factors, noise_metrics

__version__ = "0.1.0"

__all__ = [
    "ChiDiag", "ConstraintFamily", "CraftSolution", "CraftedPair",
    "ExactUnitary", "GateWord", "LpProblem", "NoiseLayerSpec", "Ptm",
    "RingElem", "ShiftSpec", "SynthRequest", "SynthResult",
    "bias_bound", "build_candidates", "craft", "damping_factors",
    "enumerate_ma", "eval_exact", "eval_float", "gram_to_chi", "magic_vec",
    "ma_normalize", "mix_pair", "mixture_diamond", "mu_nu", "noise_metrics",
    "nonpauli_residual", "ptm_of_channel", "rx", "ry", "rz", "search_pair",
    "shift_unitary", "solve_lp", "synth_rz", "synth_su2", "synth_via_axial",
    "theorem_vectors", "uncrafted_mix", "unitary_diamond",
]
