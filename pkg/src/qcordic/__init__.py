"""Reversible fixed-point CORDIC arcsine and digital-to-amplitude encoding."""

from .ampenc import OutQubit, StateVector, amplitude_encode, apply_R, apply_Rprime, ry, statevector_pipeline
from .cordic import (
    AtanTable,
    DirectionWord,
    DomainError,
    arcsin_value,
    cleanup_directions,
    directions,
    init_state,
    iterate,
    prep_sqrt,
    uncompute_garbage,
)
from .fixedpoint import FixWord, asr, bitnot, decode, encode, neg, sign, wrap_add, wrap_sub
from .revops import OpTrace, RegisterFile
from .scaler import ScalerPlan, div_in_place, mult_in_place, plan

__all__ = [
    "AtanTable", "DirectionWord", "DomainError", "FixWord", "OpTrace", "OutQubit", "RegisterFile",
    "ScalerPlan", "StateVector", "amplitude_encode", "apply_R", "apply_Rprime", "arcsin_value", "asr",
    "bitnot", "cleanup_directions", "decode", "directions", "div_in_place", "encode", "init_state",
    "iterate", "mult_in_place", "neg", "plan", "prep_sqrt", "ry", "sign", "statevector_pipeline",
    "uncompute_garbage", "wrap_add", "wrap_sub",
]
