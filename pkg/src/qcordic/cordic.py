"""Reversible double-rotation CORDIC arcsine and the direction-bit pipeline.

Each iteration i decides a direction bit d_i from sign bits, conjugates a
pair of pseudo-rotations by a controlled x/y swap (so d_i = 1 rotates
clockwise), stretches the goal t by the same factor ``1 + 4**-i`` and
optionally accumulates ``(-1)**d_i * 2 * atan(2**-i)`` into ``ang``.
Every step is invertible given d, which is what makes the garbage-free
uncomputation below possible.

The square-root input variant stores h on the grid ``j * 2**-(n-1)``, one
fraction bit finer than the register format.  Reading that pattern in the
register format yields 2h for free, so preparing ``t = 2h - 1`` takes a
single constant subtraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .fixedpoint import (
    FixWord,
    Raw,
    check_width,
    encode,
    mask,
    one_raw,
    to_signed,
    ulp,
)
from .revops import (
    OpTrace,
    RegisterFile,
    add_const,
    add_shifted_into,
    cnegate_register,
    cnot_register,
    compute_direction,
    cswap,
    sub_const,
    sub_shifted_into,
)
from .scaler import div_in_place, mult_in_place

NEGATE_MODES = ("not", "neg")


class DomainError(ValueError):
    """Input outside the mathematical domain of the operation."""


@dataclass(frozen=True)
class AtanTable:
    """``entries[i - 1] = encode(scale * atan(2**-i), n)`` for i = 1 .. n-1.

    scale is 2 for the full-angle arcsine and 1 for the half-angle
    (square-root) variant.
    """

    n: int
    scale: int
    entries: Tuple[FixWord, ...]

    @classmethod
    def build(cls, n: int, scale: int = 2) -> "AtanTable":
        entries = tuple(encode(scale * math.atan(2.0 ** -i), n) for i in range(1, n))
        return cls(n=n, scale=scale, entries=entries)

    def __getitem__(self, i: int) -> FixWord:
        return self.entries[i - 1]

    def exact(self, i: int) -> float:
        return self.scale * math.atan(2.0 ** -i)


@dataclass(frozen=True)
class DirectionWord:
    """Direction bits d_1 .. d_{n-1}; ``bits`` has shape (n-1,) or (n-1, batch)."""

    n: int
    bits: np.ndarray

    def angle(self, scale: float = 2.0) -> np.ndarray:
        """sum_i (-1)**d_i * scale * atan(2**-i)."""
        mu = scale * np.arctan(2.0 ** -np.arange(1, self.n, dtype=float))
        signs = 1.0 - 2.0 * self.bits.astype(float)
        if signs.ndim == 1:
            return float(mu @ signs)
        return mu @ signs

    def as_int(self) -> int:
        """d_1 as the most significant bit."""
        out = 0
        for b in self.bits.tolist():
            out = (out << 1) | int(b)
        return out


# -- state construction -------------------------------------------------------

def _as_word(t, n: int) -> FixWord:
    if isinstance(t, FixWord):
        if t.width != n:
            raise ValueError(f"word width {t.width} does not match n={n}")
        return t
    if not -1 <= t <= 1:
        raise DomainError(f"t={t!r} is outside [-1, 1]")
    return encode(t, n)


def init_state(t, n: int, check_overflow: bool = False) -> RegisterFile:
    """ang=0, x=1, y=0, t=t, aux=0, d=0."""
    n = check_width(n)
    w = _as_word(t, n)
    if abs(to_signed(w.raw, n)) > one_raw(n):
        raise DomainError(f"t={w.value} is outside [-1, 1]")
    state = RegisterFile.zeros(n, check_overflow=check_overflow)
    state.x.raw = one_raw(n)
    state.t.raw = w.raw
    return state


def init_batch(t_raw: np.ndarray, n: int) -> RegisterFile:
    """Batch version of :func:`init_state` (no domain check)."""
    t_raw = np.asarray(t_raw, dtype=np.int64)
    state = RegisterFile.zeros(n, batch=t_raw.shape[0])
    state.x.raw = np.full(t_raw.shape[0], one_raw(n), dtype=np.int64)
    state.t.raw = t_raw.copy()
    return state


def h_grid_raw(n: int, include_one: bool = False) -> np.ndarray:
    """Patterns j for h = j * 2**-(n-1), j = 0 .. 2**(n-1) - 1 (plus h=1)."""
    top = (1 << (n - 1)) + (1 if include_one else 0)
    return np.arange(top, dtype=np.int64)


def h_value(raw, n: int):
    return raw * 2.0 ** -(n - 1)


def h_raw(h, n: int) -> int:
    """Nearest grid pattern for h in [0, 1]."""
    if not 0 <= h <= 1:
        raise DomainError(f"h={h!r} is outside [0, 1]")
    return int(round(h * (1 << (n - 1))))


def init_sqrt_state(h, n: int) -> RegisterFile:
    """All-zero registers with h (grid pattern) in t."""
    n = check_width(n)
    state = RegisterFile.zeros(n)
    state.t.raw = h_raw(h, n)
    return state


def init_sqrt_batch(h_raws: np.ndarray, n: int) -> RegisterFile:
    h_raws = np.asarray(h_raws, dtype=np.int64)
    state = RegisterFile.zeros(n, batch=h_raws.shape[0])
    state.t.raw = h_raws.copy()
    return state


def prep_sqrt(state: RegisterFile, trace: Optional[OpTrace] = None, strict: bool = True) -> None:
    """t <- 2h - 1 and x <- 1, for arcsin(sqrt h) = arcsin(2h - 1)/2 + pi/4.

    ``strict`` rejects t patterns that are not an h in [0, 1].
    """
    n = state.n
    if strict and np.any((state.t.raw < 0) | (state.t.raw > (1 << (n - 1)))):
        raise DomainError("t does not hold an h in [0, 1]")
    sub_const(state.t, one_raw(n), trace)
    add_const(state.x, one_raw(n), trace)


def unprep_sqrt(state: RegisterFile, trace: Optional[OpTrace] = None) -> None:
    """Inverse of :func:`prep_sqrt`: x <- x - 1, t <- (t + 1) / 2."""
    n = state.n
    sub_const(state.x, one_raw(n), trace)
    add_const(state.t, one_raw(n), trace)


# -- one iteration ------------------------------------------------------------

def pseudo_rotation_substitution(state: RegisterFile, i: int, trace: Optional[OpTrace] = None,
                                 clamp: bool = True) -> None:
    """(x, y) <- (x - 2**-i y, y + 2**-i x) via x -= y>>i; y *= 1+4**-i; y += x>>i."""
    if i < 1:
        raise ValueError("iteration index starts at 1")
    chk = state.check_overflow
    sub_shifted_into(state.x, state.y, i, trace, chk)
    mult_in_place(state.y, state.aux, 2 * i, trace, clamp, chk)
    add_shifted_into(state.y, state.x, i, trace, chk)


def inverse_pseudo_rotation_substitution(state: RegisterFile, i: int, trace: Optional[OpTrace] = None,
                                         clamp: bool = True) -> None:
    chk = state.check_overflow
    sub_shifted_into(state.y, state.x, i, trace, chk)
    div_in_place(state.y, state.aux, 2 * i, trace, clamp, chk)
    add_shifted_into(state.x, state.y, i, trace, chk)


def _angle_step(state: RegisterFile, i: int, table: AtanTable, trace: Optional[OpTrace],
                negate_mode: str, inverse: bool) -> None:
    if negate_mode not in NEGATE_MODES:
        raise ValueError(f"negate_mode must be one of {NEGATE_MODES}")
    flip = cnot_register if negate_mode == "not" else cnegate_register
    ctrl = state.d[i - 1]
    flip(state.ang, ctrl, trace)
    if inverse:
        sub_const(state.ang, table[i].raw, trace)
    else:
        add_const(state.ang, table[i].raw, trace)
    flip(state.ang, ctrl, trace)


def iterate(state: RegisterFile, i: int, trace: Optional[OpTrace] = None, *,
            update_angle: bool = False, compute_d: bool = True,
            table: Optional[AtanTable] = None, negate_mode: str = "not",
            clamp: bool = True) -> None:
    """One pass of the loop body for iteration i (1 <= i <= n-1)."""
    n = state.n
    if not 1 <= i <= n - 1:
        raise ValueError(f"iteration {i} outside 1..{n - 1}")
    if compute_d:
        compute_direction(state.x, state.y, state.t, state.d, i, trace)
    di = state.d[i - 1]
    cswap(state.x, state.y, di, trace)
    pseudo_rotation_substitution(state, i, trace, clamp)
    pseudo_rotation_substitution(state, i, trace, clamp)
    cswap(state.x, state.y, di, trace)
    mult_in_place(state.t, state.aux, 2 * i, trace, clamp, state.check_overflow)
    if update_angle:
        _angle_step(state, i, table or AtanTable.build(n), trace, negate_mode, inverse=False)


def inverse_iterate(state: RegisterFile, i: int, trace: Optional[OpTrace] = None, *,
                    update_angle: bool = False, compute_d: bool = True,
                    table: Optional[AtanTable] = None, negate_mode: str = "not",
                    clamp: bool = True) -> None:
    """Exact inverse of :func:`iterate` with the same options."""
    n = state.n
    if not 1 <= i <= n - 1:
        raise ValueError(f"iteration {i} outside 1..{n - 1}")
    if update_angle:
        _angle_step(state, i, table or AtanTable.build(n), trace, negate_mode, inverse=True)
    div_in_place(state.t, state.aux, 2 * i, trace, clamp, state.check_overflow)
    di = state.d[i - 1]
    cswap(state.x, state.y, di, trace)
    inverse_pseudo_rotation_substitution(state, i, trace, clamp)
    inverse_pseudo_rotation_substitution(state, i, trace, clamp)
    cswap(state.x, state.y, di, trace)
    if compute_d:
        compute_direction(state.x, state.y, state.t, state.d, i, trace)


# -- full passes --------------------------------------------------------------

def run_arcsin(state: RegisterFile, trace: Optional[OpTrace] = None, *,
               table: Optional[AtanTable] = None, negate_mode: str = "not",
               clamp: bool = True) -> None:
    """All iterations with the angle register updated."""
    table = table or AtanTable.build(state.n)
    for i in range(1, state.n):
        iterate(state, i, trace, update_angle=True, table=table,
                negate_mode=negate_mode, clamp=clamp)


def arcsin_value(t_real, n: int, *, negate_mode: str = "not", clamp: bool = True,
                 check_overflow: bool = False) -> Tuple[FixWord, OpTrace]:
    """Fixed-point arcsin(t) at width n and the operation counts that produced it."""
    n = check_width(n)
    if not isinstance(t_real, FixWord) and not -1 <= t_real <= 1:
        raise DomainError(f"t={t_real!r} is outside [-1, 1]")
    state = init_state(t_real, n, check_overflow=check_overflow)
    trace = OpTrace()
    run_arcsin(state, trace, negate_mode=negate_mode, clamp=clamp)
    return state.ang.word, trace


def arcsin_batch(t_raw: np.ndarray, n: int, *, negate_mode: str = "not",
                 clamp: bool = True) -> np.ndarray:
    """Angle register patterns for every t pattern in ``t_raw``."""
    state = init_batch(t_raw, n)
    run_arcsin(state, negate_mode=negate_mode, clamp=clamp)
    return state.ang.raw


def arcsin_sqrt_batch(h_raws: np.ndarray, n: int, *, negate_mode: str = "not",
                      clamp: bool = True) -> np.ndarray:
    """Angle patterns approximating arcsin(sqrt h): ang starts at pi/4 and
    accumulates half-angle steps on the prepared t = 2h - 1."""
    state = init_sqrt_batch(h_raws, n)
    prep_sqrt(state)
    add_const(state.ang, encode(math.pi / 4, n).raw)
    run_arcsin(state, table=AtanTable.build(n, scale=1), negate_mode=negate_mode, clamp=clamp)
    return state.ang.raw


def arcsin_sqrt_value(h, n: int, **kw) -> FixWord:
    raw = arcsin_sqrt_batch(np.array([h_raw(h, n)]), n, **kw)
    return FixWord(int(raw[0]), n)


def directions(state: RegisterFile, trace: Optional[OpTrace] = None, clamp: bool = True) -> DirectionWord:
    """Forward pass without the angle register; leaves d set and garbage in x, y, aux."""
    for i in range(1, state.n):
        iterate(state, i, trace, clamp=clamp)
    return DirectionWord(state.n, state.d_bits())


def uncompute_garbage(state: RegisterFile, trace: Optional[OpTrace] = None, clamp: bool = True) -> None:
    """Reverse pass that keeps d: x, y, aux, t return to their pre-pass values."""
    for i in range(state.n - 1, 0, -1):
        inverse_iterate(state, i, trace, compute_d=False, clamp=clamp)


def cleanup_directions(state: RegisterFile, trace: Optional[OpTrace] = None, *,
                       prepped: bool = True, clamp: bool = True) -> None:
    """Clear d: rebuild the garbage, then reverse with the direction network active.

    With ``prepped`` the square-root preparation is undone as well, returning
    the file to all-zero registers with h in t.
    """
    for i in range(1, state.n):
        iterate(state, i, trace, compute_d=False, clamp=clamp)
    for i in range(state.n - 1, 0, -1):
        inverse_iterate(state, i, trace, compute_d=True, clamp=clamp)
    if prepped:
        unprep_sqrt(state, trace)


def direction_word(d_bits: Sequence[int], n: int) -> DirectionWord:
    bits = np.asarray(d_bits, dtype=np.int8)
    if bits.shape[0] != n - 1:
        raise ValueError(f"expected {n - 1} direction bits, got {bits.shape[0]}")
    return DirectionWord(n, bits)


def decode_angle(raw: Raw, n: int):
    return to_signed(np.asarray(raw, dtype=np.int64) & mask(n), n) * ulp(n)
