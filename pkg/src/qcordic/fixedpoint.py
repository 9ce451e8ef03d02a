"""Two's-complement fixed-point words in the ``x0 x1 . x2 ... x_{n-1}`` format.

A word of width ``n`` has one sign bit, one integer bit and ``n - 2``
fraction bits, so it covers ``[-2, 2)`` in steps of ``ulp = 2**-(n-2)``.
All arithmetic wraps modulo ``2**n``.

The ``*_raw`` helpers operate on unsigned bit patterns and accept either
Python ints or int64 numpy arrays, which is what lets the register machinery
run one input or a whole grid of inputs through identical code.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

MIN_WIDTH = 4
MAX_WIDTH = 64
# widest word the int64 batch path can hold without overflowing a sum
MAX_BATCH_WIDTH = 62

Raw = Union[int, np.ndarray]


class FixedPointRangeError(ValueError):
    """Value outside the representable interval [-2, 2)."""


class WidthMismatchError(ValueError):
    """Operands of different widths."""


class FixedPointOverflow(ArithmeticError):
    """Raised by checked adds when the exact result leaves [-2, 2)."""


def check_width(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not MIN_WIDTH <= n <= MAX_WIDTH:
        raise ValueError(f"width must be an integer in [{MIN_WIDTH}, {MAX_WIDTH}], got {n!r}")
    return int(n)


def mask(n: int) -> int:
    return (1 << n) - 1


def ulp(n: int) -> float:
    return 2.0 ** -(n - 2)


def one_raw(n: int) -> int:
    """Raw pattern of 1.0."""
    return 1 << (n - 2)


# -- raw-level helpers (int or int64 ndarray) ---------------------------------

def to_signed(raw: Raw, n: int) -> Raw:
    return raw - (((raw >> (n - 1)) & 1) << n)


def sign_raw(raw: Raw, n: int) -> Raw:
    return (raw >> (n - 1)) & 1


def asr_raw(raw: Raw, m: int, n: int) -> Raw:
    # shifting by n-1 already leaves pure sign fill
    return (to_signed(raw, n) >> min(m, n - 1)) & mask(n)


def add_raw(a: Raw, b: Raw, n: int) -> Raw:
    return (a + b) & mask(n)


def sub_raw(a: Raw, b: Raw, n: int) -> Raw:
    return (a - b) & mask(n)


def not_raw(a: Raw, n: int) -> Raw:
    return a ^ mask(n)


def fill_raw(bit: Raw, n: int) -> Raw:
    """All-ones pattern where ``bit`` is 1, zero elsewhere."""
    return (-bit) & mask(n)


def overflows(a: Raw, b: Raw, n: int, subtract: bool = False) -> bool:
    """True if the exact signed sum (or difference) leaves the n-bit range."""
    sa, sb = to_signed(a, n), to_signed(b, n)
    exact = sa - sb if subtract else sa + sb
    lo, hi = -(1 << (n - 1)), (1 << (n - 1))
    return bool(np.any((exact < lo) | (exact >= hi)))


# -- value type ---------------------------------------------------------------

@dataclass(frozen=True)
class FixWord:
    """An n-bit pattern read as a two's-complement value in [-2, 2)."""

    raw: int
    width: int

    def __post_init__(self):
        check_width(self.width)
        if not 0 <= self.raw <= mask(self.width):
            raise ValueError(f"raw pattern {self.raw:#x} does not fit in {self.width} bits")

    @property
    def value(self) -> float:
        return decode(self)

    @property
    def ulp(self) -> float:
        return ulp(self.width)

    def hex(self) -> str:
        return to_hex(self)

    def __float__(self) -> float:
        return decode(self)

    def __repr__(self) -> str:
        return f"FixWord({self.hex()}, n={self.width}, value={decode(self)!r})"


def encode(v, n: int) -> FixWord:
    """Nearest representable word to ``v``; ties go to the even pattern."""
    n = check_width(n)
    if isinstance(v, float) and not np.isfinite(v):
        raise FixedPointRangeError(f"{v!r} is not finite")
    if not -2 <= v < 2:
        raise FixedPointRangeError(f"{v!r} is outside [-2, 2)")
    # float * 2**k is exact, and round() on float/Fraction is half-even
    scaled = Fraction(v) * (1 << (n - 2))
    k = round(scaled)
    k = min(k, (1 << (n - 1)) - 1)
    return FixWord(k & mask(n), n)


def decode(w: FixWord) -> float:
    return to_signed(w.raw, w.width) * 2.0 ** -(w.width - 2)


def decode_exact(w: FixWord) -> Fraction:
    return Fraction(to_signed(w.raw, w.width), 1 << (w.width - 2))


def from_signed(k: int, n: int) -> FixWord:
    return FixWord(k & mask(n), n)


def _same_width(a: FixWord, b: FixWord) -> int:
    if a.width != b.width:
        raise WidthMismatchError(f"widths differ: {a.width} vs {b.width}")
    return a.width


def wrap_add(a: FixWord, b: FixWord, check: bool = False) -> FixWord:
    n = _same_width(a, b)
    if check and overflows(a.raw, b.raw, n):
        raise FixedPointOverflow(f"{decode(a)} + {decode(b)} leaves [-2, 2)")
    return FixWord(add_raw(a.raw, b.raw, n), n)


def wrap_sub(a: FixWord, b: FixWord, check: bool = False) -> FixWord:
    n = _same_width(a, b)
    if check and overflows(a.raw, b.raw, n, subtract=True):
        raise FixedPointOverflow(f"{decode(a)} - {decode(b)} leaves [-2, 2)")
    return FixWord(sub_raw(a.raw, b.raw, n), n)


def neg(a: FixWord) -> FixWord:
    return FixWord(sub_raw(0, a.raw, a.width), a.width)


def bitnot(a: FixWord) -> FixWord:
    return FixWord(not_raw(a.raw, a.width), a.width)


def asr(a: FixWord, m: int) -> FixWord:
    """Arithmetic right shift: multiply by 2**-m, truncating toward -inf."""
    if m < 0:
        raise ValueError("shift count must be non-negative")
    return FixWord(asr_raw(a.raw, m, a.width), a.width)


def sign(a: FixWord) -> int:
    return sign_raw(a.raw, a.width)


def to_hex(w: FixWord) -> str:
    digits = (w.width + 3) // 4
    return f"{w.raw:0{digits}x}"


def all_words(n: int):
    """Every pattern of width n, in raw order."""
    return (FixWord(r, n) for r in range(1 << n))


def grid_raw(n: int, lo: float = -1.0, hi: float = 1.0, include_hi: bool = True) -> np.ndarray:
    """Raw patterns of all representable values in [lo, hi] (or [lo, hi)), ascending."""
    k_lo = int(np.ceil(lo * (1 << (n - 2))))
    k_hi = int(np.floor(hi * (1 << (n - 2))))
    if not include_hi and k_hi * 2.0 ** -(n - 2) >= hi:
        k_hi -= 1
    k = np.arange(k_lo, k_hi + 1, dtype=np.int64)
    return k & mask(n)
