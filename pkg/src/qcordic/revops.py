"""Reversible in-place register operations with operation counting.

Each register holds a raw bit pattern, either a Python int (one classical
basis state) or an int64 array (many basis states processed in lockstep).
Every operation here is a bijection on register contents and has an exact
inverse; the counters in :class:`OpTrace` are the same for an operation and
its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .fixedpoint import (
    FixWord,
    FixedPointOverflow,
    MAX_BATCH_WIDTH,
    Raw,
    WidthMismatchError,
    add_raw,
    asr_raw,
    check_width,
    fill_raw,
    mask,
    overflows,
    sign_raw,
    sub_raw,
    to_hex,
    to_signed,
)

REGISTER_NAMES = ("ang", "x", "y", "t", "aux")


@dataclass
class OpTrace:
    """Operation counters for one run.

    ``additions`` counts full-register add/sub operations (shifted or
    constant), ``swaps`` counts register-level controlled swaps and
    ``controlled_nots`` counts single-target CNOT gates.  Toffolis from the
    direction network and Mult/Div invocations are tracked alongside;
    ``mult_additions`` is the share of ``additions`` spent inside them.
    """

    additions: int = 0
    swaps: int = 0
    controlled_nots: int = 0
    toffolis: int = 0
    mults: int = 0
    mult_additions: int = 0
    touched: Dict[str, int] = field(default_factory=dict)

    def touch(self, name: str, width: int) -> None:
        self.touched[name] = width

    @property
    def bits_total(self) -> int:
        return sum(self.touched.values())

    def csv_header(self) -> str:
        return "n,additions,swaps,controlled_nots"

    def csv_row(self, n: int) -> str:
        return f"{n},{self.additions},{self.swaps},{self.controlled_nots}"

    def counts(self) -> tuple:
        return (self.additions, self.swaps, self.controlled_nots, self.toffolis, self.mults, self.mult_additions)


def _trace(trace: Optional[OpTrace]) -> OpTrace:
    return trace if trace is not None else OpTrace()


class Register:
    """A named n-bit register holding a raw pattern (or an array of them)."""

    __slots__ = ("name", "width", "raw")

    def __init__(self, name: str, width: int, raw: Raw = 0):
        self.name = name
        self.width = width
        self.raw = raw

    @property
    def word(self) -> FixWord:
        return FixWord(int(self.raw), self.width)

    @property
    def value(self):
        return to_signed(self.raw, self.width) * 2.0 ** -(self.width - 2)

    def __repr__(self) -> str:
        if isinstance(self.raw, np.ndarray):
            return f"Register({self.name}, n={self.width}, batch={self.raw.shape})"
        return f"Register({self.name}, {to_hex(self.word)}, value={self.value})"


@dataclass
class RegisterFile:
    """The CORDIC registers ``ang, x, y, t, aux`` plus direction bits ``d``.

    ``d[i - 1]`` holds d_i for iterations i = 1 .. n-1.
    """

    n: int
    ang: Register
    x: Register
    y: Register
    t: Register
    aux: Register
    d: List[Raw]
    check_overflow: bool = False

    @classmethod
    def zeros(cls, n: int, batch: Optional[int] = None, check_overflow: bool = False) -> "RegisterFile":
        n = check_width(n)
        if batch is None:
            def zero():
                return 0
        else:
            if n > MAX_BATCH_WIDTH:
                raise ValueError(f"batch registers support widths up to {MAX_BATCH_WIDTH}")

            def zero():
                return np.zeros(batch, dtype=np.int64)
        regs = {name: Register(name, n, zero()) for name in REGISTER_NAMES}
        return cls(n=n, d=[zero() for _ in range(n - 1)], check_overflow=check_overflow, **regs)

    @property
    def is_batch(self) -> bool:
        return isinstance(self.x.raw, np.ndarray)

    @property
    def registers(self) -> Dict[str, Register]:
        return {name: getattr(self, name) for name in REGISTER_NAMES}

    @property
    def bit_count(self) -> int:
        """Bits without the optional angle register."""
        return 4 * self.n + (self.n - 1)

    def copy(self) -> "RegisterFile":
        def dup(v):
            return v.copy() if isinstance(v, np.ndarray) else v

        regs = {name: Register(name, self.n, dup(r.raw)) for name, r in self.registers.items()}
        return RegisterFile(n=self.n, d=[dup(b) for b in self.d], check_overflow=self.check_overflow, **regs)

    def snapshot(self) -> tuple:
        """Hashable/comparable view of every bit in the file."""
        def freeze(v):
            return tuple(v.tolist()) if isinstance(v, np.ndarray) else v

        return tuple(freeze(r.raw) for r in self.registers.values()) + tuple(freeze(b) for b in self.d)

    def d_bits(self) -> np.ndarray:
        """Direction bits as an array of shape (n-1,) or (n-1, batch)."""
        return np.array([np.asarray(b) for b in self.d], dtype=np.int8)


def _pair(dst: Register, src: Register) -> int:
    if dst is src:
        raise ValueError(f"in-place shifted self-add on {dst.name!r} is not invertible")
    if dst.width != src.width:
        raise WidthMismatchError(f"{dst.name} has {dst.width} bits, {src.name} has {src.width}")
    return dst.width


def add_shifted_into(dst: Register, src: Register, m: int, trace: Optional[OpTrace] = None,
                     check: bool = False) -> None:
    """dst <- dst + (src >> m)."""
    n = _pair(dst, src)
    addend = asr_raw(src.raw, m, n)
    if check and overflows(dst.raw, addend, n):
        raise FixedPointOverflow(f"{dst.name} += {src.name} >> {m} overflowed")
    dst.raw = add_raw(dst.raw, addend, n)
    tr = _trace(trace)
    tr.additions += 1
    tr.touch(dst.name, n)
    tr.touch(src.name, n)


def sub_shifted_into(dst: Register, src: Register, m: int, trace: Optional[OpTrace] = None,
                     check: bool = False) -> None:
    """dst <- dst - (src >> m); exact inverse of :func:`add_shifted_into`."""
    n = _pair(dst, src)
    addend = asr_raw(src.raw, m, n)
    if check and overflows(dst.raw, addend, n, subtract=True):
        raise FixedPointOverflow(f"{dst.name} -= {src.name} >> {m} overflowed")
    dst.raw = sub_raw(dst.raw, addend, n)
    tr = _trace(trace)
    tr.additions += 1
    tr.touch(dst.name, n)
    tr.touch(src.name, n)


def add_const(dst: Register, raw: int, trace: Optional[OpTrace] = None) -> None:
    """dst <- dst + constant (a classically known pattern)."""
    dst.raw = add_raw(dst.raw, raw & mask(dst.width), dst.width)
    tr = _trace(trace)
    tr.additions += 1
    tr.touch(dst.name, dst.width)


def sub_const(dst: Register, raw: int, trace: Optional[OpTrace] = None) -> None:
    dst.raw = sub_raw(dst.raw, raw & mask(dst.width), dst.width)
    tr = _trace(trace)
    tr.additions += 1
    tr.touch(dst.name, dst.width)


def cswap(x: Register, y: Register, ctrl: Raw, trace: Optional[OpTrace] = None) -> None:
    """Exchange x and y where ctrl is 1.  Self-inverse."""
    if x.width != y.width:
        raise WidthMismatchError(f"{x.name} has {x.width} bits, {y.name} has {y.width}")
    diff = (x.raw ^ y.raw) & fill_raw(ctrl, x.width)
    x.raw = x.raw ^ diff
    y.raw = y.raw ^ diff
    tr = _trace(trace)
    tr.swaps += 1
    tr.touch(x.name, x.width)
    tr.touch(y.name, y.width)


def cnot_register(reg: Register, ctrl: Raw, trace: Optional[OpTrace] = None) -> None:
    """Flip every bit of reg where ctrl is 1.  Self-inverse."""
    reg.raw = reg.raw ^ fill_raw(ctrl, reg.width)
    tr = _trace(trace)
    tr.controlled_nots += reg.width
    tr.touch(reg.name, reg.width)


def cnegate_register(reg: Register, ctrl: Raw, trace: Optional[OpTrace] = None) -> None:
    """reg <- -reg where ctrl is 1 (complement then controlled increment).  Self-inverse."""
    n = reg.width
    reg.raw = add_raw(reg.raw ^ fill_raw(ctrl, n), ctrl, n)
    tr = _trace(trace)
    tr.controlled_nots += n
    tr.additions += 1
    tr.touch(reg.name, n)


def direction_bit(sx: Raw, sy: Raw, st: Raw) -> Raw:
    """[s(x) and s(t-y)] xor s(x) xor [s(x) and s(y)] xor s(t-y)."""
    return (sx & st) ^ sx ^ (sx & sy) ^ st


def compute_direction(x: Register, y: Register, t: Register, d: List[Raw], i: int,
                      trace: Optional[OpTrace] = None) -> None:
    """XOR the iteration-i direction decision into ``d[i - 1]``.

    t is temporarily replaced by t - y so its sign bit can steer the
    Toffoli/CNOT network, then restored.  Applying this twice in the same
    register state clears the bit again.
    """
    tr = _trace(trace)
    n = x.width
    sub_shifted_into(t, y, 0, tr)
    sx, sy, st = sign_raw(x.raw, n), sign_raw(y.raw, n), sign_raw(t.raw, n)
    # two Toffolis (x&t, x&y) and two CNOTs (x, t) onto d_i
    d[i - 1] = d[i - 1] ^ direction_bit(sx, sy, st)
    tr.toffolis += 2
    tr.controlled_nots += 2
    tr.touch("d", len(d))
    add_shifted_into(t, y, 0, tr)
