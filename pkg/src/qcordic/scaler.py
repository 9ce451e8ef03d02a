"""Reversible multiplication and division by ``1 + 2**-m``.

Both routines build the scale factor as a truncated geometric series whose
partial lengths follow the Fibonacci numbers, alternating shifted additions
between the target register and an auxiliary register that starts (and ends)
near zero.  ``div_in_place`` is the forward construction; ``mult_in_place``
replays exactly the same additions in reverse order with opposite signs, so
the two are bit-exact inverses on every register state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

from .revops import OpTrace, Register, add_shifted_into, sub_shifted_into

PHI = (1 + math.sqrt(5)) / 2


@lru_cache(maxsize=None)
def fibonacci(count: int) -> Tuple[int, ...]:
    """F = (1, 1, 2, 3, 5, ...) with ``count`` entries."""
    fib = [1, 1]
    while len(fib) < count:
        fib.append(fib[-1] + fib[-2])
    return tuple(fib[:count])


def formula_iterations(m: int, n: int) -> int:
    """ceil(sqrt(5) * phi**-m * n)."""
    return math.ceil(math.sqrt(5) * PHI ** -m * n)


def sufficient_iterations(m: int, n: int) -> int:
    """Smallest J with m * F[J] >= n, i.e. the residual falls below one ulp."""
    j = 0
    while m * fibonacci(j + 1)[j] < n:
        j += 1
    return j


@dataclass(frozen=True)
class ScalerPlan:
    m: int
    n: int
    iters: int
    formula_iters: int
    fib: Tuple[int, ...]

    def addend_negative(self, i: int) -> bool:
        # sign of (-1)**F[i]
        return self.fib[i] % 2 == 1

    def shift(self, i: int) -> int:
        return self.m * self.fib[i]

    @property
    def additions(self) -> int:
        return self.iters + 2 if self.iters else 0


@lru_cache(maxsize=None)
def plan(m: int, n: int, clamp: bool = True) -> ScalerPlan:
    """Iteration plan for scaling by ``1 + 2**-m`` at width ``n``.

    With ``clamp`` (the default) the executed count is the smallest J with
    ``m * F[J] >= n``; without it, the closed-form golden-ratio count is
    executed as is.  The closed-form value is always kept for reporting.
    """
    if m < 1:
        raise ValueError(f"shift exponent must be >= 1, got {m}")
    if n < 4:
        raise ValueError(f"width must be >= 4, got {n}")
    formula = formula_iterations(m, n)
    iters = sufficient_iterations(m, n) if clamp else formula
    return ScalerPlan(m=m, n=n, iters=iters, formula_iters=formula, fib=fibonacci(iters + 2))


def _check(inp: Register, aux: Register) -> None:
    if inp is aux:
        raise ValueError("Mult/Div need two distinct registers")
    if inp.width != aux.width:
        raise ValueError(f"register widths differ: {inp.width} vs {aux.width}")


def div_in_place(inp: Register, aux: Register, m: int, trace: Optional[OpTrace] = None,
                 clamp: bool = True, check: bool = False) -> None:
    """inp <- inp / (1 + 2**-m), leaving a small residual in aux."""
    _check(inp, aux)
    p = plan(m, inp.width, clamp)
    if trace is not None:
        trace.mults += 1
        trace.mult_additions += p.additions
    if not p.iters:
        return
    add_shifted_into(aux, inp, 0, trace, check)
    for i in range(p.iters):
        src, dst = (inp, aux) if i % 2 == 0 else (aux, inp)
        op = sub_shifted_into if p.addend_negative(i) else add_shifted_into
        op(dst, src, p.shift(i), trace, check)
    sub_shifted_into(aux, inp, 0, trace, check)


def mult_in_place(inp: Register, aux: Register, m: int, trace: Optional[OpTrace] = None,
                  clamp: bool = True, check: bool = False) -> None:
    """inp <- (1 + 2**-m) * inp; exact inverse of :func:`div_in_place`.

    aux should hold a value within a few ulp of zero.  This is not enforced,
    because inside the CORDIC pipeline aux deliberately accumulates the
    residuals of earlier calls and is only cleared by uncomputation.
    """
    _check(inp, aux)
    p = plan(m, inp.width, clamp)
    if trace is not None:
        trace.mults += 1
        trace.mult_additions += p.additions
    if not p.iters:
        return
    add_shifted_into(aux, inp, 0, trace, check)
    for i in reversed(range(p.iters)):
        src, dst = (inp, aux) if i % 2 == 0 else (aux, inp)
        op = add_shifted_into if p.addend_negative(i) else sub_shifted_into
        op(dst, src, p.shift(i), trace, check)
    sub_shifted_into(aux, inp, 0, trace, check)
