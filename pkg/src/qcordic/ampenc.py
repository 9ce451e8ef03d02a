"""Digital-to-amplitude conversion on one output qubit.

Two encoders are provided: ``apply_R`` rotates by the value held in an angle
register, and ``apply_Rprime`` rotates by the CORDIC direction bits alone,
which is what lets the pipeline drop the angle register entirely.

Rotations use ``ry(w) = [[cos w, -sin w], [sin w, cos w]]`` (full angle, not
the half-angle gate convention), so ``ry(w)|0> = cos w |0> + sin w |1>``.

Two simulators run the pipeline.  The hybrid one tracks each basis branch
as classical registers plus two real amplitudes; the state-vector one holds
every amplitude of the 5n-qubit register layout and is limited to n <= 5.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cordic import (
    DirectionWord,
    DomainError,
    cleanup_directions,
    directions,
    h_grid_raw,
    h_raw,
    h_value,
    init_sqrt_batch,
    init_sqrt_state,
    prep_sqrt,
    uncompute_garbage,
)
from .fixedpoint import FixWord, check_width, mask, to_signed, ulp
from .revops import OpTrace, RegisterFile

MAX_STATEVECTOR_N = 5
GATE_AGREEMENT = 1e-12


class CapacityError(ValueError):
    """State vector too large for the dense simulator."""


def ry(omega: float) -> np.ndarray:
    c, s = math.cos(omega), math.sin(omega)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class OutQubit:
    a0: float
    a1: float

    def __post_init__(self):
        if abs(self.a0 ** 2 + self.a1 ** 2 - 1) > 1e-12:
            raise ValueError(f"amplitudes ({self.a0}, {self.a1}) are not normalized")

    @property
    def p1(self) -> float:
        return self.a1 ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1])


# -- R: angle register -> amplitude --------------------------------------------

def bit_weights(n: int, mode: str = "radian") -> np.ndarray:
    """Rotation angle contributed by each bit, index 0 = least significant.

    ``radian`` weights each bit by its positional value in the register
    format, so the total rotation equals the decoded angle.  ``pi`` reads the
    register as an unsigned fraction of pi/2 and gives the most significant
    bit pi/4, the next pi/8, down to pi/2**(n+1).
    """
    if mode == "radian":
        w = 2.0 ** (np.arange(n) - (n - 2))
        w[n - 1] = -2.0
        return w
    if mode == "pi":
        return math.pi / 2.0 ** (n + 1 - np.arange(n))
    raise ValueError("mode must be 'radian' or 'pi'")


def pi_fraction_word(theta: float, n: int) -> int:
    """Pattern for ``mode='pi'``: theta as an unsigned n-bit fraction of pi/2."""
    if not 0 <= theta <= math.pi / 2:
        raise DomainError(f"theta={theta} is outside [0, pi/2]")
    return min(int(round(theta / (math.pi / 2) * (1 << n))), (1 << n) - 1)


def apply_R(ang, mode: str = "radian", strict: bool = True, n: Optional[int] = None) -> OutQubit:
    """Rotate |0> by every set bit's constant, controlled on that bit.

    ``ang`` is a :class:`FixWord` (radian mode) or a raw pattern with width
    ``n`` (pi mode).  With ``strict`` the radian angle must lie in
    [0, pi/2], allowing one ulp of quantization at either end.
    """
    if isinstance(ang, FixWord):
        raw, n = ang.raw, ang.width
    else:
        if n is None:
            raise ValueError("width n is required for a raw pattern")
        raw = int(ang)
    if mode == "radian" and strict:
        v = to_signed(raw, n) * ulp(n)
        if not -ulp(n) <= v <= math.pi / 2 + ulp(n):
            raise DomainError(f"angle {v} is outside [0, pi/2]")
    amp = np.array([1.0, 0.0])
    for k, w in enumerate(bit_weights(n, mode)):
        if (raw >> k) & 1:
            amp = ry(w) @ amp
    return OutQubit(float(amp[0]), float(amp[1]))


# -- R': direction bits -> amplitude -------------------------------------------

def half_angles(n: int) -> np.ndarray:
    """mu_i = atan(2**-i) for i = 1 .. n-1."""
    return np.arctan(2.0 ** -np.arange(1, n, dtype=float))


def rprime_angle(bits: np.ndarray, n: int) -> np.ndarray:
    """Closed form pi/4 + sum_i (-1)**d_i mu_i (vectorized over a batch axis)."""
    mu = half_angles(n)
    signs = 1.0 - 2.0 * np.asarray(bits, dtype=float)
    return math.pi / 4 + np.tensordot(mu, signs, axes=(0, 0))


def rprime_gates(bits: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Literal gate sequence: per bit a controlled ry(-2 mu_i) then ry(mu_i), then ry(pi/4)."""
    bits = np.asarray(bits)
    shape = bits.shape[1:]
    a0, a1 = np.ones(shape), np.zeros(shape)
    for i, mu in enumerate(half_angles(n)):
        on = bits[i].astype(bool)
        c, s = math.cos(-2 * mu), math.sin(-2 * mu)
        a0, a1 = np.where(on, c * a0 - s * a1, a0), np.where(on, s * a0 + c * a1, a1)
        c, s = math.cos(mu), math.sin(mu)
        a0, a1 = c * a0 - s * a1, s * a0 + c * a1
    c, s = math.cos(math.pi / 4), math.sin(math.pi / 4)
    return c * a0 - s * a1, s * a0 + c * a1


def rprime_amplitudes(bits: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gate-sequence amplitudes, cross-checked against the closed form."""
    a0, a1 = rprime_gates(bits, n)
    theta = rprime_angle(bits, n)
    dev = max(np.max(np.abs(a0 - np.cos(theta))), np.max(np.abs(a1 - np.sin(theta))))
    if dev > GATE_AGREEMENT:
        raise AssertionError(f"R' gate sequence disagrees with closed form by {dev}")
    return a0, a1


def apply_Rprime(d: DirectionWord) -> OutQubit:
    if d.bits.ndim != 1:
        raise ValueError("apply_Rprime takes a single direction word; use rprime_amplitudes for batches")
    a0, a1 = rprime_amplitudes(d.bits, d.n)
    return OutQubit(float(a0), float(a1))


# -- hybrid simulator --------------------------------------------------------

def hybrid_branch(h, n: int, cleanup: bool = False,
                  trace: Optional[OpTrace] = None) -> Tuple[RegisterFile, OutQubit]:
    """Run one basis branch through the pipeline; returns final registers and out qubit."""
    state = init_sqrt_state(h, n)
    prep_sqrt(state, trace)
    dw = directions(state, trace)
    uncompute_garbage(state, trace)
    out = apply_Rprime(dw)
    if cleanup:
        cleanup_directions(state, trace)
    return state, out


def amplitude_encode(h, n: int, cleanup: bool = False) -> Tuple[OutQubit, OpTrace]:
    """Encode h into (sqrt(1-h), sqrt(h)) approximately.

    h is snapped to the nearest point of the grid ``j * 2**-(n-1)``.
    """
    n = check_width(n)
    trace = OpTrace()
    _, out = hybrid_branch(h, n, cleanup, trace)
    return out, trace


@dataclass
class AmplitudeSweep:
    n: int
    h: np.ndarray
    a0: np.ndarray
    a1: np.ndarray

    @property
    def p1(self) -> np.ndarray:
        return self.a1 ** 2

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.p1 - self.h)


def amplitude_sweep(n: int, include_one: bool = False) -> AmplitudeSweep:
    """Hybrid run over every h on the grid (batched)."""
    hr = h_grid_raw(n, include_one)
    state = init_sqrt_batch(hr, n)
    prep_sqrt(state)
    dw = directions(state)
    uncompute_garbage(state)
    a0, a1 = rprime_amplitudes(dw.bits, n)
    return AmplitudeSweep(n, h_value(hr, n), a0, a1)


# -- state-vector simulator ----------------------------------------------------

def register_layout(n: int) -> Dict[str, Tuple[int, int]]:
    """name -> (bit offset, width) inside a basis index; out is the lowest bit."""
    layout = {}
    offset = 0
    for name, width in (("out", 1), ("aux", n), ("y", n), ("x", n), ("d", n - 1), ("t", n)):
        layout[name] = (offset, width)
        offset += width
    return layout


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray
    layout: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    @property
    def num_qubits(self) -> int:
        return 5 * self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def support(self, tol: float = 1e-14) -> np.ndarray:
        return np.flatnonzero(np.abs(self.amplitudes) > tol)

    def register_value(self, index, name: str):
        off, width = self.layout[name]
        return (np.asarray(index) >> off) & ((1 << width) - 1)

    def fidelity(self, other: "StateVector") -> float:
        ov = np.vdot(other.amplitudes, self.amplitudes)
        return float(abs(ov) ** 2 / (self.norm() ** 2 * other.norm() ** 2))

    def to_csv(self, stream=None, tol: float = 0.0) -> str:
        """Rows ``basis_index,real,imag`` for amplitudes above tol."""
        buf = stream if stream is not None else io.StringIO()
        buf.write("basis_index,real,imag\n")
        for k in np.flatnonzero(np.abs(self.amplitudes) > tol):
            a = self.amplitudes[k]
            buf.write(f"{k},{a.real:.17g},{a.imag:.17g}\n")
        return buf.getvalue() if stream is None else ""


def _unpack(classical: np.ndarray, n: int) -> RegisterFile:
    """Registers for each classical index (the basis index without the out bit)."""
    layout = register_layout(n)
    state = RegisterFile.zeros(n, batch=classical.shape[0])
    for name in ("aux", "y", "x", "t"):
        off, width = layout[name]
        getattr(state, name).raw = (classical >> (off - 1)) & mask(width)
    off, _ = layout["d"]
    state.d = [(classical >> (off - 1 + k)) & 1 for k in range(n - 1)]
    return state


def _pack(state: RegisterFile) -> np.ndarray:
    layout = register_layout(state.n)
    out = np.zeros_like(state.x.raw)
    for name in ("aux", "y", "x", "t"):
        off, _ = layout[name]
        out |= getattr(state, name).raw << (off - 1)
    off, _ = layout["d"]
    for k, b in enumerate(state.d):
        out |= np.asarray(b) << (off - 1 + k)
    return out


def apply_classical(sv: StateVector, step, full_space: bool = True) -> None:
    """Apply a reversible register step as a basis permutation.

    With ``full_space`` the permutation is computed on every classical basis
    state and checked to be a bijection; otherwise only on the support.
    """
    n = sv.n
    pairs = sv.amplitudes.reshape(-1, 2)
    if full_space:
        src = np.arange(pairs.shape[0], dtype=np.int64)
    else:
        src = np.unique(sv.support() >> 1).astype(np.int64)
    state = _unpack(src, n)
    step(state)
    dst = _pack(state)
    if full_space:
        if not np.array_equal(np.sort(dst), src):
            raise AssertionError("classical step is not a permutation of the basis")
    elif np.unique(dst).shape[0] != dst.shape[0]:
        raise AssertionError("classical step maps two branches onto one basis state")
    new = np.zeros_like(pairs)
    new[dst] = pairs[src]
    sv.amplitudes = new.reshape(-1)


def apply_out_rotation(sv: StateVector, omega: float, control: Optional[Tuple[str, int]] = None,
                       full_space: bool = True) -> None:
    """ry(omega) on the out qubit, optionally controlled on one bit of a register.

    Without ``full_space`` only rows carrying amplitude are touched; the
    others are zero and stay zero under a rotation of the out qubit.
    """
    pairs = sv.amplitudes.reshape(-1, 2)
    g = ry(omega)
    if full_space:
        rows = np.arange(pairs.shape[0], dtype=np.int64)
    else:
        rows = np.unique(sv.support() >> 1).astype(np.int64)
    if control is not None:
        name, bit = control
        off, _ = sv.layout[name]
        rows = rows[((rows >> (off - 1 + bit)) & 1).astype(bool)]
    pairs[rows] = pairs[rows] @ g.T


def statevector_pipeline(n: int, inputs: Sequence[Tuple[complex, float]], cleanup: bool = True,
                         full_space: Optional[bool] = None) -> StateVector:
    """Prepare sum_k alpha_k |h_k>_t |0...0> and run the whole encoding pipeline."""
    n = check_width(n)
    if n > MAX_STATEVECTOR_N:
        raise CapacityError(f"state vector needs 2**{5 * n} amplitudes; n is limited to {MAX_STATEVECTOR_N}")
    alphas = np.array([a for a, _ in inputs], dtype=complex)
    if abs(np.sum(np.abs(alphas) ** 2) - 1) > 1e-10:
        raise ValueError("input amplitudes are not normalized")
    patterns = [h_raw(h, n) for _, h in inputs]
    if len(set(patterns)) != len(patterns):
        raise ValueError("h values must be distinct on the grid")
    if full_space is None:
        full_space = n <= 4
    layout = register_layout(n)
    sv = StateVector(n, np.zeros(1 << (5 * n), dtype=complex), layout)
    t_off, _ = layout["t"]
    for a, p in zip(alphas, patterns):
        sv.amplitudes[p << t_off] = a

    apply_classical(sv, lambda s: prep_sqrt(s, strict=False), full_space)
    apply_classical(sv, directions, full_space)
    apply_classical(sv, uncompute_garbage, full_space)
    for i, mu in enumerate(half_angles(n)):
        apply_out_rotation(sv, -2 * mu, ("d", i), full_space)
        apply_out_rotation(sv, mu, None, full_space)
    apply_out_rotation(sv, math.pi / 4, None, full_space)
    if cleanup:
        apply_classical(sv, cleanup_directions, full_space)
    if np.all(alphas.imag == 0) and np.max(np.abs(sv.amplitudes.imag)) > 1e-14:
        raise AssertionError("real inputs picked up imaginary amplitudes")
    return sv


def hybrid_target(n: int, inputs: Sequence[Tuple[complex, float]], cleanup: bool = True) -> StateVector:
    """The state the pipeline should produce, assembled branch by branch."""
    layout = register_layout(n)
    sv = StateVector(n, np.zeros(1 << (5 * n), dtype=complex), layout)
    for a, h in inputs:
        state, out = hybrid_branch(h, n, cleanup)
        idx = int(_pack(_as_batch(state))[0])
        sv.amplitudes[2 * idx] += a * out.a0
        sv.amplitudes[2 * idx + 1] += a * out.a1
    return sv


def _as_batch(state: RegisterFile) -> RegisterFile:
    batch = RegisterFile.zeros(state.n, batch=1)
    for name, reg in state.registers.items():
        getattr(batch, name).raw = np.array([reg.raw], dtype=np.int64)
    batch.d = [np.array([b], dtype=np.int64) for b in state.d]
    return batch


def uniform_inputs(n: int, include_one: bool = True) -> List[Tuple[complex, float]]:
    """Equal-weight superposition over every grid h in [0, 1]."""
    hs = h_value(h_grid_raw(n, include_one), n)
    amp = 1 / math.sqrt(len(hs))
    return [(amp, float(h)) for h in hs]


def xcheck(n: int, cleanup: bool = True) -> Tuple[float, StateVector, StateVector]:
    """Fidelity between the state-vector pipeline and the hybrid target."""
    inputs = uniform_inputs(n)
    sv = statevector_pipeline(n, inputs, cleanup)
    target = hybrid_target(n, inputs, cleanup)
    return sv.fidelity(target), sv, target
