import itertools

import numpy as np
import pytest

from qcordic.fixedpoint import FixedPointOverflow, WidthMismatchError, encode, mask, ulp
from qcordic.revops import (
    OpTrace,
    Register,
    RegisterFile,
    add_shifted_into,
    cnegate_register,
    cnot_register,
    compute_direction,
    cswap,
    direction_bit,
    sub_shifted_into,
)


def reg(name, v, n=8):
    return Register(name, n, encode(v, n).raw)


def test_add_shifted_examples():
    dst, src = reg("a", 0.5), reg("b", 1.0)
    add_shifted_into(dst, src, 1)
    assert dst.value == 1.0 and src.value == 1.0
    dst, src = reg("a", 0.0), reg("b", -1.0)
    add_shifted_into(dst, src, 2)
    assert dst.value == -0.25


def test_add_sub_pair_restores():
    dst, src = reg("a", 0.3), reg("b", -1.7)
    before = dst.raw
    add_shifted_into(dst, src, 3)
    sub_shifted_into(dst, src, 3)
    assert dst.raw == before


def test_aliasing_and_width_errors():
    r = reg("a", 0.5)
    with pytest.raises(ValueError):
        add_shifted_into(r, r, 1)
    with pytest.raises(ValueError):
        sub_shifted_into(r, r, 0)
    with pytest.raises(WidthMismatchError):
        add_shifted_into(r, reg("b", 0.5, 9), 1)


def test_checked_add_reports_overflow():
    dst, src = reg("a", 1.5), reg("b", 1.0)
    with pytest.raises(FixedPointOverflow):
        add_shifted_into(dst, src, 0, check=True)


def test_cswap_examples():
    a, b = reg("x", 0.25), reg("y", -0.75)
    cswap(a, b, 0)
    assert (a.value, b.value) == (0.25, -0.75)
    cswap(a, b, 1)
    assert (a.value, b.value) == (-0.75, 0.25)
    cswap(a, b, 1)
    assert (a.value, b.value) == (0.25, -0.75)


def test_cnot_register_examples():
    r = reg("ang", 0.0)
    cnot_register(r, 1)
    assert r.value == -ulp(8)
    cnot_register(r, 0)
    assert r.value == -ulp(8)
    cnot_register(r, 1)
    assert r.raw == 0


def test_cnegate_register():
    r = reg("ang", 0.375)
    cnegate_register(r, 1)
    assert r.value == -0.375
    cnegate_register(r, 1)
    assert r.value == 0.375


def test_direction_formula_cases():
    # s(x)=0: d follows s(t-y)
    assert direction_bit(0, 0, 0) == 0
    assert direction_bit(0, 1, 0) == 0
    assert direction_bit(0, 0, 1) == 1
    assert direction_bit(0, 1, 1) == 1
    # s(x)=1: d = not s(y), whatever t is
    for st in (0, 1):
        assert direction_bit(1, 0, st) == 1
        assert direction_bit(1, 1, st) == 0


def test_compute_direction_touches_only_d():
    n = 8
    x, y, t = reg("x", 0.5), reg("y", 0.75), reg("t", 0.25)
    d = [0] * (n - 1)
    tr = OpTrace()
    compute_direction(x, y, t, d, 3, tr)
    assert (x.value, y.value, t.value) == (0.5, 0.75, 0.25)
    assert d == [0, 0, 1, 0, 0, 0, 0]
    assert tr.additions == 2
    compute_direction(x, y, t, d, 3, tr)
    assert d == [0] * (n - 1)
    assert tr.additions == 4


def test_trace_counts_match_for_inverse_pairs():
    a, b = reg("a", 0.5), reg("b", 0.25)
    f, g = OpTrace(), OpTrace()
    add_shifted_into(a, b, 2, f)
    sub_shifted_into(a, b, 2, g)
    assert f.counts() == g.counts()
    assert f.csv_header() == "n,additions,swaps,controlled_nots"
    assert f.csv_row(8) == "8,1,0,0"


def _all_pairs(n):
    vals = np.arange(1 << n, dtype=np.int64)
    a, b = np.meshgrid(vals, vals, indexing="ij")
    return a.ravel(), b.ravel()


def _inverse_pairs():
    """(forward, inverse) closures over two registers and a control bit."""
    yield lambda d, s, c, m: add_shifted_into(d, s, m), lambda d, s, c, m: sub_shifted_into(d, s, m)
    yield lambda d, s, c, m: sub_shifted_into(d, s, m), lambda d, s, c, m: add_shifted_into(d, s, m)
    yield lambda d, s, c, m: cswap(d, s, c), lambda d, s, c, m: cswap(d, s, c)
    yield lambda d, s, c, m: cnot_register(d, c), lambda d, s, c, m: cnot_register(d, c)
    yield lambda d, s, c, m: cnegate_register(d, c), lambda d, s, c, m: cnegate_register(d, c)


def test_inverse_pairs_exhaustive_n4():
    n = 4
    a, b = _all_pairs(n)
    for fwd, inv in _inverse_pairs():
        for c, m in itertools.product((0, 1), range(0, n + 2)):
            ctrl = np.full(a.shape, c, dtype=np.int64)
            d, s = Register("d", n, a.copy()), Register("s", n, b.copy())
            fwd(d, s, ctrl, m)
            inv(d, s, ctrl, m)
            assert np.array_equal(d.raw, a) and np.array_equal(s.raw, b)


def test_compute_direction_exhaustive_n4():
    n = 4
    vals = np.arange(1 << n, dtype=np.int64)
    x, y, t = (g.ravel() for g in np.meshgrid(vals, vals, vals, indexing="ij"))
    X, Y, T = Register("x", n, x.copy()), Register("y", n, y.copy()), Register("t", n, t.copy())
    d = [np.zeros_like(x) for _ in range(n - 1)]
    compute_direction(X, Y, T, d, 2)
    assert np.array_equal(X.raw, x) and np.array_equal(Y.raw, y) and np.array_equal(T.raw, t)
    assert not d[0].any() and not d[2].any()
    compute_direction(X, Y, T, d, 2)
    assert not d[1].any()


@pytest.mark.parametrize("n", [8, 16, 32])
def test_inverse_pairs_randomized(n):
    rng = np.random.default_rng(n)
    a = rng.integers(0, 1 << n, size=4000, dtype=np.int64)
    b = rng.integers(0, 1 << n, size=4000, dtype=np.int64)
    c = rng.integers(0, 2, size=4000, dtype=np.int64)
    for fwd, inv in _inverse_pairs():
        for m in (0, 1, n // 2, n - 1, n + 5):
            d, s = Register("d", n, a.copy()), Register("s", n, b.copy())
            fwd(d, s, c, m)
            inv(d, s, c, m)
            assert np.array_equal(d.raw, a) and np.array_equal(s.raw, b)


def test_register_file_layout():
    f = RegisterFile.zeros(10)
    assert f.bit_count == 5 * 10 - 1
    assert len(f.d) == 9
    g = f.copy()
    g.x.raw = 5
    assert f.x.raw == 0
    b = RegisterFile.zeros(6, batch=3)
    assert b.is_batch and b.d_bits().shape == (5, 3)
    with pytest.raises(ValueError):
        RegisterFile.zeros(63, batch=2)


def test_wrapping_stays_in_width():
    n = 8
    d, s = Register("d", n, mask(n)), Register("s", n, mask(n))
    add_shifted_into(d, s, 0)
    assert 0 <= d.raw <= mask(n)
