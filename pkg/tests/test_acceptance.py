"""Acceptance suite: one test per criterion, tolerances pinned as specified.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion with the measured numbers.
"""

import math
import time
from fractions import Fraction

import numpy as np

from qcordic.ampenc import amplitude_sweep, register_layout, statevector_pipeline, uniform_inputs, hybrid_target
from qcordic.cli import trace_directions
from qcordic.cordic import (
    arcsin_batch,
    cleanup_directions,
    decode_angle,
    directions,
    h_grid_raw,
    init_batch,
    init_sqrt_batch,
    init_state,
    iterate,
    prep_sqrt,
    uncompute_garbage,
)
from qcordic.fixedpoint import FixWord, decode_exact, encode, grid_raw
from qcordic.revops import OpTrace, Register
from qcordic.scaler import PHI, div_in_place, mult_in_place, plan

from oracles import div_replay, fib_table, geometric, mult_replay


def test_criterion_1_reversibility(criterion):
    start = time.perf_counter()
    checked = 0
    for n in (4, 6, 8):
        # plain arcsine input
        s = init_batch(grid_raw(n), n)
        before = s.snapshot()
        directions(s)
        uncompute_garbage(s)
        cleanup_directions(s, prepped=False)
        assert s.snapshot() == before, f"t-variant not restored at n={n}"
        # square-root input, h in [0, 1]
        s = init_sqrt_batch(h_grid_raw(n, include_one=True), n)
        before = s.snapshot()
        prep_sqrt(s)
        directions(s)
        uncompute_garbage(s)
        cleanup_directions(s)
        assert s.snapshot() == before, f"h-variant not restored at n={n}"
        checked += grid_raw(n).shape[0] + (1 << (n - 1)) + 1
    n = 8
    v = np.arange(1 << n, dtype=np.int64)
    a, b = (g.ravel() for g in np.meshgrid(v, v, indexing="ij"))
    for m in (1, 2, 3):
        inp, aux = Register("in", n, a.copy()), Register("aux", n, b.copy())
        mult_in_place(inp, aux, m)
        div_in_place(inp, aux, m)
        assert np.array_equal(inp.raw, a) and np.array_equal(aux.raw, b), f"mult/div m={m}"
        div_in_place(inp, aux, m)
        mult_in_place(inp, aux, m)
        assert np.array_equal(inp.raw, a) and np.array_equal(aux.raw, b), f"div/mult m={m}"
    elapsed = time.perf_counter() - start
    criterion(f"{checked} pipeline inputs + 3x65536 scaler states bit-exact, {elapsed:.1f}s")
    assert elapsed < 120


def test_criterion_2_accuracy_decay(criterion):
    start = time.perf_counter()
    maxerr = {}
    for n in (6, 10, 16):
        raws = grid_raw(n)
        t = decode_angle(raws, n)
        err = np.abs(decode_angle(arcsin_batch(raws, n), n) - np.arcsin(t))
        maxerr[n] = float(err.max())
    elapsed = time.perf_counter() - start
    ratios = {n: maxerr[n] / 2.0 ** (-n + 5) for n in maxerr}
    monotone = maxerr[16] < maxerr[10] < maxerr[6]
    over = [n for n in maxerr if ratios[n] > 1]
    criterion("maxerr " + ", ".join(f"n={n}: {maxerr[n]:.3g} ({ratios[n]:.2f}x 2^(-n+5))" for n in maxerr)
              + f"; monotone={monotone}; {elapsed:.1f}s")
    assert monotone
    assert elapsed < 60
    assert not over, f"maxerr exceeds 2^(-n+5) at n={over}: {ratios}"


def test_criterion_3_addition_budget(criterion):
    report = []
    for n in (8, 16, 32):
        tr = trace_directions(n)
        assert tr.additions < 14 * n, f"n={n}: {tr.additions} >= {14 * n}"
        s = init_state(-0.7, n)
        for i in range(1, n):
            step = OpTrace()
            iterate(s, i, step)
            assert step.additions - step.mult_additions == 6, f"n={n} i={i}"
            assert step.mults == 3, f"n={n} i={i}"
        report.append(f"n={n}: {tr.additions}<{14 * n}")
    criterion("; ".join(report) + "; 6 additions + 3 Mult per iteration")


def test_criterion_4_scaler_bounds(criterion):
    n = 24
    u = Fraction(1, 1 << (n - 2))
    worst = {}
    for m in (2, 4, 6):
        p = plan(m, n)
        trunc = (p.iters + 2) * u
        mult_bound = trunc + Fraction(2) ** (-m * p.fib[p.iters] + 1)
        aux_bound = 2.0 ** (-PHI ** (p.iters - 1) * m + 2) + float(trunc)
        rng = np.random.default_rng(1000 + m)
        z_raw = np.array([encode(float(z), n).raw for z in rng.uniform(-1.5, 1.5, 1000)], dtype=np.int64)

        inp, aux = Register("in", n, z_raw.copy()), Register("aux", n, np.zeros_like(z_raw))
        mult_in_place(inp, aux, m)
        dv, dv_aux = Register("in", n, z_raw.copy()), Register("aux", n, np.zeros_like(z_raw))
        div_in_place(dv, dv_aux, m)

        w_mult = w_aux = 0.0
        for k in range(z_raw.shape[0]):
            z = decode_exact(FixWord(int(z_raw[k]), n))
            got = decode_exact(FixWord(int(inp.raw[k]), n))
            e = abs(got - (1 + Fraction(1, 2 ** m)) * z)
            assert e <= mult_bound, f"m={m} z={z}"
            assert abs(got - mult_replay(z, m, p.iters)[0]) <= trunc
            residual = abs(float(decode_exact(FixWord(int(dv_aux.raw[k]), n))))
            assert residual <= aux_bound, f"m={m} z={z} aux={residual}"
            assert abs(decode_exact(FixWord(int(dv.raw[k]), n)) - div_replay(z, m, p.iters)[0]) <= trunc
            w_mult = max(w_mult, float(e / mult_bound))
            w_aux = max(w_aux, residual / aux_bound)
        worst[m] = (w_mult, w_aux)

    f = fib_table(14)
    for m in (1, 2, 3):
        r = Fraction(-1, 2 ** m)
        for z in (Fraction(1), Fraction(-5, 7), Fraction(11, 8)):
            _, _, states = div_replay(z, m, 11)
            for i in range(0, 11, 2):
                assert states[i] == (z * geometric(r, f[i + 1]), z * geometric(r, f[i])), f"m={m} i={i}"
    criterion("worst used fraction of bound (mult, aux): "
              + ", ".join(f"m={m}: ({a:.2f}, {b:.2f})" for m, (a, b) in worst.items())
              + "; register expressions exact for i<=10")


def test_criterion_5_amplitude_encoding(criterion):
    start = time.perf_counter()
    errs = {}
    for n in (8, 10, 12):
        sw = amplitude_sweep(n)
        assert sw.h.shape[0] == 2 ** (n - 1)
        errs[n] = float(sw.abs_err.max())
    elapsed = time.perf_counter() - start
    criterion(", ".join(f"n={n}: max|a1^2-h|={e:.3g} (bound {2.0 ** (-n + 6):.3g})" for n, e in errs.items())
              + f"; {elapsed:.1f}s")
    assert errs[12] <= 2.0 ** -6
    for n, e in errs.items():
        assert e <= 2.0 ** (-n + 6), f"n={n}"
    assert errs[8] > errs[10] > errs[12]
    assert elapsed < 60


def test_criterion_6_simulator_equivalence(criterion):
    n = 4
    inputs = uniform_inputs(n)
    sv = statevector_pipeline(n, inputs, cleanup=True)
    target = hybrid_target(n, inputs, cleanup=True)
    fid = sv.fidelity(target)
    norm_dev = abs(sv.norm() - 1)
    lay = register_layout(n)
    support = sv.support(1e-14)
    t_seen = set()
    for idx in support.tolist():
        for name in ("x", "y", "aux", "d"):
            assert sv.register_value(idx, name) == 0, f"{name} not clean at basis {idx}"
        t_seen.add(int(sv.register_value(idx, "t")))
    assert t_seen == set(h_grid_raw(n, include_one=True).tolist())
    criterion(f"fidelity={fid:.16f}, |norm-1|={norm_dev:.1e}, {len(t_seen)} branches clean, "
              f"{sum(w for _, w in lay.values())} qubits")
    assert fid >= 1 - 1e-12
    assert norm_dev <= 1e-10


def test_criterion_7_footprint(criterion):
    report = []
    for n in (4, 8, 16, 32):
        tr = trace_directions(n)
        assert tr.bits_total == 5 * n - 1, f"n={n}: {tr.touched}"
        assert set(tr.touched) == {"x", "y", "t", "aux", "d"}
        report.append(f"n={n}: {tr.bits_total}")
    criterion("bits touched " + ", ".join(report))
