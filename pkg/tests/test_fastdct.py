import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from approxdct import fastdct
from approxdct.fastdct import (
    ArithmeticOverflow,
    analyze_bit_growth,
    build_factorization,
    derive_S,
    direct_forward,
    fast_forward,
)
from approxdct.transforms import PROPOSED_KERNEL

T = np.array(PROPOSED_KERNEL, dtype=np.int64)
int16 = st.integers(-(2**15), 2**15 - 1)


def test_factorization_reproduces_every_column():
    y = fast_forward(np.eye(16, dtype=np.int64))
    assert np.array_equal(y, T)


def test_factorization_matrix_product():
    assert np.array_equal(build_factorization().matrix(), T)


def test_counts():
    ft = build_factorization()
    assert ft.addition_count == 72
    _, ops = fast_forward(np.arange(16), return_counts=True)
    assert (ops.additions, ops.multiplications, ops.shifts) == (72, 0, 0)
    _, ops = direct_forward(np.arange(16), return_counts=True)
    assert ops.additions == 208
    assert ops.additions == sum(np.count_nonzero(r) - 1 for r in T)


def test_fast_examples():
    assert fast_forward(np.ones(16, dtype=int)).tolist() == [16] + [0] * 15
    e1 = np.zeros(16, dtype=int)
    e1[0] = 1
    assert fast_forward(e1).tolist() == [1] * 11 + [0, 1, 1, 0, 1]
    assert fast_forward(np.zeros(16, dtype=int)).tolist() == [0] * 16
    e16 = np.zeros(16, dtype=int)
    e16[15] = 1
    assert direct_forward(e16).tolist() == T[:, 15].tolist()


def test_random_batch_matches_direct():
    rng = np.random.default_rng(0)
    xs = rng.integers(-(2**15), 2**15, size=(16, 10_000))
    assert np.array_equal(fast_forward(xs), direct_forward(xs))
    assert np.array_equal(fast_forward(xs), T @ xs)


@settings(max_examples=200)
@given(st.lists(int16, min_size=16, max_size=16))
def test_fast_equals_direct(x):
    x = np.array(x, dtype=np.int64)
    assert np.array_equal(fast_forward(x), direct_forward(x))


def test_every_stage_is_ternary():
    for stage in build_factorization().stages:
        assert np.isin(stage.matrix(), (-1, 0, 1)).all(), stage.label


def test_permutation_stage_has_no_arithmetic():
    perm = build_factorization().stages[-1]
    ops = fastdct._Ops(None)
    perm.apply(list(range(16)), ops)
    assert ops.additions == 0 and ops.negations == 0
    assert sorted(perm.sigma) == list(range(16))


def test_derived_S_structure():
    s = derive_S()
    assert s.shape == (8, 8)
    assert (np.count_nonzero(s, axis=1) == 1).all()
    assert np.isin(s, (-1, 0, 1)).all()
    prime = np.array(fastdct.M_FACTOR) @ fastdct.KroneckerButterfly(4).matrix()
    assert np.array_equal(prime + s, np.array(fastdct.O_BLOCK))


def test_derived_S_differs_from_printed_only_by_extra_row():
    # the printed S has nine rows; dropping its duplicated second row
    # leaves exactly the derived matrix
    printed = np.array([
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, -1, 0, 0, 0],
    ])
    assert np.array_equal(np.delete(printed, 1, axis=0), derive_S())


def test_inconsistent_S_detected(monkeypatch):
    o = np.array(fastdct.O_BLOCK)
    o[0, 2] = -1
    monkeypatch.setattr(fastdct, "O_BLOCK", tuple(map(tuple, o)))
    with pytest.raises(fastdct.FactorizationInconsistent):
        derive_S()


def test_odd_block_costs():
    odd = build_factorization().stages[3].blocks[3]
    ops = fastdct._Ops(None)
    y = odd.main[0].apply(list(range(8)), ops)
    assert ops.additions == 8
    odd.main[1].apply(y, ops)
    assert ops.additions == 8 + 16
    ops = fastdct._Ops(None)
    odd.apply(list(range(8)), ops)
    assert ops.additions == 8 + 16 + 8
    cols = [odd.apply(list(e), fastdct._Ops(None)) for e in np.eye(8, dtype=np.int64)]
    assert np.array_equal(np.array(cols).T, np.array(fastdct.O_BLOCK))


def test_overflow_detected():
    x = np.full(16, 2**27, dtype=np.int64)
    with pytest.raises(ArithmeticOverflow):
        fast_forward(x, acc_bits=32)
    assert fast_forward(x, acc_bits=None)[0] == 2**31


def test_no_overflow_for_16_bit_inputs():
    x = np.full(16, -(2**15), dtype=np.int64)
    assert fast_forward(x, acc_bits=32)[0] == -(2**19)


def test_signed_bits():
    assert fastdct.signed_bits(0, 4080) == 13
    assert fastdct.signed_bits(-4096, 4095) == 13
    assert fastdct.signed_bits(-4097, 0) == 14
    assert fastdct.signed_bits(0, 0) == 1


def _lp_extremes(coeffs, lo, hi):
    """Independent oracle: optimise each row over the input box by LP."""
    bounds = [(lo, hi)] * coeffs.shape[1]
    mx = max(-linprog(-row, bounds=bounds).fun for row in coeffs)
    mn = min(linprog(row, bounds=bounds).fun for row in coeffs)
    return round(mn), round(mx)


@pytest.mark.parametrize("width,signed", [(4, False), (8, False), (8, True), (12, True)])
def test_bit_growth_matches_lp_oracle(width, signed):
    rep = analyze_bit_growth(width, signed=signed)
    lo, hi = rep.input_range
    for (label, m), bound in zip(build_factorization().signals(), rep.stages):
        assert bound.label == label
        assert _lp_extremes(m, lo, hi) == (bound.min_value, bound.max_value)


def test_bit_growth_w8_unsigned():
    rep = analyze_bit_growth(8)
    assert rep.input_range == (0, 255)
    assert rep.output_1d.max_magnitude == 4080 == 16 * 255
    assert rep.output_1d.bits == 13
    w = np.array(rep.output_1d.witness)
    assert np.abs(T @ w).max() == 4080
    assert rep.output_2d.max_magnitude == 256 * 255
    w2 = np.array(rep.output_2d.witness).reshape(16, 16)
    assert np.abs(T @ w2 @ T.T).max() == 256 * 255


def test_bit_growth_w4_width():
    assert analyze_bit_growth(4).output_1d.bits == 4 + 4 + 1


def test_bit_growth_witnesses_attain_bounds():
    rep = analyze_bit_growth(8, signed=True)
    for (label, m), bound in zip(build_factorization().signals(), rep.stages):
        lo, hi = rep.input_range
        w = np.array(bound.witness)
        assert ((lo <= w) & (w <= hi)).all()
        assert np.abs(m @ w).max() == bound.max_magnitude, label


def test_bit_growth_never_exceeded_on_random_inputs():
    rep = analyze_bit_growth(8)
    rng = np.random.default_rng(1)
    xs = rng.integers(0, 256, size=(16, 100_000))
    for (label, values), bound in zip(fastdct.trace_forward(xs), rep.stages):
        assert label == bound.label
        assert bound.min_value <= values.min() and values.max() <= bound.max_value


def test_zero_input_stays_zero():
    for _, values in fastdct.trace_forward(np.zeros(16, dtype=np.int64)):
        assert not np.any(values)


def test_unusual_width_warns():
    with pytest.warns(UserWarning):
        analyze_bit_growth(10)
