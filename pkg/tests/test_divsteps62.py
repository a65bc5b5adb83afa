import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from safegcd import refmath
from safegcd._verify import VerifyError
from safegcd.divsteps62 import (
    BATCH,
    DEBRUIJN64_TABLE,
    Trans2x2,
    ctz64,
    ctz64_naive,
    det_check_pow2,
    divsteps_62_var,
    inv_mod16,
    inv_neg_mod64,
    matrix_bounds_ok,
)
from safegcd.wide64 import M64, i64

words = st.integers(0, M64)
odd_words = words.map(lambda x: x | 1)
etas = st.integers(-745, 745)


def reference(eta, f0, g0, n=BATCH):
    return refmath.step_n(refmath.DivstepState.from_eta(eta, f0, g0), n)


def test_debruijn_table_is_permutation():
    assert sorted(DEBRUIJN64_TABLE) == list(range(64))


@pytest.mark.parametrize("k", range(64))
def test_ctz_single_bits(k):
    assert ctz64(1 << k) == k
    assert ctz64(M64 << k & M64) == k


def test_ctz_random_words():
    rng = random.Random(21)
    for _ in range(200_000):
        x = rng.getrandbits(64) >> rng.randrange(64) << rng.randrange(64) & M64
        if x:
            assert ctz64(x) == ctz64_naive(x)


@pytest.mark.slow
def test_ctz_million_random_words():
    rng = random.Random(24)
    for _ in range(10**6):
        x = rng.getrandbits(64)
        if x:
            assert ctz64(x) == ctz64_naive(x)


def test_ctz_zero_rejected():
    with pytest.raises(ValueError):
        ctz64(0)
    with pytest.raises(ValueError):
        ctz64_naive(0)


def test_small_inverse_formulas_exhaustive():
    for f in range(1, 1 << 10, 2):
        assert f * inv_neg_mod64(f) % 64 == 63
        assert f * inv_mod16(f) % 16 == 1
    for bad in (0, 2, 64):
        with pytest.raises(ValueError):
            inv_neg_mod64(bad)
        with pytest.raises(ValueError):
            inv_mod16(bad)


@given(odd_words)
def test_small_inverse_formulas_full_words(f):
    assert f * inv_neg_mod64(f) % 64 == 63
    assert f * inv_mod16(f) % 16 == 1


def test_batch_with_zero_g():
    # g = 0: every step halves g, so eta drops by 62 and only u grows
    eta, t = divsteps_62_var(-1, 1, 0)
    assert eta == -63
    assert t == Trans2x2(1 << 62, 0, 0, 1)


def test_det_check_pow2():
    assert det_check_pow2(Trans2x2(1 << 62, 0, 0, 1), 62)
    assert det_check_pow2(Trans2x2(1, 0, 0, 1), 0)
    assert not det_check_pow2(Trans2x2(0, 1 << 62, 1, 0), 62)  # det = -2^62
    assert not det_check_pow2(Trans2x2(2, 0, 0, 1), 62)


def test_matrix_bounds():
    assert matrix_bounds_ok(Trans2x2(1 << 62, 0, 0, 1))
    assert not matrix_bounds_ok(Trans2x2(1 << 62, 1, 0, 1))
    assert not matrix_bounds_ok(Trans2x2(-(1 << 61), -(1 << 61), 0, 1))


@given(etas, odd_words, words)
def test_batch_matches_exact_model(eta, f0, g0):
    s, T = reference(eta, f0, g0)
    eta_out, t = divsteps_62_var(eta, f0, g0)
    assert eta_out == s.eta
    assert (t.u, t.v, t.q, t.r) == (T.u, T.v, T.q, T.r)
    assert det_check_pow2(t, BATCH)
    assert matrix_bounds_ok(t)
    # the matrix maps the starting words to 2^62 times the final ones
    assert (t.u * f0 + t.v * g0) % 2**64 == (s.f << 62) % 2**64
    assert (t.q * f0 + t.r * g0) % 2**64 == (s.g << 62) % 2**64


def test_batch_matches_exact_model_seeded():
    rng = random.Random(22)
    for _ in range(3000):
        eta = rng.randint(-745, 745)
        f0, g0 = rng.getrandbits(64) | 1, rng.getrandbits(64)
        s, T = reference(eta, f0, g0)
        eta_out, t = divsteps_62_var(eta, f0, g0, verify=abs(eta) <= 683)
        assert (eta_out, t.u, t.v, t.q, t.r) == (s.eta, T.u, T.v, T.q, T.r)


@given(st.integers(-683, 683), odd_words, words)
def test_verify_mode_agrees(eta, f0, g0):
    assert divsteps_62_var(eta, f0, g0, verify=True) == divsteps_62_var(eta, f0, g0)


def test_verify_rejects_even_f():
    with pytest.raises(VerifyError):
        divsteps_62_var(-1, 2, 3, verify=True)


def test_verify_eta_bound_fires_outside_window():
    # 40 halvings from eta = -745 leave eta = -785 with steps still to go
    with pytest.raises(VerifyError):
        divsteps_62_var(-745, 1, 1 << 40, verify=True)
    # the same batch without verify still matches the exact model
    s, _ = reference(-745, 1, 1 << 40)
    assert divsteps_62_var(-745, 1, 1 << 40)[0] == s.eta


def test_faulty_ctz_detected():
    table = list(DEBRUIJN64_TABLE)
    a, b = table.index(1), table.index(2)
    table[a], table[b] = 2, 1
    rng = random.Random(23)
    differs = 0
    for _ in range(200):
        f0, g0 = rng.getrandbits(64) | 1, rng.getrandbits(64)
        try:
            out = divsteps_62_var(-1, f0, g0, ctz=lambda x: ctz64(x, table))
        except ValueError:
            differs += 1
            continue
        differs += out != divsteps_62_var(-1, f0, g0)
    assert differs > 0


@given(etas, odd_words, words)
def test_trace_invariants(eta, f0, g0):
    trace = []
    eta_out, t = divsteps_62_var(eta, f0, g0, trace=trace)
    assert trace[0].i == BATCH and trace[0].j == 0 and trace[0].eta == eta
    prev_i = BATCH
    for step in trace:
        i, j = step.i, step.j
        assert 0 < i <= prev_i
        prev_i = i
        # row relations hold for the working words at every loop head
        assert (step.u * f0 + step.v * g0) & M64 == (step.f << (BATCH - i)) & M64
        assert (step.q * f0 + step.r * g0) & M64 == (step.g << (BATCH - i)) & M64
        # the exact model is j steps ahead: the pending halvings of g
        n = BATCH - i + j
        s, T = reference(eta, f0, g0, n)
        assert T.u == i64(step.u) << j and T.v == i64(step.v) << j
        assert (T.q, T.r) == (i64(step.q), i64(step.r))
        assert step.eta == s.eta + j
        assert (step.f - s.f) % 2 ** (64 - n) == 0
        assert (step.g - (s.g << j)) % 2 ** (64 - n + j) == 0
        if step.mask is not None:
            assert 0 < step.limit <= BATCH
            assert step.mask == (1 << step.mask.bit_length()) - 1
            assert step.w == step.w & step.mask
