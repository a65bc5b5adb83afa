import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from safegcd.oracles import SECP256K1_P, egcd
from safegcd.refmath import (
    DivstepState,
    TransMatrix,
    count_divsteps,
    divstep,
    flip_convention,
    gcd_safegcd,
    inv_pow2,
    modinv_ref,
    step_matrix,
    step_n,
)


def literal_divstep(delta, f, g):
    # the three-branch update written out as plainly as possible
    assert f & 1
    if delta > 0 and g & 1:
        delta, f, g = 1 - delta, g, (g - f) // 2
    elif g & 1:
        delta, f, g = 1 + delta, f, (g + f) // 2
    else:
        delta, f, g = 1 + delta, f, (g) // 2
    return delta, f, g


def test_divstep_examples():
    assert divstep(DivstepState(1, 1, 0)) == DivstepState(2, 1, 0)
    assert divstep(DivstepState(1, 1, 1)) == DivstepState(0, 1, 0)
    assert divstep(DivstepState(0, 3, 1)) == DivstepState(1, 3, 2)
    assert literal_divstep(0, 3, 1) == (1, 3, 2)


def test_divstep_rejects_even_f():
    with pytest.raises(ValueError):
        divstep(DivstepState(1, 4, 1))
    with pytest.raises(ValueError):
        step_matrix(DivstepState(1, 4, 1))


def test_eta_view():
    s = DivstepState.from_eta(-1, 7, 3)
    assert s.delta == 1 and s.eta == -1
    assert flip_convention(flip_convention(5)) == 5


odd = st.integers(-(2**64), 2**64).map(lambda x: x | 1)
anyint = st.integers(-(2**64), 2**64)
small_delta = st.integers(-800, 800)


@given(small_delta, odd, anyint)
def test_divstep_agrees_with_literal_and_keeps_f_odd(delta, f, g):
    s = divstep(DivstepState(delta, f, g))
    assert (s.delta, s.f, s.g) == literal_divstep(delta, f, g)
    assert s.f & 1


@given(small_delta, odd, anyint)
def test_divstep_preserves_gcd(delta, f, g):
    s = divstep(DivstepState(delta, f, g))
    assert egcd(f, g).g == egcd(s.f, s.g).g


@given(small_delta, odd)
def test_g_zero_is_a_fixed_point(delta, f):
    s = divstep(DivstepState(delta, f, 0))
    assert (s.delta, s.f, s.g) == (delta + 1, f, 0)


@pytest.mark.parametrize("delta,g,want", [
    (1, 2, TransMatrix(2, 0, 0, 1)),
    (1, 3, TransMatrix(0, 2, -1, 1)),
    (0, 3, TransMatrix(2, 0, 1, 1)),
    (-4, 5, TransMatrix(2, 0, 1, 1)),
])
def test_step_matrix_branches(delta, g, want):
    s = DivstepState(delta, 7, g)
    t = step_matrix(s)
    assert t == want
    assert t.det == 2
    nxt = divstep(s)
    assert t.apply(s.f, s.g) == (2 * nxt.f, 2 * nxt.g)


def test_step_n_examples():
    s = DivstepState(3, 11, 6)
    assert step_n(s, 0) == (s, TransMatrix.identity())
    end, T = step_n(DivstepState(1, 1, 0), 62)
    assert (end.f, end.g, end.delta) == (1, 0, 63)
    assert T == TransMatrix(2**62, 0, 0, 1)


def test_step_n_equals_product_of_step_matrices():
    rng = random.Random(3)
    for _ in range(200):
        s = DivstepState(rng.randint(-20, 20), rng.getrandbits(64) | 1, rng.getrandbits(64))
        n = rng.randint(0, 80)
        T = TransMatrix.identity()
        cur = s
        for _ in range(n):
            T = step_matrix(cur) @ T
            cur = divstep(cur)
        assert step_n(s, n) == (cur, T)


def test_step_n_matrix_relation_random():
    rng = random.Random(4)
    for _ in range(300):
        n = rng.randint(0, 744)
        f, g = rng.getrandbits(256) | 1, rng.getrandbits(256) - 2**255
        end, T = step_n(DivstepState(1, f, g), n)
        assert T.apply(f, g) == (end.f << n, end.g << n)
        assert T.det == 2**n


def test_gcd_safegcd_examples():
    assert gcd_safegcd(1, 0) == 1
    assert gcd_safegcd(9, 6) == math.gcd(9, 6) == 3
    rng = random.Random(5)
    for _ in range(5):
        assert gcd_safegcd(SECP256K1_P, rng.randrange(1, SECP256K1_P), 724) == 1


def test_gcd_safegcd_matches_euclid():
    rng = random.Random(6)
    for _ in range(200):
        f, g = rng.getrandbits(64) | 1, rng.getrandbits(64)
        assert gcd_safegcd(f, g) == math.gcd(f, g)


def test_gcd_safegcd_reports_short_budget():
    with pytest.raises(ArithmeticError):
        gcd_safegcd(SECP256K1_P, SECP256K1_P - 2, max_steps=10)


def test_count_divsteps():
    assert count_divsteps(7, 0) == 0
    assert count_divsteps(1, 1) == 1
    assert count_divsteps(SECP256K1_P, 12345, max_steps=3) == -1


def test_inv_pow2():
    for m in (3, 7, 255, SECP256K1_P):
        for n in (0, 1, 62, 744):
            assert inv_pow2(n, m) * pow(2, n, m) % m == 1


def test_modinv_ref_examples():
    assert modinv_ref(1, 7) == 1
    assert modinv_ref(1, SECP256K1_P) == 1
    assert modinv_ref(0, 7) == 0
    assert modinv_ref(3, 7) == 5


def test_modinv_ref_random():
    rng = random.Random(8)
    for _ in range(300):
        m = rng.getrandbits(256) | 1
        if m < 3:
            continue
        x = rng.randrange(m)
        if egcd(x, m).g != 1:
            continue
        assert modinv_ref(x, m) * x % m == 1


def test_modinv_ref_errors():
    with pytest.raises(ZeroDivisionError):
        modinv_ref(3, 9)
    with pytest.raises(ValueError):
        modinv_ref(3, 8)
    with pytest.raises(ValueError):
        modinv_ref(7, 7)
