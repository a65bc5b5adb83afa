"""Variable-time modular inverse over signed62 limbs.

The driver keeps (d, e, f, g) with f = modulus and g = x initially, applies
one 62-divstep transition matrix per outer iteration, and shrinks the working
length of f and g as their magnitude drops.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from safegcd._verify import verify_check
from safegcd.divsteps62 import (
    ETA_BOUND,
    BatchStep,
    Trans2x2,
    divsteps_62_var,
    matrix_bounds_ok,
)
from safegcd.signed62 import (
    LIMBS,
    ModInfo,
    Signed62,
    assign,
    encode,
    is_canonical,
    mul_cmp_62,
)
from safegcd.wide64 import INT64_MAX, INT64_MIN, M62, M64, check_i128, i64, mul_i128

MAX_OUTER_ITERATIONS = 12  # 12 * 62 = 744 divsteps

SIGNED62_ONE = encode(1)


def _store_i64(x: int, verify: bool, what: str) -> int:
    if verify:
        verify_check(INT64_MIN <= x <= INT64_MAX, f"{what} does not fit in int64")
    return i64(x)


def update_fg_62_var(
    length: int, f: Signed62, g: Signed62, t: Trans2x2, verify: bool = False
) -> Tuple[Signed62, Signed62]:
    """(f, g) <- t (f, g) / 2^62 over the first ``length`` limbs, in place."""
    u, v, q, r = t.u, t.v, t.q, t.r
    fi, gi = f.v[0], g.v[0]
    cf = check_i128(mul_i128(u, fi) + mul_i128(v, gi), verify)
    cg = check_i128(mul_i128(q, fi) + mul_i128(r, gi), verify)
    if verify:
        verify_check(cf & M62 == 0, "f update: bottom 62 bits not zero")
        verify_check(cg & M62 == 0, "g update: bottom 62 bits not zero")
    cf >>= 62
    cg >>= 62
    for i in range(1, length):
        fi, gi = f.v[i], g.v[i]
        cf = check_i128(cf + mul_i128(u, fi) + mul_i128(v, gi), verify)
        cg = check_i128(cg + mul_i128(q, fi) + mul_i128(r, gi), verify)
        f.v[i - 1] = cf & M62
        g.v[i - 1] = cg & M62
        cf >>= 62
        cg >>= 62
    f.v[length - 1] = _store_i64(cf, verify, "top limb of f")
    g.v[length - 1] = _store_i64(cg, verify, "top limb of g")
    return f, g


def _check_de_range(x: Signed62, mi: ModInfo, name: str) -> None:
    verify_check(mul_cmp_62(x, LIMBS, mi.modulus, -2) > 0, f"{name} > -2*modulus")
    verify_check(mul_cmp_62(x, LIMBS, mi.modulus, 1) < 0, f"{name} < modulus")


def update_de_62(
    d: Signed62, e: Signed62, t: Trans2x2, mi: ModInfo, verify: bool = False
) -> Tuple[Signed62, Signed62]:
    """(d, e) <- t (d, e) / 2^62 mod modulus, in place; keeps both in (-2m, m).

    The division by 2^62 is made exact by first adding a multiple of the
    modulus chosen with ``modulus_inv62`` to clear the bottom 62 bits.
    """
    u, v, q, r = t.u, t.v, t.q, t.r
    m = mi.modulus.v
    if verify:
        _check_de_range(d, mi, "d")
        _check_de_range(e, mi, "e")
        verify_check(matrix_bounds_ok(t), "transition matrix bounds")
    # add u*m (resp. q*m) when d < 0, v*m (resp. r*m) when e < 0
    sd = d.v[4] >> 63
    se = e.v[4] >> 63
    md = (u & sd) + (v & se)
    me = (q & sd) + (r & se)
    d0, e0 = d.v[0], e.v[0]
    cd = check_i128(mul_i128(u, d0) + mul_i128(v, e0), verify)
    ce = check_i128(mul_i128(q, d0) + mul_i128(r, e0), verify)
    md -= (mi.modulus_inv62 * (cd & M64) + md) & M62
    me -= (mi.modulus_inv62 * (ce & M64) + me) & M62
    md = _store_i64(md, verify, "md")
    me = _store_i64(me, verify, "me")
    cd = check_i128(cd + mul_i128(m[0], md), verify)
    ce = check_i128(ce + mul_i128(m[0], me), verify)
    if verify:
        verify_check(cd & M62 == 0, "d update: bottom 62 bits not zero")
        verify_check(ce & M62 == 0, "e update: bottom 62 bits not zero")
    cd >>= 62
    ce >>= 62
    for i in range(1, LIMBS):
        di, ei = d.v[i], e.v[i]
        cd = check_i128(cd + mul_i128(u, di) + mul_i128(v, ei) + mul_i128(m[i], md), verify)
        ce = check_i128(ce + mul_i128(q, di) + mul_i128(r, ei) + mul_i128(m[i], me), verify)
        d.v[i - 1] = cd & M62
        e.v[i - 1] = ce & M62
        cd >>= 62
        ce >>= 62
    d.v[4] = _store_i64(cd, verify, "top limb of d")
    e.v[4] = _store_i64(ce, verify, "top limb of e")
    if verify:
        _check_de_range(d, mi, "d")
        _check_de_range(e, mi, "e")
    return d, e


def shrink_len(f: Signed62, g: Signed62, length: int) -> Tuple[Signed62, Signed62, int]:
    """Drop the top limb of f and g when both are 0 or -1, folding the sign down."""
    fn = f.v[length - 1]
    gn = g.v[length - 1]
    cond = (length - 2) >> 63
    cond |= fn ^ (fn >> 63)
    cond |= gn ^ (gn >> 63)
    if cond == 0:
        f.v[length - 2] = i64(f.v[length - 2] | ((fn << 62) & M64))
        g.v[length - 2] = i64(g.v[length - 2] | ((gn << 62) & M64))
        length -= 1
    return f, g, length


def normalize_62(d: Signed62, sign: int, mi: ModInfo, verify: bool = False) -> Signed62:
    """d <- (d negated if sign < 0) mod modulus, canonical in [0, m), in place."""
    m = mi.modulus.v
    r = list(d.v)
    if verify:
        _check_de_range(d, mi, "d")
    # (-2m, m) -> (-m, m)
    cond_add = r[4] >> 63
    for i in range(LIMBS):
        r[i] += m[i] & cond_add
    cond_negate = i64(sign) >> 63
    for i in range(LIMBS):
        r[i] = (r[i] ^ cond_negate) - cond_negate
    for i in range(LIMBS - 1):
        r[i + 1] += r[i] >> 62
        r[i] &= M62
    # (-m, m) -> [0, m)
    cond_add = r[4] >> 63
    for i in range(LIMBS):
        r[i] += m[i] & cond_add
    for i in range(LIMBS - 1):
        r[i + 1] += r[i] >> 62
        r[i] &= M62
    for i in range(LIMBS):
        d.v[i] = _store_i64(r[i], verify, f"normalized limb {i}")
    if verify:
        verify_check(mul_cmp_62(d, LIMBS, SIGNED62_ONE, 0) >= 0, "result >= 0")
        verify_check(mul_cmp_62(d, LIMBS, mi.modulus, 1) < 0, "result < modulus")
        verify_check(is_canonical(d), "result canonical")
    return d


@dataclass
class OuterStep:
    """Snapshot of one outer iteration of :func:`modinv64_var`.

    ``*_in`` fields hold the state before the iteration, ``f_upd``/``g_upd``
    the values right after the matrix update (before shrinking), and
    ``f``/``g``/``d``/``e``/``length`` the state after the iteration.
    """

    iteration: int
    eta_in: int
    len_in: int
    d_in: Signed62
    e_in: Signed62
    f_in: Signed62
    g_in: Signed62
    eta: int
    t: Trans2x2
    d: Signed62
    e: Signed62
    f_upd: Signed62
    g_upd: Signed62
    f: Signed62
    g: Signed62
    length: int
    done: bool
    batch: List[BatchStep] = field(default_factory=list)


def _check_fg_range(f: Signed62, g: Signed62, length: int, mi: ModInfo) -> None:
    verify_check(mul_cmp_62(f, length, mi.modulus, -1) > 0, "f > -modulus")
    verify_check(mul_cmp_62(f, length, mi.modulus, 1) <= 0, "f <= modulus")
    verify_check(mul_cmp_62(g, length, mi.modulus, -1) > 0, "g > -modulus")
    verify_check(mul_cmp_62(g, length, mi.modulus, 1) < 0, "g < modulus")


def modinv64_var(
    x: Signed62,
    mi: ModInfo,
    *,
    verify: bool = False,
    divsteps: Callable[..., Tuple[int, Trans2x2]] = divsteps_62_var,
    observer: Optional[Callable[[OuterStep], None]] = None,
) -> Signed62:
    """Inverse of x modulo ``mi.modulus`` as a fresh canonical Signed62.

    x must be canonical with 0 <= x < m and gcd(x, m) = 1, or x = 0 (which
    maps to 0). ``x`` itself is not modified. With ``verify`` every debug
    invariant of the C implementation is checked. ``observer`` receives an
    :class:`OuterStep` after each outer iteration.
    """
    d = Signed62([0, 0, 0, 0, 0])
    e = Signed62([1, 0, 0, 0, 0])
    f = assign(Signed62(), mi.modulus)
    g = assign(Signed62(), x)
    i = 0
    length = 5
    eta = -1  # eta = -delta; delta starts at 1
    while True:
        if observer is not None:
            snap = (eta, length, d.copy(), e.copy(), f.copy(), g.copy())
            batch: List[BatchStep] = []
            eta, t = divsteps(eta, f.v[0] & M64, g.v[0] & M64, verify=verify, trace=batch)
        else:
            eta, t = divsteps(eta, f.v[0] & M64, g.v[0] & M64, verify=verify)
        if verify:
            verify_check(-ETA_BOUND <= eta <= ETA_BOUND, "eta within [-745, 745]")
        update_de_62(d, e, t, mi, verify)
        if verify:
            _check_fg_range(f, g, length, mi)
        update_fg_62_var(length, f, g, t, verify)
        done = False
        # g == 0 is only possible when its bottom limb is zero
        if g.v[0] == 0:
            cond = 0
            for j in range(1, length):
                cond |= g.v[j]
            done = cond == 0
        if observer is not None:
            f_upd, g_upd = f.copy(), g.copy()
        if not done:
            f, g, length = shrink_len(f, g, length)
            if verify:
                verify_check(i + 1 < MAX_OUTER_ITERATIONS, "++i < 12")
                _check_fg_range(f, g, length, mi)
        if observer is not None:
            observer(OuterStep(
                iteration=i, eta_in=snap[0], len_in=snap[1],
                d_in=snap[2], e_in=snap[3], f_in=snap[4], g_in=snap[5],
                eta=eta, t=t, d=d.copy(), e=e.copy(), f_upd=f_upd, g_upd=g_upd,
                f=f.copy(), g=g.copy(), length=length, done=done, batch=batch,
            ))
        if done:
            break
        i += 1
    if verify:
        verify_check(mul_cmp_62(g, length, SIGNED62_ONE, 0) == 0, "g == 0")
        verify_check(
            mul_cmp_62(f, length, SIGNED62_ONE, -1) == 0
            or mul_cmp_62(f, length, SIGNED62_ONE, 1) == 0
            or (
                mul_cmp_62(x, 5, SIGNED62_ONE, 0) == 0
                and mul_cmp_62(d, 5, SIGNED62_ONE, 0) == 0
                and (
                    mul_cmp_62(f, length, mi.modulus, 1) == 0
                    or mul_cmp_62(f, length, mi.modulus, -1) == 0
                )
            ),
            "|f| == 1, or (x == 0 and d == 0 and |f| == modulus)",
        )
    normalize_62(d, f.v[length - 1], mi, verify)
    return assign(Signed62(), d)
