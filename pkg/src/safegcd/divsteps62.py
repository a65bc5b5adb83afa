"""Variable-time batch of 62 divsteps on the bottom 64-bit words of f and g."""

from dataclasses import asdict, dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from safegcd._verify import verify_check
from safegcd.wide64 import M32, M64, i64

BATCH = 62
ETA_BOUND = 745

DEBRUIJN64 = 0x022FDD63CC95386D


def _debruijn_table(constant: int) -> Tuple[int, ...]:
    table = [0] * 64
    for k in range(64):
        table[((constant << k) & M64) >> 58] = k
    return tuple(table)


DEBRUIJN64_TABLE = _debruijn_table(DEBRUIJN64)


def ctz64(x: int, table: Sequence[int] = DEBRUIJN64_TABLE) -> int:
    """Count trailing zeros of a non-zero 64-bit word (De Bruijn lookup)."""
    if x == 0:
        raise ValueError("ctz64 of zero")
    return table[(((x & -x) * DEBRUIJN64) & M64) >> 58]


def ctz64_naive(x: int) -> int:
    if x == 0:
        raise ValueError("ctz64 of zero")
    n = 0
    while not x & 1:
        x >>= 1
        n += 1
    return n


def inv_neg_mod64(f: int) -> int:
    """f * (f*f - 2) mod 2^64; the low 6 bits are -1/f mod 64."""
    if not f & 1:
        raise ValueError("inv_neg_mod64 requires odd f")
    return (f * ((f * f - 2) & M64)) & M64


def inv_mod16(f: int) -> int:
    """w with f*w = 1 mod 16, for odd f."""
    if not f & 1:
        raise ValueError("inv_mod16 requires odd f")
    return (f + (((f + 1) & 4) << 1)) & M32


@dataclass(frozen=True)
class Trans2x2:
    u: int
    v: int
    q: int
    r: int

    @property
    def det(self) -> int:
        return self.u * self.r - self.v * self.q

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class BatchStep:
    """Kernel state at the top of one loop iteration, plus what it computed.

    ``i`` is the kernel's remaining-step counter and ``j`` the number of
    divsteps already folded into g (by the previous cancellation) whose
    halvings are still pending. Words are stored unsigned.
    """

    i: int
    j: int
    eta: int
    f: int
    g: int
    u: int
    v: int
    q: int
    r: int
    zeros: int = 0
    limit: Optional[int] = None
    mask: Optional[int] = None
    w: Optional[int] = None

    def to_json(self) -> dict:
        out = asdict(self)
        for k in ("f", "g", "u", "v", "q", "r", "mask", "w"):
            if out[k] is not None:
                out[k] = format(out[k], "016x")
        return out


def det_check_pow2(t: Trans2x2, n: int) -> bool:
    """True iff u*r - v*q == +2^n exactly."""
    return t.det == 1 << n


def matrix_bounds_ok(t: Trans2x2, n: int = BATCH) -> bool:
    """Row-sum bounds that keep f and g from growing or flipping sign."""
    lim = 1 << n
    return (
        abs(t.u) + abs(t.v) <= lim
        and abs(t.q) + abs(t.r) <= lim
        and t.u + t.v > -lim
        and t.q + t.r > -lim
    )


def divsteps_62_var(
    eta: int,
    f0: int,
    g0: int,
    *,
    verify: bool = False,
    trace: Optional[List[BatchStep]] = None,
    ctz: Callable[[int], int] = ctz64,
) -> Tuple[int, Trans2x2]:
    """Transition matrix and final eta for 62 divsteps (eta = -delta).

    Only the words ``f0`` (odd) and ``g0`` are needed: the batch depends on
    the low 62 bits of f and g alone. Returns (eta', t) with
    t (f, g) = 2^62 (f62, g62). Pass a list as ``trace`` to collect one
    :class:`BatchStep` per loop iteration.
    """
    f0 &= M64
    g0 &= M64
    # u, v, q, r are wrapping uint64 words, read as signed only at the end.
    u, v, q, r = 1, 0, 0, 1
    f, g = f0, g0
    i = BATCH
    j = 0
    if verify:
        verify_check(f0 & 1 == 1, "f0 must be odd")
    while True:
        # sentinel bit caps the count at i
        zeros = ctz(g | ((M64 << i) & M64))
        if trace is not None:
            step = BatchStep(i, j, eta, f, g, u, v, q, r, zeros)
            trace.append(step)
        g >>= zeros
        u = (u << zeros) & M64
        v = (v << zeros) & M64
        eta -= zeros
        i -= zeros
        if i == 0:
            break
        if verify:
            verify_check(f & 1 == 1, "(f & 1) == 1")
            verify_check(g & 1 == 1, "(g & 1) == 1")
            verify_check((u * f0 + v * g0) & M64 == (f << (62 - i)) & M64,
                         "(u * f0 + v * g0) == f << (62 - i)")
            verify_check((q * f0 + r * g0) & M64 == (g << (62 - i)) & M64,
                         "(q * f0 + r * g0) == g << (62 - i)")
            verify_check(-ETA_BOUND <= eta <= ETA_BOUND, "eta >= -745 && eta <= 745")
        if eta < 0:
            # negate eta, replace (f, g) by (g, -f)
            eta = -eta
            f, g = g, -f & M64
            u, q = q, -u & M64
            v, r = r, -v & M64
            limit = i if eta + 1 > i else eta + 1
            if verify:
                verify_check(0 < limit <= 62, "limit > 0 && limit <= 62")
            mask = (M64 >> (64 - limit)) & 63
            # cancel up to 6 low bits of g
            w = (g * inv_neg_mod64(f)) & mask
        else:
            limit = i if eta + 1 > i else eta + 1
            if verify:
                verify_check(0 < limit <= 62, "limit > 0 && limit <= 62")
            mask = (M64 >> (64 - limit)) & 15
            # cancel up to 4 low bits of g
            w = inv_mod16(f)
            w = (-w * g) & mask
        g = (g + f * w) & M64
        q = (q + u * w) & M64
        r = (r + v * w) & M64
        if trace is not None:
            step.limit, step.mask, step.w = limit, mask, w
        if verify:
            verify_check(g & mask == 0, "(g & m) == 0")
        j = mask.bit_length()
    t = Trans2x2(i64(u), i64(v), i64(q), i64(r))
    if verify:
        verify_check(det_check_pow2(t, BATCH), "det_check_pow2(t, 62, 0)")
    return eta, t
