"""64-bit word arithmetic on top of Python ints.

Every value that lives in a C ``uint64_t``/``int64_t`` is kept as a Python int
and explicitly wrapped after each operation that could leave the word range.
"""

from typing import NamedTuple

from safegcd._verify import verify_check

M32 = 0xFFFFFFFF
M62 = (1 << 62) - 1
M64 = (1 << 64) - 1

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
INT128_MIN = -(1 << 127)
INT128_MAX = (1 << 127) - 1


def u64(x: int) -> int:
    """Reinterpret as unsigned 64-bit (wrap modulo 2^64)."""
    return x & M64


def i64(x: int) -> int:
    """Reinterpret as signed 64-bit two's complement (wrap modulo 2^64)."""
    x &= M64
    return x - (1 << 64) if x >> 63 else x


def sar64(x: int, n: int) -> int:
    """Arithmetic right shift of a signed 64-bit word."""
    return i64(x) >> n


class U128Parts(NamedTuple):
    lo: int
    hi: int

    @property
    def value(self) -> int:
        return (self.hi << 64) | self.lo


def umul128(a: int, b: int) -> U128Parts:
    """Full 64x64->128 product built from four 32x32 partial products.

    Mirrors the portable C body: no intermediate ever needs more than 64 bits,
    and the middle column sum (``mid34``) stays below 2^34.
    """
    if not (0 <= a <= M64 and 0 <= b <= M64):
        raise ValueError("umul128 operands must be unsigned 64-bit words")
    a_lo, a_hi = a & M32, a >> 32
    b_lo, b_hi = b & M32, b >> 32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid34 = ((ll >> 32) + (lh & M32) + (hl & M32)) & M64
    hi = (hh + (lh >> 32) + (hl >> 32) + (mid34 >> 32)) & M64
    lo = ((mid34 << 32) + (ll & M32)) & M64
    return U128Parts(lo, hi)


def mid34(a: int, b: int) -> int:
    """The middle-column sum of :func:`umul128`, exposed for its range check."""
    ll = (a & M32) * (b & M32)
    lh = (a & M32) * (b >> 32)
    hl = (a >> 32) * (b & M32)
    return (ll >> 32) + (lh & M32) + (hl & M32)


def smul128(a: int, b: int) -> U128Parts:
    """Signed 64x64->128 product as two's-complement (lo, hi) words."""
    ua, ub = a & M64, b & M64
    lo, hi = umul128(ua, ub)
    # two's-complement fixup of the high word
    if a < 0:
        hi -= ub
    if b < 0:
        hi -= ua
    return U128Parts(lo, hi & M64)


def i128(parts: U128Parts) -> int:
    v = parts.value
    return v - (1 << 128) if v >> 127 else v


def mul_i128(a: int, b: int) -> int:
    """Signed product of two int64 values, computed through :func:`umul128`."""
    return i128(smul128(a, b))


def mul_shift_signed(a: int, b: int, shift: int) -> int:
    """floor(a*b / 2^shift) for int64 a, b, returned as int64.

    Only ``shift`` in {0, 62, 64} is supported; the shifted result must fit in
    a signed 64-bit word.
    """
    if shift not in (0, 62, 64):
        raise ValueError(f"unsupported shift {shift}")
    out = mul_i128(a, b) >> shift
    if not INT64_MIN <= out <= INT64_MAX:
        raise OverflowError("shifted product does not fit in int64")
    return out


def check_i128(x: int, verify: bool, what: str = "accumulator") -> int:
    """Debug check that an accumulator is still a valid int128."""
    if verify:
        verify_check(INT128_MIN <= x <= INT128_MAX, f"{what} overflows int128")
    return x
