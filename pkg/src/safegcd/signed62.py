"""signed62: base 2^62 big integers stored in five signed 64-bit limbs.

Limbs are held as Python ints in the int64 range. Below the effective length
``L`` the canonical limbs lie in [0, 2^62); the top limb carries the sign and
may use the full int64 range, so length L spans
[-2^(62(L-1)+63), 2^(62(L-1)+63)).
"""

import re
from dataclasses import dataclass, field
from typing import List

from safegcd.wide64 import INT64_MAX, INT64_MIN, M62

LIMBS = 5
_HEX = re.compile(r"[0-9a-fA-F]+")


@dataclass
class Signed62:
    v: List[int] = field(default_factory=lambda: [0] * LIMBS)

    def __post_init__(self) -> None:
        if len(self.v) != LIMBS:
            raise ValueError(f"signed62 holds exactly {LIMBS} limbs")
        for limb in self.v:
            if not INT64_MIN <= limb <= INT64_MAX:
                raise ValueError(f"limb {limb} outside int64")

    def copy(self) -> "Signed62":
        return Signed62(list(self.v))

    def value(self, length: int = LIMBS) -> int:
        return decode(self, length)


@dataclass(frozen=True)
class ModInfo:
    modulus: Signed62
    modulus_inv62: int

    @property
    def m(self) -> int:
        return decode(self.modulus)


def length_range(length: int) -> range:
    """Canonically representable values at the given effective length."""
    if not 1 <= length <= LIMBS:
        raise ValueError(f"length must be in [1, {LIMBS}]")
    top = 1 << (62 * (length - 1) + 63)
    return range(-top, top)


def encode(x: int, length: int = LIMBS) -> Signed62:
    if x not in length_range(length):
        raise OverflowError(f"{x} not representable in {length} signed62 limbs")
    v = [0] * LIMBS
    for i in range(length - 1):
        v[i] = x & M62
        x >>= 62
    v[length - 1] = x
    return Signed62(v)


def decode(a: Signed62, length: int = LIMBS) -> int:
    """Sum of limbs[i] * 2^(62 i) over the first ``length`` limbs."""
    x = 0
    for limb in reversed(a.v[:length]):
        x = (x << 62) + limb
    return x


def is_canonical(a: Signed62, length: int = LIMBS) -> bool:
    return all(0 <= a.v[i] <= M62 for i in range(length - 1))


def _mul_62(a: Signed62, alen: int, factor: int) -> List[int]:
    """a * factor renormalized into five limbs (top limb signed)."""
    # factor is tiny, so a plain product cannot leave the int128 accumulator
    r = [0] * LIMBS
    c = 0
    for i in range(LIMBS - 1):
        if i < alen:
            c += a.v[i] * factor
        r[i] = c & M62
        c >>= 62
    if LIMBS - 1 < alen:
        c += a.v[LIMBS - 1] * factor
    r[LIMBS - 1] = c
    return r


def mul_cmp_62(a: Signed62, alen: int, b: Signed62, factor: int) -> int:
    """Sign of decode(a, alen) - factor * decode(b)."""
    if not -2 <= factor <= 2:
        raise ValueError("factor must be in [-2, 2]")
    am = _mul_62(a, alen, 1)
    bm = _mul_62(b, LIMBS, factor)
    for i in reversed(range(LIMBS)):
        if am[i] < bm[i]:
            return -1
        if am[i] > bm[i]:
            return 1
    return 0


def assign(dst: Signed62, src: Signed62) -> Signed62:
    # field by field, no aliasing of the limb list
    for i in range(LIMBS):
        dst.v[i] = src.v[i]
    return dst


def make_modinfo(m: int) -> ModInfo:
    if not m & 1 or not 3 <= m < 1 << 256:
        raise ValueError("modulus must be odd and in [3, 2^256)")
    return ModInfo(encode(m), pow(m, -1, 1 << 62))


def parse_hex(s: str) -> int:
    """Parse big-endian hex without prefix, any case."""
    if not _HEX.fullmatch(s):
        raise ValueError(f"not a hex number: {s!r}")
    return int(s, 16)


def format_hex(x: int) -> str:
    if x < 0:
        return "-" + format(-x, "x")
    return format(x, "x")
