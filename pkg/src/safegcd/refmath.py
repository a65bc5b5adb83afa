"""Exact arbitrary-precision model of the divstep iteration.

Everything here works on unbounded Python ints and is deliberately slow and
literal; it is the ground truth the limb code is compared against.
"""

from dataclasses import dataclass
from typing import Tuple

# One bound for every consumer; 724 is checked separately as a property.
DEFAULT_MAX_STEPS = 744


def flip_convention(x: int) -> int:
    """Convert between delta and eta (eta = -delta). Self-inverse."""
    return -x


@dataclass(frozen=True)
class DivstepState:
    delta: int
    f: int
    g: int

    @property
    def eta(self) -> int:
        return flip_convention(self.delta)

    @classmethod
    def from_eta(cls, eta: int, f: int, g: int) -> "DivstepState":
        return cls(flip_convention(eta), f, g)


@dataclass(frozen=True)
class TransMatrix:
    """2x2 integer matrix ((u, v), (q, r))."""

    u: int
    v: int
    q: int
    r: int

    @classmethod
    def identity(cls) -> "TransMatrix":
        return cls(1, 0, 0, 1)

    def __matmul__(self, other: "TransMatrix") -> "TransMatrix":
        return TransMatrix(
            self.u * other.u + self.v * other.q,
            self.u * other.v + self.v * other.r,
            self.q * other.u + self.r * other.q,
            self.q * other.v + self.r * other.r,
        )

    def apply(self, f: int, g: int) -> Tuple[int, int]:
        return self.u * f + self.v * g, self.q * f + self.r * g

    @property
    def det(self) -> int:
        return self.u * self.r - self.v * self.q


def _require_odd(f: int) -> None:
    if not f & 1:
        raise ValueError(f"divstep requires odd f, got {f}")


def divstep(s: DivstepState) -> DivstepState:
    _require_odd(s.f)
    delta, f, g = s.delta, s.f, s.g
    if delta > 0 and g & 1:
        return DivstepState(1 - delta, g, (g - f) // 2)
    if g & 1:
        return DivstepState(1 + delta, f, (g + f) // 2)
    return DivstepState(1 + delta, f, g // 2)


def step_matrix(s: DivstepState) -> TransMatrix:
    """Matrix t of the branch taken, with t (f, g) = 2 (f', g')."""
    _require_odd(s.f)
    if s.g & 1:
        if s.delta > 0:
            return TransMatrix(0, 2, -1, 1)
        return TransMatrix(2, 0, 1, 1)
    return TransMatrix(2, 0, 0, 1)


def step_n(s: DivstepState, n: int) -> Tuple[DivstepState, TransMatrix]:
    """Run ``n`` divsteps, returning the final state and t_n @ ... @ t_1."""
    _require_odd(s.f)
    delta, f, g = s.delta, s.f, s.g
    u, v, q, r = 1, 0, 0, 1
    # Inlined divstep/step_matrix: this sits under every differential test.
    for _ in range(n):
        if g & 1:
            if delta > 0:
                delta, f, g = 1 - delta, g, (g - f) >> 1
                u, v, q, r = 2 * q, 2 * r, q - u, r - v
            else:
                delta, g = 1 + delta, (g + f) >> 1
                u, v, q, r = 2 * u, 2 * v, q + u, r + v
        else:
            delta, g = 1 + delta, g >> 1
            u, v = 2 * u, 2 * v
    return DivstepState(delta, f, g), TransMatrix(u, v, q, r)


def count_divsteps(f: int, g: int, max_steps: int = DEFAULT_MAX_STEPS, delta: int = 1) -> int:
    """Number of divsteps until g reaches 0, or -1 if that takes over ``max_steps``."""
    _require_odd(f)
    n = 0
    while g:
        if n == max_steps:
            return -1
        if delta > 0 and g & 1:
            delta, f, g = 1 - delta, g, (g - f) >> 1
        elif g & 1:
            delta, g = 1 + delta, (g + f) >> 1
        else:
            delta, g = 1 + delta, g >> 1
        n += 1
    return n


def gcd_safegcd(f: int, g: int, max_steps: int = DEFAULT_MAX_STEPS) -> int:
    """gcd(f, g) for odd f using a fixed number of divsteps.

    All ``max_steps`` iterations run regardless of when g hits zero.
    """
    _require_odd(f)
    s = DivstepState(1, f, g)
    for _ in range(max_steps):
        s = divstep(s)
    if s.g != 0:
        raise ArithmeticError(f"g did not reach 0 within {max_steps} divsteps")
    return abs(s.f)


def inv_pow2(n: int, m: int) -> int:
    """2^-n mod odd m, by repeated halving."""
    h = 1
    for _ in range(n):
        h = h >> 1 if h & 1 == 0 else (h + m) >> 1
    return h


def modinv_ref(x: int, m: int, max_steps: int = DEFAULT_MAX_STEPS) -> int:
    """Inverse of x modulo odd m via divsteps and Bezout extraction.

    Returns 0 for x == 0.
    """
    if m < 3 or not m & 1:
        raise ValueError("modulus must be odd and >= 3")
    if not 0 <= x < m:
        raise ValueError("x must lie in [0, m)")
    if x == 0:
        return 0
    delta, f, g = 1, m, x
    n = 0
    # Only the top row (u, v) is needed: u*m + v*x = 2^n * f.
    u, v, q, r = 1, 0, 0, 1
    while g:
        if n == max_steps:
            raise ArithmeticError(f"g did not reach 0 within {max_steps} divsteps")
        if g & 1:
            if delta > 0:
                delta, f, g = 1 - delta, g, (g - f) >> 1
                u, v, q, r = 2 * q, 2 * r, q - u, r - v
            else:
                delta, g = 1 + delta, (g + f) >> 1
                u, v, q, r = 2 * u, 2 * v, q + u, r + v
        else:
            delta, g = 1 + delta, g >> 1
            u, v = 2 * u, 2 * v
        n += 1
    if abs(f) != 1:
        raise ZeroDivisionError(f"{x} is not invertible modulo {m} (gcd {abs(f)})")
    # v*x = +-2^n (mod m)
    return v * f * inv_pow2(n, m) % m
