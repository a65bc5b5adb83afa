"""Independent oracles and the differential harness for the inverse code.

The oracles here share nothing with the divstep code: extended Euclid and
Fermat exponentiation. :func:`differential_modinv` runs every implementation
on seeded inputs and, on the first disagreement, replays the limb driver with
per-stage checks to say which stage went wrong.
"""

import json
import random
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator, List, NamedTuple, Optional

from safegcd import refmath
from safegcd._verify import VerifyError
from safegcd.divsteps62 import BATCH, Trans2x2, divsteps_62_var, matrix_bounds_ok
from safegcd.modinv64 import OuterStep, modinv64_var
from safegcd.signed62 import decode, encode, format_hex, make_modinfo

SECP256K1_P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
SECP256K1_N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
ED25519_P = 2**255 - 19

# Runaway guard for possibly-faulty kernels; a correct run needs at most 12.
_RUNAWAY_ITERATIONS = 64


class EgcdResult(NamedTuple):
    g: int
    u: int
    v: int


def egcd(a: int, b: int) -> EgcdResult:
    """Extended Euclid: u*a + v*b = g = gcd(a, b) with g >= 0."""
    if a == 0 and b == 0:
        raise ValueError("egcd(0, 0) is undefined")
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
        old_t, t = t, old_t - quot * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return EgcdResult(old_r, old_s, old_t)


def modinv_egcd(x: int, m: int) -> int:
    """Inverse of x mod m via extended Euclid; 0 maps to 0."""
    x %= m
    if x == 0:
        return 0
    g, u, _ = egcd(x, m)
    if g != 1:
        raise ZeroDivisionError(f"{x} is not invertible modulo {m}")
    return u % m


def _pow_mod(a: int, e: int, m: int) -> int:
    result = 1
    a %= m
    while e:
        if e & 1:
            result = result * a % m
        a = a * a % m
        e >>= 1
    return result


def modinv_fermat(a: int, p: int) -> int:
    """a^(p-2) mod p; the inverse of a when p is prime and 0 < a < p."""
    if not 0 < a < p:
        raise ValueError("need 0 < a < p")
    return _pow_mod(a, p - 2, p)


def is_probable_prime(n: int, rounds: int = 32) -> bool:
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = _pow_mod(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def modinv_limbs(x: int, m: int, **kwargs) -> int:
    """Convenience wrapper: run the signed62 driver on plain ints."""
    return decode(modinv64_var(encode(x), make_modinfo(m), **kwargs))


def adversarial_values(m: int) -> Iterator[int]:
    """Curated inputs in [0, m) that random sampling is unlikely to produce."""
    seen = set()

    def emit(x: int) -> Iterator[int]:
        x %= m
        if x not in seen and (x == 0 or egcd(x, m).g == 1):
            seen.add(x)
            yield x

    for x in (0, 1, 2, 3, m - 1, m - 2, m // 2, m // 2 + 1, m // 3):
        yield from emit(x)
    bits = m.bit_length()
    for k in range(1, bits):
        # long runs of ones and zeros
        yield from emit((1 << k) - 1)
        yield from emit(1 << k)
        yield from emit(m - (1 << k))
        yield from emit(((1 << bits) - 1) ^ ((1 << k) - 1))
    for k in range(1, 5):
        # values sitting at signed62 limb boundaries
        for delta in (-2, -1, 0, 1, 2):
            yield from emit((1 << (62 * k)) + delta)
            yield from emit(m - (1 << (62 * k)) + delta)
            yield from emit((1 << (62 * k - 1)) + delta)
    for k in range(0, bits, 31):
        yield from emit(int("10" * (bits // 2 + 1), 2) >> k)
        yield from emit(int("1100" * (bits // 4 + 1), 2) >> k)


def adversarial_moduli() -> List[int]:
    return [
        SECP256K1_P,
        SECP256K1_N,
        ED25519_P,
        3, 5, 7, 9, 15, 255,
        (1 << 61) - 1, (1 << 62) - 1, (1 << 62) + 1, (1 << 63) + 1,
        (1 << 124) - 1, (1 << 124) + 1, (1 << 186) - 1, (1 << 248) + 1,
        (1 << 255) + 1, (1 << 255) - 1, (1 << 256) - 1, (1 << 256) - 189,
    ]


@dataclass
class StageMismatch(Exception):
    stage: str
    iteration: int
    detail: str

    def __str__(self) -> str:
        return f"stage {self.stage!r} at outer iteration {self.iteration}: {self.detail}"


def _reference_batch(eta: int, f0: int, g0: int):
    s, T = refmath.step_n(refmath.DivstepState.from_eta(eta, f0, g0), BATCH)
    return s.eta, Trans2x2(T.u, T.v, T.q, T.r)


def localize_fault(
    x: int, m: int, divsteps: Callable = divsteps_62_var, verify: bool = False
) -> Optional[StageMismatch]:
    """Replay the limb driver, checking each stage against exact arithmetic.

    Returns the first stage that disagrees, or None if every stage and the
    final result are correct.
    """
    mi = make_modinfo(m)
    inv_2_62 = refmath.inv_pow2(BATCH, m)
    state = {"iteration": 0}

    def checked_divsteps(eta, f0, g0, **kw):
        it = state["iteration"]
        try:
            out = divsteps(eta, f0, g0, **kw)
        except (VerifyError, ValueError, IndexError, OverflowError) as exc:
            raise StageMismatch("divsteps", it, f"kernel raised {exc!r}") from exc
        want = _reference_batch(eta, f0, g0)
        if out != want:
            raise StageMismatch("divsteps", it, f"got {out}, want {want}")
        return out

    def observer(rec: OuterStep) -> None:
        it = rec.iteration
        t = rec.t
        f_in, g_in = decode(rec.f_in, rec.len_in), decode(rec.g_in, rec.len_in)
        nf, ng = t.u * f_in + t.v * g_in, t.q * f_in + t.r * g_in
        if (decode(rec.f_upd, rec.len_in), decode(rec.g_upd, rec.len_in)) != (nf >> BATCH, ng >> BATCH):
            raise StageMismatch("update_fg", it, "f/g do not equal t (f, g) / 2^62")
        d_in, e_in = decode(rec.d_in), decode(rec.e_in)
        d, e = decode(rec.d), decode(rec.e)
        if (d - (t.u * d_in + t.v * e_in) * inv_2_62) % m or (e - (t.q * d_in + t.r * e_in) * inv_2_62) % m:
            raise StageMismatch("update_de", it, "d/e congruence mod m broken")
        if not (-2 * m < d < m and -2 * m < e < m):
            raise StageMismatch("update_de", it, "d/e left (-2m, m)")
        if (decode(rec.f, rec.length), decode(rec.g, rec.length)) != (nf >> BATCH, ng >> BATCH):
            raise StageMismatch("shrink_len", it, "length shrink changed f/g")
        if it + 1 >= _RUNAWAY_ITERATIONS:
            raise StageMismatch("driver", it, "no termination")
        state["iteration"] = it + 1

    try:
        got = decode(modinv64_var(encode(x), mi, verify=verify, divsteps=checked_divsteps, observer=observer))
    except StageMismatch as exc:
        return exc
    except VerifyError as exc:
        return StageMismatch("verify", state["iteration"], str(exc))
    want = modinv_egcd(x, m)
    if got != want:
        return StageMismatch("normalize", state["iteration"], f"got {got:x}, want {want:x}")
    return None


@dataclass
class DifferentialReport:
    passed: bool
    seed: int
    trials: int
    modulus: str
    checked: int = 0
    max_outer_iterations: int = 0
    max_abs_eta: int = 0
    batches: int = 0
    bound_violations: int = 0
    counterexample: Optional[dict] = None
    implementations: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def differential_modinv(
    trials: int,
    m: int,
    seed: int,
    *,
    divsteps: Callable = divsteps_62_var,
    verify: bool = False,
    extra_inputs: Optional[List[int]] = None,
) -> DifferentialReport:
    """Compare every inverse implementation on ``trials`` seeded inputs.

    Inputs not coprime to m are redrawn. ``extra_inputs`` are checked before
    the random ones.
    """
    mi = make_modinfo(m)
    prime = is_probable_prime(m)
    impls = ["modinv64_var", "modinv_ref", "egcd"] + (["fermat"] if prime else [])
    report = DifferentialReport(True, seed, trials, format_hex(m), implementations=impls)
    rng = random.Random(seed)
    stats = {"iters": 0}

    def counting_divsteps(eta, f0, g0, **kw):
        out = divsteps(eta, f0, g0, **kw)
        report.batches += 1
        report.max_abs_eta = max(report.max_abs_eta, abs(out[0]))
        if not matrix_bounds_ok(out[1]) or out[1].det != 1 << BATCH:
            report.bound_violations += 1
        stats["iters"] += 1
        if stats["iters"] > _RUNAWAY_ITERATIONS:
            raise StageMismatch("driver", stats["iters"], "no termination")
        return out

    def inputs() -> Iterator[int]:
        yield from extra_inputs or ()
        for _ in range(trials):
            while True:
                x = rng.randrange(m)
                if egcd(x, m).g == 1:
                    break
            yield x

    for x in inputs():
        stats["iters"] = 0
        results = {}
        try:
            results["modinv64_var"] = decode(
                modinv64_var(encode(x), mi, verify=verify, divsteps=counting_divsteps)
            )
        except (StageMismatch, VerifyError, ValueError, IndexError, OverflowError) as exc:
            results["modinv64_var"] = f"raised {exc!r}"
        report.max_outer_iterations = max(report.max_outer_iterations, stats["iters"])
        results["modinv_ref"] = refmath.modinv_ref(x, m)
        results["egcd"] = modinv_egcd(x, m)
        if prime:
            results["fermat"] = modinv_fermat(x, m) if x else 0
        report.checked += 1
        if len({repr(v) for v in results.values()}) != 1:
            fault = localize_fault(x, m, divsteps, verify)
            report.passed = False
            report.counterexample = {
                "x": format_hex(x),
                "results": {k: format_hex(v) if isinstance(v, int) else v for k, v in results.items()},
                "stage": fault.stage if fault else "unknown",
                "iteration": fault.iteration if fault else None,
                "detail": fault.detail if fault else "",
            }
            break
    if report.bound_violations:
        report.passed = False
    return report
