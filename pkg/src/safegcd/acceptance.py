"""Acceptance criteria as runnable checks.

Shared by ``tests/test_acceptance.py`` (full trial counts) and the
``selftest`` CLI command (configurable counts). Criteria 3, 6 and 7 are
aggregates over data collected while running 2 and 5, so run them in order
through :meth:`Acceptance.run_all`.
"""

import random
import time
from dataclasses import dataclass
from typing import Callable, List, Optional

from safegcd import refmath
from safegcd._verify import VerifyError
from safegcd.divsteps62 import (
    BATCH,
    ETA_BOUND,
    divsteps_62_var,
    inv_mod16,
    inv_neg_mod64,
    matrix_bounds_ok,
)
from safegcd.modinv64 import MAX_OUTER_ITERATIONS, shrink_len
from safegcd.oracles import (
    SECP256K1_P,
    adversarial_moduli,
    adversarial_values,
    differential_modinv,
)
from safegcd.signed62 import Signed62, decode, encode, length_range
from safegcd.wide64 import INT64_MAX, INT64_MIN, M64, umul128

# Batches whose starting |eta| is at most this cannot push |eta| past 745
# within 62 divsteps, so the in-loop eta check is meaningful for them.
VERIFY_ETA_WINDOW = ETA_BOUND - BATCH

_KERNEL_FAULTS = (VerifyError, ValueError, IndexError, OverflowError)


@dataclass(frozen=True)
class Counts:
    umul_pairs: int = 10**6
    batches: int = 10**5
    inverses_p: int = 10**4
    random_moduli: int = 10**3
    refmath_bound: int = 10**4
    shrink_states: int = 10**5
    codec_values: int = 10**5
    adversarial: bool = True

    @classmethod
    def uniform(cls, n: int) -> "Counts":
        """Same count everywhere; n == 0 also skips the adversarial corpus."""
        return cls(n, n, n, n, n, n, n, adversarial=n > 0)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float
    time_limit: Optional[float] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        limit = f" (limit {self.time_limit:g} s)" if self.time_limit else ""
        return f"[{status}] {self.number}. {self.name}: {self.detail} [{self.elapsed:.1f} s{limit}]"


class Acceptance:
    def __init__(
        self,
        counts: Counts = Counts(),
        seed: int = 20240601,
        divsteps: Callable = divsteps_62_var,
        enforce_time: bool = True,
    ):
        self.counts = counts
        self.seed = seed
        self.divsteps = divsteps
        self.enforce_time = enforce_time
        self.results: List[CriterionResult] = []
        # aggregates for criteria 3, 6, 7
        self.batches_checked = 0
        self.bound_violations = 0
        self.max_outer = 0
        self.verify_fired: List[str] = []
        self.verify_runs = 0

    def _rng(self, salt: int) -> random.Random:
        return random.Random(self.seed * 1000 + salt)

    def _record(self, number, name, passed, detail, start, limit=None) -> CriterionResult:
        elapsed = time.perf_counter() - start
        if limit is not None and self.enforce_time and elapsed > limit:
            passed = False
            detail += f"; too slow ({elapsed:.1f} s > {limit} s)"
        res = CriterionResult(number, name, passed, detail, elapsed, limit)
        self.results.append(res)
        return res

    def _count_batch(self, t) -> None:
        self.batches_checked += 1
        if t.det != 1 << BATCH or not matrix_bounds_ok(t):
            self.bound_violations += 1

    def c1_umul128(self) -> CriterionResult:
        start = time.perf_counter()
        edges = [0, 1, 2**32 - 1, 2**32, 2**32 + 1, 2**63, 2**64 - 1]
        pairs = [(a, b) for a in edges for b in edges]
        rng = self._rng(1)
        pairs += [(rng.getrandbits(64), rng.getrandbits(64)) for _ in range(self.counts.umul_pairs)]
        bad = [(a, b) for a, b in pairs if umul128(a, b).value != a * b]
        return self._record(
            1, "umul128 exactness", not bad,
            f"{len(pairs)} pairs, {len(bad)} mismatches", start, 10,
        )

    def _batch_inputs(self):
        edge_f = [1, 3, M64, 2**63 + 1, 0x5555555555555555]
        for eta in (-ETA_BOUND, -VERIFY_ETA_WINDOW, -1, 0, 1, VERIFY_ETA_WINDOW, ETA_BOUND):
            for f0 in edge_f:
                for g0 in (0, f0, M64, 1, 2**63):
                    yield eta, f0, g0
        rng = self._rng(2)
        for _ in range(self.counts.batches):
            yield rng.randint(-ETA_BOUND, ETA_BOUND), rng.getrandbits(64) | 1, rng.getrandbits(64)

    def c2_batch_differential(self) -> CriterionResult:
        start = time.perf_counter()
        n = mismatches = 0
        first = ""
        for eta, f0, g0 in self._batch_inputs():
            n += 1
            try:
                eta_out, t = self.divsteps(eta, f0, g0)
            except _KERNEL_FAULTS as exc:
                mismatches += 1
                first = first or f"; first at eta={eta} f0={f0:x} g0={g0:x}: divsteps raised {exc!r}"
                continue
            self._count_batch(t)
            s, T = refmath.step_n(refmath.DivstepState.from_eta(eta, f0, g0), BATCH)
            ok = (eta_out, t.u, t.v, t.q, t.r) == (s.eta, T.u, T.v, T.q, T.r)
            if ok and abs(eta) <= VERIFY_ETA_WINDOW:
                self.verify_runs += 1
                try:
                    ok = self.divsteps(eta, f0, g0, verify=True) == (eta_out, t)
                except VerifyError as exc:
                    self.verify_fired.append(f"batch eta={eta} f0={f0:x} g0={g0:x}: {exc}")
            if not ok:
                mismatches += 1
                first = first or f"; first at eta={eta} f0={f0:x} g0={g0:x}: matrix or eta differs"
        return self._record(
            2, "batch differential vs exact model", mismatches == 0,
            f"{n} batches, {mismatches} mismatches{first}", start, 60,
        )

    def c4_small_inverses(self) -> CriterionResult:
        start = time.perf_counter()
        bad64 = [f for f in range(1, 64, 2) if (f * inv_neg_mod64(f)) % 64 != 63]
        bad16 = [f for f in range(1, 16, 2) if (f * inv_mod16(f)) % 16 != 1]
        return self._record(
            4, "small-inverse formulas", not bad64 and not bad16,
            f"32 residues mod 64 ({len(bad64)} bad), 8 residues mod 16 ({len(bad16)} bad)",
            start, 1,
        )

    def c5_end_to_end(self) -> CriterionResult:
        start = time.perf_counter()
        c = self.counts
        rng = self._rng(5)
        jobs = [(SECP256K1_P, c.inverses_p, [0])]
        for _ in range(c.random_moduli):
            jobs.append(((1 << 255) | rng.getrandbits(256) | 1, 1, None))
        for m in adversarial_moduli() if c.adversarial else ():
            jobs.append((m, 0, list(adversarial_values(m))))
        checked = 0
        failure = ""
        for k, (m, trials, extra) in enumerate(jobs):
            rep = differential_modinv(
                trials, m, self.seed + k, divsteps=self.divsteps, verify=True, extra_inputs=extra
            )
            checked += rep.checked
            self.verify_runs += rep.checked
            self.batches_checked += rep.batches
            self.bound_violations += rep.bound_violations
            self.max_outer = max(self.max_outer, rep.max_outer_iterations)
            if not rep.passed and not failure:
                ce = rep.counterexample or {}
                failure = f"; mismatch mod {rep.modulus} at x={ce.get('x')} in stage {ce.get('stage')}: {ce.get('detail', '')}"
                if "VerifyError" in repr(ce):
                    self.verify_fired.append(failure)
        return self._record(
            5, "end-to-end inverse agreement", not failure,
            f"{checked} inverses over {len(jobs)} moduli{failure}", start, 300,
        )

    def c3_bounds(self) -> CriterionResult:
        start = time.perf_counter()
        return self._record(
            3, "determinant and matrix bounds", self.batches_checked > 0 and self.bound_violations == 0,
            f"{self.batches_checked} batches, {self.bound_violations} violations", start,
        )

    def c6_iteration_bounds(self) -> CriterionResult:
        start = time.perf_counter()
        rng = self._rng(6)
        worst = 0
        over = 0
        for _ in range(self.counts.refmath_bound):
            m = rng.getrandbits(256) | 1
            x = rng.randrange(m) if m > 1 else 0
            n = refmath.count_divsteps(m, x, max_steps=724)
            if n < 0:
                over += 1
            worst = max(worst, n)
        ok = self.max_outer <= MAX_OUTER_ITERATIONS and over == 0
        return self._record(
            6, "iteration bounds", ok,
            f"max outer iterations {self.max_outer} (<= 12, {self.max_outer * BATCH} divsteps <= 744); "
            f"exact model max {worst} divsteps over {self.counts.refmath_bound} inputs, {over} over 724",
            start,
        )

    def c7_verify_parity(self) -> CriterionResult:
        start = time.perf_counter()
        fired = self.verify_fired
        return self._record(
            7, "VERIFY parity", not fired,
            f"{self.verify_runs} verify-mode runs, {len(fired)} assertions fired"
            + (f"; first: {fired[0]}" if fired else ""),
            start,
        )

    def c8_shrink(self) -> CriterionResult:
        start = time.perf_counter()
        rng = self._rng(8)
        bad = folds = 0

        def top():
            pick = rng.random()
            if pick < 0.35:
                return 0
            if pick < 0.7:
                return -1
            if pick < 0.85:
                return rng.randint(-4, 4)
            return rng.randint(INT64_MIN, INT64_MAX)

        for _ in range(self.counts.shrink_states):
            length = rng.randint(1, 5)
            fv = [rng.getrandbits(62) for _ in range(5)]
            gv = [rng.getrandbits(62) for _ in range(5)]
            fv[length - 1], gv[length - 1] = top(), top()
            f, g = Signed62(fv), Signed62(gv)
            before = decode(f, length), decode(g, length)
            f, g, new_len = shrink_len(f, g, length)
            folds += new_len != length
            if (decode(f, new_len), decode(g, new_len)) != before:
                bad += 1
        return self._record(
            8, "length-shrink safety", bad == 0,
            f"{self.counts.shrink_states} states, {folds} folds, {bad} value changes", start,
        )

    def c9_codec(self) -> CriterionResult:
        start = time.perf_counter()
        rng = self._rng(9)
        bad = 0
        for length in range(1, 6):
            span = length_range(length)
            edges = [span.start, span.stop - 1, 0, -1, 1]
            values = edges + [rng.randrange(span.start, span.stop) for _ in range(self.counts.codec_values)]
            for x in values:
                if decode(encode(x, length), length) != x:
                    bad += 1
        return self._record(
            9, "codec round trip", bad == 0,
            f"{self.counts.codec_values} random values + 5 edges at each length 1..5, {bad} failures", start,
        )

    def run_all(self) -> List[CriterionResult]:
        self.c1_umul128()
        self.c2_batch_differential()
        self.c4_small_inverses()
        self.c5_end_to_end()
        self.c3_bounds()
        self.c6_iteration_bounds()
        self.c7_verify_parity()
        self.c8_shrink()
        self.c9_codec()
        self.results.sort(key=lambda r: r.number)
        return self.results
