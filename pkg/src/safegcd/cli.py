"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure (non-invertible input, failed
self-test), 2 usage error. All numbers are hex on input and output.
"""

import argparse
import functools
import json
import math
import random
import sys
import time
from typing import List, Optional

from safegcd import refmath
from safegcd.acceptance import Acceptance, Counts
from safegcd.divsteps62 import DEBRUIJN64_TABLE, ctz64, divsteps_62_var
from safegcd.modinv64 import OuterStep, modinv64_var
from safegcd.oracles import SECP256K1_P, modinv_egcd
from safegcd.signed62 import decode, encode, format_hex, make_modinfo, parse_hex
from safegcd.wide64 import M64

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _modulus(args) -> int:
    try:
        m = parse_hex(args.mod)
    except ValueError as exc:
        raise UsageError(str(exc))
    if not m & 1:
        raise UsageError("even modulus")
    if not 3 <= m < 1 << 256:
        raise UsageError("modulus must lie in [3, 2^256)")
    return m


def _value(args, m: int) -> int:
    try:
        x = parse_hex(args.value)
    except ValueError as exc:
        raise UsageError(str(exc))
    if x >= m:
        raise UsageError("value must be below the modulus")
    return x


def _words(limbs: List[int], length: int) -> List[str]:
    return [format(limb & M64, "016x") for limb in limbs[:length]]


def cmd_modinv(args) -> int:
    m = _modulus(args)
    x = _value(args, m)
    if x and math.gcd(x, m) != 1:
        print(f"error: {format_hex(x)} is not invertible modulo {format_hex(m)} "
              f"(gcd {format_hex(math.gcd(x, m))})", file=sys.stderr)
        return EXIT_MATH
    inv = decode(modinv64_var(encode(x), make_modinfo(m), verify=args.verify))
    if args.json:
        print(json.dumps({"input": format_hex(x), "modulus": format_hex(m), "inverse": format_hex(inv)}))
    else:
        print(format_hex(inv))
    return EXIT_OK


def _step_json(rec: OuterStep) -> dict:
    t = rec.t
    return {
        "iteration": rec.iteration,
        "eta_in": rec.eta_in,
        "eta": rec.eta,
        "len": rec.length,
        "f": _words(rec.f.v, rec.length),
        "g": _words(rec.g.v, rec.length),
        "t": {"u": format_hex(t.u), "v": format_hex(t.v), "q": format_hex(t.q), "r": format_hex(t.r)},
        "g_zero": rec.done,
        "batch": [step.to_json() for step in rec.batch],
    }


def _print_step_table(obj: dict) -> None:
    print(f"iteration {obj['iteration']}: eta {obj['eta_in']} -> {obj['eta']}, len {obj['len']}, "
          f"g_zero {str(obj['g_zero']).lower()}")
    t = obj["t"]
    print(f"  t = [[{t['u']}, {t['v']}], [{t['q']}, {t['r']}]]")
    print(f"  f = {' '.join(obj['f'])}")
    print(f"  g = {' '.join(obj['g'])}")
    cols = ("i", "j", "eta", "f", "g", "u", "v", "q", "r", "zeros", "limit", "mask", "w")
    print("  " + " ".join(f"{c:>16}" if c in "fguvqr" else f"{c:>5}" for c in cols))
    for step in obj["batch"]:
        cells = []
        for c in cols:
            val = "-" if step[c] is None else str(step[c])
            cells.append(f"{val:>16}" if c in "fguvqr" else f"{val:>5}")
        print("  " + " ".join(cells))


def cmd_trace(args) -> int:
    m = _modulus(args)
    x = _value(args, m)
    if x and math.gcd(x, m) != 1:
        print(f"error: {format_hex(x)} is not invertible modulo {format_hex(m)}", file=sys.stderr)
        return EXIT_MATH
    steps: List[dict] = []
    inv = decode(modinv64_var(
        encode(x), make_modinfo(m), verify=args.verify,
        observer=lambda rec: steps.append(_step_json(rec)),
    ))
    for obj in steps:
        if args.json:
            print(json.dumps(obj))
        else:
            _print_step_table(obj)
    if args.json:
        print(json.dumps({"result": format_hex(inv), "iterations": len(steps)}))
    else:
        print(f"result {format_hex(inv)} after {len(steps)} iterations")
    return EXIT_OK


def _faulty_kernel(kind: str):
    if kind == "ctz":
        table = list(DEBRUIJN64_TABLE)
        a, b = table.index(1), table.index(2)
        table[a], table[b] = 2, 1
        return functools.partial(divsteps_62_var, ctz=functools.partial(ctz64, table=table))
    raise UsageError(f"unknown fault {kind!r}")


def cmd_selftest(args) -> int:
    counts = Counts() if args.trials is None else Counts.uniform(args.trials)
    divsteps = _faulty_kernel(args.inject_fault) if args.inject_fault else divsteps_62_var
    results = Acceptance(counts, seed=args.seed, divsteps=divsteps,
                         enforce_time=args.trials is None).run_all()
    for res in results:
        if args.json:
            print(json.dumps({"criterion": res.number, "name": res.name, "passed": res.passed,
                              "detail": res.detail}))
        else:
            print(res.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_MATH


def cmd_bench(args) -> int:
    m = _modulus(args) if args.mod else SECP256K1_P
    mi = make_modinfo(m)
    rng = random.Random(args.seed)
    xs = [rng.randrange(1, m) for _ in range(args.trials)]
    cases = {
        "modinv64_var": lambda x: modinv64_var(encode(x), mi, verify=args.verify),
        "modinv_ref": lambda x: refmath.modinv_ref(x, m),
        "egcd": lambda x: modinv_egcd(x, m),
        "builtin_pow": lambda x: pow(x, -1, m),
    }
    for name, fn in cases.items():
        start = time.perf_counter()
        for x in xs:
            fn(x)
        per = (time.perf_counter() - start) / max(len(xs), 1) * 1e6
        print(f"{name:14} {per:10.1f} us/op  ({len(xs)} ops)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="safegcd", description="safegcd modular inverse tools")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_value=True):
        p.add_argument("--mod", required=needs_value, help="odd modulus, hex")
        if needs_value:
            p.add_argument("--value", required=True, help="value below the modulus, hex")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--verify", action="store_true", help="enable debug invariant checks")

    p = sub.add_parser("modinv", help="compute a modular inverse")
    common(p)
    p.set_defaults(func=cmd_modinv)

    p = sub.add_parser("trace-divsteps", help="dump per-iteration divstep traces")
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--trials", type=int, default=None,
                   help="random trials per check (default: full counts)")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--json", action="store_true")
    p.add_argument("--inject-fault", choices=["ctz"], default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("bench", help="time the inverse implementations")
    common(p, needs_value=False)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", None) is not None and args.trials < 0:
        parser.error("--trials must be non-negative")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
