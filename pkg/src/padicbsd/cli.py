"""Command-line interface: verify / selftest / decompose."""

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction

from .curves import CurveFixture
from .dieudonne import DieudonneData
from .padics import QuadExt
from .series import LogMatrix
from .msymbols import ModularSymbolEngine
from .lfunction import lp_alpha, lp_beta, signed_decompose
from .verifier import run_verification


def cmd_verify(args):
    fixture = CurveFixture.load(args.fixture)
    cache_dir = args.cache_dir or os.path.join(
        os.path.dirname(os.path.abspath(args.fixture)), "cache")
    if args.rebuild_cache:
        path = None
        eng = ModularSymbolEngine(fixture, digits=args.digits,
                                  cache_dir=cache_dir, use_cache=True)
        path = eng._cache_path()
        if os.path.exists(path):
            os.unlink(path)
    report = run_verification(
        fixture, level=args.level, xtrunc=args.xtrunc, prec=args.prec,
        cache_dir=cache_dir, use_cache=not args.no_cache, digits=args.digits)
    text = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    print(text)
    print(f"# exit code {report.exit_code()}", file=sys.stderr)
    return report.exit_code()


def cmd_selftest(args):
    """Randomized Dieudonne-module identity suites (symbolic and p-adic)."""
    rng = random.Random(args.seed)
    t0 = time.time()
    count = args.count
    failures = 0
    for p in (5, 7, 13):
        for i in range(count):
            u = Fraction(rng.randrange(-40, 40))
            vnum = rng.randrange(1, 40)
            if vnum % p == 0:
                vnum += 1
            for mode in ("symbolic", "padic"):
                if mode == "symbolic":
                    D = DieudonneData.symbolic(p, u, vnum)
                else:
                    D = DieudonneData.padic(p, u, vnum, 40)
                ok = _identity_suite(D)
                if not ok:
                    failures += 1
                    print(f"FAIL p={p} sample={i} mode={mode}")
    dt = time.time() - t0
    status = "pass" if failures == 0 else f"{failures} failures"
    print(f"selftest: {3 * count} data per mode across p in (5,7,13): "
          f"{status} in {dt:.2f}s")
    return 0 if failures == 0 else 2


def _identity_suite(D):
    def iszero(x):
        if isinstance(x, QuadExt):
            return x.is_zero()
        return not x.valuation().decided

    one = D.scalar(1)
    nu_a, nu_b = D.eigenvectors()
    eta_a, eta_b = D.eta_basis()
    checks = [
        D.pairing(eta_a, nu_a), D.pairing(eta_b, nu_b),
        D.pairing(eta_a, nu_b) - one, D.pairing(eta_b, nu_a) - one,
        D.pairing(eta_a, D.omega) - one, D.pairing(eta_b, D.omega) - one,
    ]
    s = D.add(nu_a, nu_b)
    checks += [s[0] - one, s[1]]
    nm, np_ = D.n_vectors()
    cm, cp = D.n_vectors_closed_form()
    checks += [nm[0] - cm[0], nm[1] - cm[1], np_[0] - cp[0], np_[1] - cp[1]]
    base = D.pairing(D.omega, nu_b)
    checks.append(D.pairing(D.omega, nm)
                  - D.scalar(Fraction(2 * (D.p - 1), -D.p)) * D.alpha * base)
    checks.append(D.pairing(D.omega, np_) - D.scalar(4) / D.alpha * base)
    return all(iszero(c) for c in checks)


def cmd_decompose(args):
    fixture = CurveFixture.load(args.fixture)
    cache_dir = args.cache_dir or os.path.join(
        os.path.dirname(os.path.abspath(args.fixture)), "cache")
    eng = ModularSymbolEngine(fixture, digits=args.digits,
                              cache_dir=cache_dir,
                              use_cache=not args.no_cache)
    n = args.level or 3
    la, _, prov = lp_alpha(eng, n, args.xtrunc, 2 * (args.prec or
                                                     fixture.precision))
    eng.save_cache()
    mlog = LogMatrix.build(fixture.p, args.xtrunc, 30)
    pair = signed_decompose(la, lp_beta(la), mlog)
    out = {
        "label": fixture.label,
        "level": n,
        "l_p_alpha": la.to_json(),
        "minus": pair.minus.to_json(),
        "plus": pair.plus.to_json(),
        "provenance": prov,
    }
    print(json.dumps(out, sort_keys=True, indent=1))
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="padicbsd",
        description="supersingular p-adic Birch--Swinnerton-Dyer checks "
                    "on elliptic-curve fixtures")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run the full pipeline on a fixture")
    v.add_argument("fixture")
    v.add_argument("--level", type=int, default=None,
                   help="level exponent n (default: 2 for rank 0, 3 otherwise)")
    v.add_argument("--xtrunc", type=int, default=10)
    v.add_argument("--prec", type=int, default=None,
                   help="target p-adic digits (default: fixture precision)")
    v.add_argument("--digits", type=int, default=30,
                   help="working real digits for the integration")
    v.add_argument("--rebuild-cache", action="store_true")
    v.add_argument("--no-cache", action="store_true")
    v.add_argument("--cache-dir", default=None)
    v.add_argument("--report", default=None, help="write the JSON report here")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("selftest", help="randomized identity suites")
    s.add_argument("--count", type=int, default=21)
    s.add_argument("--seed", type=int, default=20250809)
    s.set_defaults(func=cmd_selftest)

    d = sub.add_parser("decompose", help="signed decomposition, standalone")
    d.add_argument("fixture")
    d.add_argument("--level", type=int, default=None)
    d.add_argument("--xtrunc", type=int, default=5)
    d.add_argument("--prec", type=int, default=None)
    d.add_argument("--digits", type=int, default=30)
    d.add_argument("--no-cache", action="store_true")
    d.add_argument("--cache-dir", default=None)
    d.set_defaults(func=cmd_decompose)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
