"""Command line entry point ``ncgx``."""
from __future__ import annotations

import argparse
import json
import sys

from ..errors import NcgxError, SchemaError
from ..hochschild import build_orientation
from ..triples import classify_real_structure
from .fixtures import load_fixture
from .suites import SUITES, Context, emit, exit_status, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncgx", description="Finite-scale checks for spectral triples on crossed products.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a check suite on a fixture")
    v.add_argument("fixture", help="fixture JSON path or bundled fixture name")
    v.add_argument("--suite", default="all", choices=SUITES + ("all",))
    v.add_argument("--format", default="text", choices=("text", "json"))
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tolerance", type=float, default=None)
    k = sub.add_parser("ko", help="print base and crossed KO-dimensions")
    k.add_argument("fixture")
    k.add_argument("--tolerance", type=float, default=None)
    o = sub.add_parser("orient", help="build the crossed orientation cycle")
    o.add_argument("fixture")
    o.add_argument("--g", type=int, default=None, help="group element with l(g) != 0 (default: fixture value)")
    o.add_argument("--tolerance", type=float, default=None)
    return p


def _ko(fx, out) -> int:
    base = fx.base
    if base.J is None:
        print("base triple has no real structure", file=out)
        return EXIT_FAIL
    s = classify_real_structure(base, base.interior(fx.margin("base", 2)))
    print(f"base signs {s.signs} KO {sorted(s.ko_dims)}", file=out)
    if fx.variant is None:
        return EXIT_OK
    r = Context(fx, 0).real()
    print(f"{r.variant}: J_out = {r.row}; measured signs {r.measured.signs} KO {sorted(r.measured.ko_dims)}; "
          f"predicted {r.predicted_ko}", file=out)
    return EXIT_OK


def _orient(fx, g, out) -> int:
    chain, g0 = fx.orientation_chain()
    g = g0 if g is None else g
    res = build_orientation(chain, Context(fx, 0).real(), g, base_algebra=fx.algebra, check=False)
    ok = res.boundary_residual <= 1e-12 and res.pi_residual <= max(fx.tolerance.threshold(), 1e-8)
    print(json.dumps({"g": g, "M": [res.M.real, res.M.imag], "boundary_residual": res.boundary_residual,
                      "pi_residual": res.pi_residual, "margin": res.margin, "chain": res.chain.to_json()},
                     indent=2, sort_keys=True), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    try:
        fx = load_fixture(args.fixture, args.tolerance)
        if args.command == "verify":
            rep = run_suite(fx, args.suite, args.seed)
            data = emit(rep, args.format, fixture=fx.name, suite=args.suite, seed=args.seed,
                        tolerance=fx.tolerance.threshold())
            out.write(data.decode())
            return exit_status(rep)
        if args.command == "ko":
            return _ko(fx, out)
        return _orient(fx, args.g, out)
    except SchemaError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NcgxError as exc:
        print(f"check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
