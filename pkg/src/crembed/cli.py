"""Command-line interface.

Exit codes: 0 when a check ends with ``OBSTRUCTION_SATISFIED`` (or any other
command succeeds), 1 for ``OBSTRUCTED`` (or a failed self-check), 2 for
``INCONCLUSIVE``, 64 for usage errors, 65 for invalid input data and 70 for
internal errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .errors import CrembedError, DSLSyntaxError, GammaTableError, LeviDegenerateError

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_OBSTRUCTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input helpers


def _source_text(args) -> tuple[str, str | None]:
    if args.phi is not None and args.input is not None:
        raise UsageError("give either --phi or --input, not both")
    if args.phi is not None:
        return args.phi, None
    if args.input is not None:
        try:
            return Path(args.input).read_text(), args.input
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from exc
    raise UsageError("a defining function is required (--phi or --input)")


def _germ(args):
    from .hypersurface import parse_defining

    text, path = _source_text(args)
    h = parse_defining(text, args.n)
    return h, text, path


def _config(args, **extra) -> dict:
    keys = ["n", "N", "order", "samples", "seed", "mode", "phi", "input"]
    out = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    out.update(extra)
    return out


def _gamma_version() -> str:
    from .obstruction.gammas import TABLE_VERSION

    return TABLE_VERSION


def _report(command: str, args, result: dict, timings: dict | None = None) -> dict:
    rep = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "gamma_table_version": _gamma_version(),
        "command": command,
        "config": _config(args),
        "result": result,
    }
    if getattr(args, "timings", False) and timings is not None:
        rep["timings"] = {k: round(v, 3) for k, v in timings.items()}
    return rep


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    from .obstruction.pipeline import INCONCLUSIVE, OBSTRUCTED, full_pipeline

    if args.N is None:
        raise UsageError("--N is required")
    if args.N < args.n:
        raise UsageError(f"--N must be at least --n ({args.n})")
    t0 = time.perf_counter()
    h, _, _ = _germ(args)
    t1 = time.perf_counter()
    verdict = full_pipeline(h, args.N, order=args.order, samples=args.samples, seed=args.seed, mode=args.mode)
    t2 = time.perf_counter()
    result = verdict.to_json(timings=args.timings)
    _emit(_report("check", args, result, {"parse": t1 - t0, "pipeline": t2 - t1}), args)
    if verdict.conclusion == OBSTRUCTED:
        return EXIT_OBSTRUCTED
    if verdict.conclusion == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_assoc_pde(args) -> int:
    from .assoc_pde import derive_pde, integrability_residual
    from .hypersurface import levi_determinant, real_to_complex, z_names

    order = args.order
    t0 = time.perf_counter()
    h, _, _ = _germ(args)
    r = real_to_complex(h, order + 2)
    levi = levi_determinant(r)
    if not levi:
        raise LeviDegenerateError("Levi form is degenerate at the base point", levi)
    sys_, _ = derive_pde(r, order)
    t1 = time.perf_counter()
    n = h.n
    phi = {}
    at_z0 = {}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            e = sys_.entry(i, j)
            phi[f"{i}{j}"] = str(e)
            at_z0[f"{i}{j}"] = str(e.restrict_to_zero(z_names(n)))
    integ = integrability_residual(sys_) if n > 1 else None
    result = {
        "germ": h.name,
        "phi": h.text(),
        "levi_determinant": str(levi),
        "rho": str(r.rho),
        "rho_cap": r.rho.cap,
        "pde": phi,
        "pde_at_z0": at_z0,
        "pde_cap": sys_.ring.cap,
        "integrable_to_cap": None if integ is None else integ.is_zero,
    }
    _emit(_report("assoc-pde", args, result, {"derive": t1 - t0}), args)
    return EXIT_OK


def _parse_alphas(text: str, n: int):
    out = []
    for part in text.split(";"):
        vals = tuple(int(x) for x in part.split(",") if x.strip())
        if len(vals) != n:
            raise UsageError(f"multi-index {part!r} must have {n} entries")
        out.append(vals)
    return tuple(out)


def cmd_obstruction(args) -> int:
    from .obstruction.gammas import make_spec
    from .obstruction.matrix import build_matrix, caps_for, determinant_series
    from .obstruction.pipeline import det_operator, sample_points, unique_alpha_sets
    from .assoc_pde import HypersurfaceSource
    from .series import det_exact

    if args.N is None:
        raise UsageError("--N (the layer m) is required")
    if args.N < args.n:
        raise UsageError(f"--N must be at least --n ({args.n})")
    h, _, _ = _germ(args)
    src = HypersurfaceSource(h)
    m = args.N
    choices = [_parse_alphas(args.alphas, args.n)] if args.alphas else unique_alpha_sets(args.n, m)
    points = sample_points(src, args.samples, args.seed) if args.mode in ("point", "both") else []
    ops = []
    t0 = time.perf_counter()
    for alphas in choices:
        spec = make_spec(args.n, m, alphas)
        cap, jet = caps_for(spec)
        mat = build_matrix(spec, src.system(src.origin(), cap, jet)).at_point()
        entry = {
            "operator": spec.to_json(),
            "matrix_at_base_point": [[str(x) for x in row] for row in mat],
            "determinant_at_base_point": str(det_exact(mat)),
        }
        data = det_operator(spec, src, points, None)
        entry["sample_values"] = [str(v) for v in data.values]
        if args.mode in ("series", "both"):
            scap, sjet = caps_for(spec, args.order)
            entry["series"] = determinant_series(spec, src.system(src.origin(), scap, sjet), args.order).to_json()
        ops.append(entry)
    result = {
        "germ": h.name,
        "m": m,
        "sample_points": [{k: str(v) for k, v in p.coords} for p in points],
        "operators": ops,
    }
    _emit(_report("obstruction", args, result, {"operators": time.perf_counter() - t0}), args)
    return EXIT_OK


def cmd_bounds(args) -> int:
    from .bounds import bound_table, mu_of

    N = args.N if args.N is not None else args.n
    if N < args.n or args.n < 1:
        raise UsageError("need N >= n >= 1")
    rows = [r.to_json() for r in bound_table(args.n, N)]
    result = {"rows": rows, "mu": mu_of(args.n, N)}
    _emit(_report("bounds", args, result), args)
    return EXIT_OK


def cmd_wronskian(args) -> int:
    from .dsl import parse_polynomial
    from .hypersurface import z_names
    from .series import Ring, TruncatedSeries
    from .wronskian import VectorFamily, extract_dependence, generic_span_dims, random_point

    text, _ = _source_text(args)
    names = z_names(args.n)
    parts = [p for p in (x.strip() for x in text.replace("\n", " ").split(",")) if p]
    if not parts:
        raise UsageError("no components given")
    polys = [parse_polynomial(p, names) for p in parts]
    deg = max((sum(e) for p in polys for e in p), default=0)
    ring = Ring(tuple(names), deg + args.order + 1)
    fam = VectorFamily(tuple(TruncatedSeries.from_dict(ring, p) for p in polys))
    prof = generic_span_dims(fam, args.order, seed=args.seed)
    q = random_point(ring, random.Random(args.seed))
    lam = extract_dependence(fam, q, max_level=args.order, seed=args.seed)
    result = {
        "components": parts,
        "span_dims": list(prof.dims),
        "stable": prof.stable,
        "dependence": None if lam is None else [str(x) for x in lam],
    }
    _emit(_report("wronskian", args, result), args)
    return EXIT_OK


def cmd_corpus(args) -> int:
    from .hypersurface import corpus, levi_determinant, real_to_complex, verify_certificate
    from .obstruction.pipeline import full_pipeline

    entries = []
    for e in corpus():
        item = {
            "name": e.name,
            "n": e.germ.n,
            "phi": e.germ.text(),
            "note": e.note,
            "levi_determinant": str(levi_determinant(real_to_complex(e.germ, 4))),
            "certificate": None,
        }
        if e.certificate is not None:
            item["certificate"] = {
                "m": e.certificate.m,
                "signature": e.certificate.signature_l,
                "components": [str(c) for c in e.certificate.components],
                "verified_to_order": 10 if verify_certificate(e.germ, e.certificate, 10) else None,
            }
        if args.N is not None and args.N >= e.germ.n:
            v = full_pipeline(e.germ, args.N, order=args.order, samples=args.samples, seed=args.seed, mode=args.mode)
            item["verdict"] = v.conclusion
        entries.append(item)
    _emit(_report("corpus", args, {"entries": entries}), args)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    t0 = time.perf_counter()
    checks = run_selfcheck(quick=args.quick, seed=args.seed)
    if not args.timings:
        for c in checks:
            c.pop("seconds", None)
    ok = all(c["passed"] for c in checks)
    result = {"passed": ok, "quick": args.quick, "checks": checks}
    _emit(_report("selfcheck", args, result, {"total": time.perf_counter() - t0}), args)
    if not ok:
        for c in checks:
            if not c["passed"]:
                print(f"selfcheck: invariant {c['name']} failed: {c['detail']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_OBSTRUCTED


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=1, help="number of complex z variables")
    common.add_argument("--N", type=int, default=None, help="target dimension (hyperquadric in C^{N+1})")
    common.add_argument("--order", type=int, default=4, help="series truncation order")
    common.add_argument("--samples", type=int, default=20, help="number of exact sample points")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--phi", default=None, help="defining function in the polynomial syntax")
    common.add_argument("--input", default=None, help="file holding a defining function")
    common.add_argument("--output", default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--mode", choices=("point", "series", "both"), default="both")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("--gamma-table", default=None, help="use another derivative-row table")

    ap = _Parser(prog="crembed", description="Exact obstructions to embedding hypersurfaces into hyperquadrics.")
    ap.add_argument("--version", action="version", version=f"crembed {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    commands: dict[str, tuple[Callable, str]] = {
        "check": (cmd_check, "run the full obstruction pipeline"),
        "assoc-pde": (cmd_assoc_pde, "print rho and the associated PDE system"),
        "obstruction": (cmd_obstruction, "expose the operator matrices for one layer m = N"),
        "bounds": (cmd_bounds, "order bounds for (n, N)"),
        "wronskian": (cmd_wronskian, "span dimensions and linear dependence of a function family"),
        "corpus": (cmd_corpus, "list the built-in germs and their certificates"),
        "selfcheck": (cmd_selfcheck, "run the invariant suite"),
    }
    for name, (func, help_text) in commands.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        if name == "obstruction":
            p.add_argument("--alphas", default=None, help='row multi-indices, e.g. "1;2;3" or "1,0;0,1;2,0"')
        if name == "selfcheck":
            p.add_argument("--quick", action="store_true", help="run the fast subset")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.n < 1:
        print("crembed: error: --n must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.gamma_table:
        os.environ["CREMBED_GAMMA_TABLE"] = args.gamma_table
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"crembed: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DSLSyntaxError as exc:
        print(f"crembed: syntax error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LeviDegenerateError as exc:
        print(f"crembed: {exc} (determinant {exc.determinant})", file=sys.stderr)
        return EXIT_DATA
    except GammaTableError as exc:
        print(f"crembed: derivative table error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CrembedError as exc:
        print(f"crembed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # pragma: no cover - last resort
        print(f"crembed: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
