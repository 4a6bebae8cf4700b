"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 numerical
failure (``--strict`` with failed paths, or a root finder that did not
converge).
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import re
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, _backend
from .core import InputDomainError, iterate_map, verify_fixed_point
from .enumeration import canonicalize, enumerate_ulam, summarize
from .homotopy import TrackerConfig, default_threads
from .io import dumps, solution_set_to_csv, solution_set_to_json
from .oracle import RationalTuple, exact_verify_rational, multistart_newton
from .polyroots import MonicPoly, RootFindError, roots_aberth, verify_ulam_by_roots

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("ulampoly")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_COMPLEX_RE = re.compile(r"^[0-9eE.+\-ij]+$")


def parse_complex(text: str) -> complex:
    """``"1.5"``, ``"-2"``, ``"1+2i"``, ``"3e-4-1i"``, ``"2i"`` (``j`` also accepted)."""
    s = text.strip().replace(" ", "")
    if not s or not _COMPLEX_RE.match(s):
        raise UsageError(f"not a complex literal: {text!r}")
    try:
        z = complex(s.replace("i", "j"))
    except ValueError:
        raise UsageError(f"not a complex literal: {text!r}") from None
    if not np.isfinite(z):
        raise UsageError(f"non-finite value: {text!r}")
    return z


def parse_tuple(text: str) -> np.ndarray:
    parts = [p for p in text.split(",")]
    if not parts or any(not p.strip() for p in parts):
        raise UsageError(f"empty entry in tuple {text!r}")
    return np.array([parse_complex(p) for p in parts], dtype=np.complex128)


def _cvec_dict(x) -> dict:
    return {"re": [float(v) for v in np.real(x)], "im": [float(v) for v in np.imag(x)]}


def _config_overrides(pairs) -> dict:
    fields = {f.name: f for f in dataclasses.fields(TrackerConfig)}
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in fields or key == "seed":
            raise UsageError(f"bad --config entry {item!r}; keys: {sorted(set(fields) - {'seed'})}")
        default = getattr(TrackerConfig(), key)
        try:
            if isinstance(default, bool):
                if value.lower() not in ("true", "false", "1", "0"):
                    raise ValueError(value)
                out[key] = value.lower() in ("true", "1")
            else:
                out[key] = type(default)(value)
        except ValueError:
            raise UsageError(f"bad value for {key}: {value!r}") from None
    return out


def _tracker_config(args) -> TrackerConfig:
    try:
        return TrackerConfig(seed=args.seed, **_config_overrides(args.config))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _manifest(command: str, args, degree=None, seed=None, config=None, started=None) -> dict:
    man = {
        "command": command,
        "degree": degree,
        "seed": seed,
        "config": config or {},
        "tool": "ulampoly",
        "version": __version__,
        "backend": _backend.BACKEND,
    }
    if getattr(args, "timing", False) and started is not None:
        man["duration_s"] = time.perf_counter() - started
    return man


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_enumerate(args) -> int:
    started = time.perf_counter()
    cfg = _tracker_config(args)
    if not 1 <= args.n <= 8:
        raise UsageError("-n must be between 1 and 8")
    threads = args.threads if args.threads is not None else default_threads()
    sset = enumerate_ulam(args.n, cfg, threads=threads)
    summary = summarize(sset)
    print(
        f"U_{args.n}: {summary['total']} solutions, {summary['real']} real, "
        f"{summary['real_nontrivial']} real nontrivial; paths {sset.path_stats}"
        + ("; origin present" if summary["origin_present"] else ""),
        file=sys.stderr,
    )
    if args.format == "csv":
        _emit(solution_set_to_csv(sset), args.out)
    else:
        man = _manifest("enumerate", args, args.n, cfg.seed, cfg.to_dict(), started)
        _emit(solution_set_to_json(sset, man), args.out)
    if args.strict and (sset.path_stats["max_steps"] or sset.path_stats["singular"]):
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    exact = None
    if args.exact:
        try:
            rt = RationalTuple.parse(args.tuple)
        except (ValueError, ZeroDivisionError):
            raise UsageError("--exact needs rational entries such as 1,-2,3/4") from None
        exact = exact_verify_rational(rt)
        x = rt.to_cvec()
    else:
        x = parse_tuple(args.tuple)
    ok, norm = verify_fixed_point(x, args.tol)
    try:
        roots_ok = verify_ulam_by_roots(x, tol=args.roots_tol)
    except RootFindError:
        roots_ok = None
    doc = {
        "tuple": _cvec_dict(x),
        "residual": norm,
        "tol": args.tol,
        "fixed_point": ok,
        "roots_match": roots_ok,
        "roots_tol": args.roots_tol,
        "exact": exact,
        "manifest": _manifest("verify", args, int(x.size), started=started),
    }
    _emit(dumps(doc) + "\n", args.out)
    verdict = exact if exact is not None else ok
    return EXIT_OK if verdict else EXIT_VERIFY


def _cmd_orbit(args) -> int:
    started = time.perf_counter()
    if args.iters < 0:
        raise UsageError("--iters must be non-negative")
    x = parse_tuple(args.tuple)
    orbit = iterate_map(x, args.iters)
    doc = {
        "points": [_cvec_dict(p) for p in orbit.points],
        "diverged": orbit.diverged,
        "manifest": _manifest("orbit", args, int(x.size), started=started),
    }
    _emit(dumps(doc) + "\n", args.out)
    return EXIT_OK


def _cmd_roots(args) -> int:
    started = time.perf_counter()
    c = parse_tuple(args.coeffs)
    try:
        roots = roots_aberth(MonicPoly(c))
        converged = True
    except RootFindError as exc:
        roots, converged = exc.best, False
    order = sorted(range(len(roots)), key=lambda i: (round(roots[i].real, 9) + 0.0, round(roots[i].imag, 9) + 0.0))
    roots = np.asarray(roots)[order]
    doc = {
        "coeffs": _cvec_dict(c),
        "roots": _cvec_dict(roots),
        "converged": converged,
        "manifest": _manifest("roots", args, int(c.size), started=started),
    }
    _emit(dumps(doc) + "\n", args.out)
    return EXIT_OK if converged else EXIT_NUMERIC


def _cmd_oracle(args) -> int:
    started = time.perf_counter()
    cfg = _tracker_config(args)
    if not 1 <= args.n <= 10:
        raise UsageError("-n must be between 1 and 10")
    if args.starts < 1 or not args.radius > 0:
        raise UsageError("--starts must be >= 1 and --radius > 0")
    sset = multistart_newton(args.n, args.starts, args.radius, seed=args.seed, cfg=cfg)
    man = _manifest("oracle", args, args.n, args.seed, sset.config, started)
    if args.format == "csv":
        _emit(solution_set_to_csv(sset), args.out)
    else:
        _emit(solution_set_to_json(sset, man), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ulampoly", description="Enumerate and verify Ulam polynomials.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write results to this file instead of stdout")
        sp.add_argument("--timing", action="store_true",
                        help="record wall-clock duration in the manifest (output no longer byte-stable)")

    e = sub.add_parser("enumerate", help="track all n! paths and report U_n")
    e.add_argument("-n", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--format", choices=("json", "csv"), default="json")
    e.add_argument("--strict", action="store_true", help="exit 3 if any path hit max_steps or ended singular")
    e.add_argument("--threads", type=int, default=None, help="worker threads (default: $ULAM_THREADS or all cores)")
    e.add_argument("--config", action="append", metavar="KEY=VALUE", help="override a tracker setting")
    common(e)
    e.set_defaults(func=_cmd_enumerate)

    v = sub.add_parser("verify", help="check whether a tuple is a fixed point")
    v.add_argument("--tuple", required=True, help='comma-separated entries, e.g. "1,-1,-1" or "0.5+1i,2"')
    v.add_argument("--exact", action="store_true", help="decide with exact rational arithmetic")
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--roots-tol", type=float, default=1e-6)
    common(v)
    v.set_defaults(func=_cmd_verify)

    o = sub.add_parser("orbit", help="iterate the Ulam map")
    o.add_argument("--tuple", required=True)
    o.add_argument("--iters", type=int, required=True)
    common(o)
    o.set_defaults(func=_cmd_orbit)

    r = sub.add_parser("roots", help="roots of z^n + c_1 z^(n-1) + ... + c_n")
    r.add_argument("--coeffs", required=True)
    common(r)
    r.set_defaults(func=_cmd_roots)

    m = sub.add_parser("oracle", help="multistart Newton search")
    m.add_argument("-n", type=int, required=True)
    m.add_argument("--starts", type=int, default=20000)
    m.add_argument("--radius", type=float, default=3.0)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--format", choices=("json", "csv"), default="json")
    m.add_argument("--config", action="append", metavar="KEY=VALUE", help="override a tracker setting")
    common(m)
    m.set_defaults(func=_cmd_oracle)
    return p


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except InputDomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command())
