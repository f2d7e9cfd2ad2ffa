"""Command-line front end.

    fpconv endpoint  --mu SPEC --nu SPEC
    fpconv potential --mu SPEC --nu SPEC (--z Z | --z-grid A:B:N)
    fpconv stieltjes --mu SPEC --nu SPEC (--z Z | --z-grid A:B:N)
    fpconv profile   --mu SPEC --nu SPEC --kind {e,f,ginv,j} [--z Z] [--grid A:B:N] --out DIR
    fpconv mc        --mu sc:B|mp:B --nu SPEC --n N --trials T --seed S [--z Z] [--out DIR]
    fpconv selftest  [--only 1,2,...]

A measure SPEC is inline JSON, ``@file.json``, or a shorthand token:
``sc``, ``sc:BETA``, ``mp:BETA``, ``delta:A``, ``atoms:X@W,X@W,...``,
``jacobi:A,B,P,Q``; for ``--mu`` also ``rpoly:K1,K2,...`` (R-transform
coefficients).  Exit status: 2 configuration error, 3 domain error,
1 failed self-test or verification.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__, freeconv
from . import potential as pot
from .errors import ConfigError, DomainError, MeasureSpecError, VerificationError
from .freeconv import conv_stieltjes, endpoint_summary
from .measures import measure_from_json
from .rtransform import RTransformReal

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# JSON with fixed formatting


def _num(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON text with floats at 17 significant digits and infinities as strings."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, int):
        return str(obj)
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):
        return dumps(obj.item())
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ---------------------------------------------------------------------------
# argument parsing helpers


def _floats(text: str, sep: str = ",") -> list[float]:
    try:
        return [float(t) for t in text.split(sep)]
    except ValueError:
        raise MeasureSpecError(f"bad number list {text!r}") from None


def expand_shorthand(token: str) -> dict:
    """Canonical JSON dict for a shorthand measure token."""
    name, _, arg = token.partition(":")
    name = name.strip().lower()
    if name == "sc":
        return {"type": "semicircle", "beta": _floats(arg)[0] if arg else 1.0}
    if name == "mp":
        return {"type": "marchenko_pastur", "beta": _floats(arg)[0] if arg else 1.0}
    if name == "delta":
        return {"type": "atomic", "atoms": [[_floats(arg)[0] if arg else 0.0, 1.0]]}
    if name == "atoms":
        atoms = []
        for item in arg.split(","):
            x, _, w = item.partition("@")
            atoms.append([_floats(x)[0], _floats(w)[0] if w else None])
        if any(w is None for _, w in atoms):
            atoms = [[x, 1.0 / len(atoms)] for x, _ in atoms]
        return {"type": "atomic", "atoms": atoms}
    if name == "jacobi":
        vals = _floats(arg)
        if len(vals) != 4:
            raise MeasureSpecError("jacobi shorthand needs A,B,P,Q")
        return dict(zip(("type", "a", "b", "p", "q"), ["jacobi", *vals]))
    if name == "rpoly":
        return {"type": "r_polynomial", "coeffs": _floats(arg)}
    raise MeasureSpecError(f"unknown measure token {token!r}")


def parse_measure(text: str, allow_rpoly: bool = False):
    text = text.strip()
    if text.startswith("@"):
        try:
            with open(text[1:]) as fh:
                text = fh.read().strip()
        except OSError as exc:
            raise ConfigError(f"cannot read {text[1:]!r}: {exc.strerror}") from None
    obj = json.loads(text) if text.startswith("{") else expand_shorthand(text)
    if isinstance(obj, dict) and obj.get("type") == "r_polynomial":
        if not allow_rpoly:
            raise MeasureSpecError("an R-transform polynomial is only accepted for --mu")
        coeffs = obj.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise MeasureSpecError("r_polynomial needs a non-empty 'coeffs' list")
        return RTransformReal.from_polynomial(coeffs)
    return measure_from_json(obj)


def parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid {text!r} is not START:STOP:COUNT")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"grid {text!r} is not START:STOP:COUNT") from None
    if n < 1 or (n > 1 and not a < b) or not (math.isfinite(a) and math.isfinite(b)):
        raise ConfigError(f"grid {text!r} must be strictly increasing with COUNT >= 1")
    return a, b, n


def z_values(args) -> list[float]:
    if args.z is not None and args.z_grid is not None:
        raise ConfigError("give either --z or --z-grid, not both")
    if args.z is not None:
        return [args.z]
    if args.z_grid is not None:
        a, b, n = parse_grid(args.z_grid)
        return [a] if n == 1 else [a + (b - a) * i / (n - 1) for i in range(n)]
    raise ConfigError("this subcommand needs --z or --z-grid")


TOL_NAMES = ("agreement", "touch")


def apply_tolerances(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        name, eq, val = item.partition("=")
        if not eq or name not in TOL_NAMES:
            raise ConfigError(f"bad --tol {item!r}; known names: {', '.join(TOL_NAMES)}")
        try:
            v = float(val)
        except ValueError:
            raise ConfigError(f"bad --tol value {val!r}") from None
        if not v > 0:
            raise ConfigError("tolerances must be positive")
        out[name] = v
    if "agreement" in out:
        pot.AGREEMENT_TOL = out["agreement"]
    if "touch" in out:
        freeconv.TOUCH_TOL = out["touch"]
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_endpoint(args, out) -> int:
    mu = parse_measure(args.mu, allow_rpoly=True)
    nu = parse_measure(args.nu)
    out(dumps(endpoint_summary(mu, nu).to_json()))
    return EXIT_OK


def cmd_potential(args, out) -> int:
    mu = parse_measure(args.mu, allow_rpoly=True)
    nu = parse_measure(args.nu)
    zs = z_values(args)
    rows = [pot.u_variational(mu, nu, z, verify=not args.no_verify).to_json() for z in zs]
    out(dumps(rows[0] if args.z is not None else rows))
    return EXIT_OK


def cmd_stieltjes(args, out) -> int:
    mu = parse_measure(args.mu, allow_rpoly=True)
    nu = parse_measure(args.nu)
    rows = []
    for z in z_values(args):
        g, h = conv_stieltjes(mu, nu, z)
        rows.append({"z": z, "g": g, "h_less": h})
    out(dumps(rows[0] if args.z is not None else rows))
    return EXIT_OK


def cmd_profile(args, out) -> int:
    mu = parse_measure(args.mu, allow_rpoly=True)
    nu = parse_measure(args.nu)
    grid = parse_grid(args.grid) if args.grid else None
    table = pot.emit_profile(mu, nu, args.z, args.kind, grid)
    main, ann = table.write_csv(args.out)
    out(dumps({
        "kind": table.kind.value,
        "points": int(len(table.abscissa)),
        "csv": main,
        "annotations_csv": ann,
        "annotations": [{"abscissa": x, "value": y, "kind": k} for x, y, k in table.annotations],
    }))
    return EXIT_OK


def cmd_mc(args, out) -> int:
    from .montecarlo import EnsembleSpec, run_ensemble

    mu = parse_measure(args.mu)
    nu = parse_measure(args.nu)
    kind = {"semicircle": "GOE", "marchenko_pastur": "Wishart"}.get(getattr(mu, "kind", ""))
    if kind is None:
        raise ConfigError("mc needs --mu sc:BETA (GOE) or mp:BETA (Wishart)")
    spec = EnsembleSpec(kind, mu.beta, nu, args.n, args.trials, args.seed)
    run = run_ensemble(spec, args.z, workers=args.workers)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "mc_trials.csv"), "w") as fh:
            fh.write(run.csv_text())
        with open(os.path.join(args.out, "mc_summary.json"), "w") as fh:
            fh.write(dumps(run.summary()) + "\n")
    out(dumps(run.summary()))
    return EXIT_OK


def cmd_selftest(args, out) -> int:
    from .acceptance import run_all

    only = [int(t) for t in args.only.split(",")] if args.only else None
    results = run_all(only, echo=out)
    failed = [r for r in results if not (r.passed and r.within_budget)]
    out(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fpconv", description="Edges, Stieltjes transforms and log-potentials of free additive convolutions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pair(sp):
        sp.add_argument("--mu", required=True, help="first measure (or rpoly:...)")
        sp.add_argument("--nu", required=True, help="second measure")
        sp.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override (agreement, touch)")

    def zs(sp):
        sp.add_argument("--z", type=float)
        sp.add_argument("--z-grid", dest="z_grid", metavar="START:STOP:COUNT")

    sp = sub.add_parser("endpoint", help="h*, g*, z* of mu [+] nu")
    pair(sp)
    sp.set_defaults(func=cmd_endpoint)

    sp = sub.add_parser("potential", help="log-potential of mu [+] nu left of the edge")
    pair(sp)
    zs(sp)
    sp.add_argument("--no-verify", action="store_true", help="skip the bounded-minimisation cross-check")
    sp.set_defaults(func=cmd_potential)

    sp = sub.add_parser("stieltjes", help="Stieltjes transform of mu [+] nu left of the edge")
    pair(sp)
    zs(sp)
    sp.set_defaults(func=cmd_stieltjes)

    sp = sub.add_parser("profile", help="write E/F/G^[-1]/J profile CSVs")
    pair(sp)
    sp.add_argument("--kind", required=True, choices=[k.value for k in pot.ProfileKind])
    sp.add_argument("--z", type=float)
    sp.add_argument("--grid", metavar="START:STOP:COUNT", help="sampling grid of the abscissa")
    sp.add_argument("--out", required=True, metavar="DIR")
    sp.set_defaults(func=cmd_profile)

    sp = sub.add_parser("mc", help="random-matrix check of edge and potential")
    sp.add_argument("--mu", required=True, help="sc:BETA (GOE) or mp:BETA (Wishart)")
    sp.add_argument("--nu", required=True)
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--z", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", metavar="DIR")
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("selftest", help="run the acceptance suite")
    sp.add_argument("--only", metavar="1,2,...", help="subset of criteria")
    sp.set_defaults(func=cmd_selftest)
    return p


def _attach_values(argv: list[str]) -> list[str]:
    """Let grid values start with '-' (``--z-grid -5:-3:10``)."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--z-grid", "--grid") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        if getattr(args, "tol", None):
            apply_tolerances(args.tol)
        return args.func(args, print)
    except json.JSONDecodeError as exc:
        print(f"fpconv: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"fpconv: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"fpconv: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except VerificationError as exc:
        print(f"fpconv: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
