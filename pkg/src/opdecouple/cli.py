"""Command-line front end.

Subcommands: ``verify`` (identity suite), ``division`` (build a division
kit), ``decouple`` (estimate decoupling constants) and ``sweep`` (parabola
caps over a list of deltas).  Exit codes: 0 success, 1 a check failed,
2 usage, 3 the region is too large for a division kit, 4 invalid partition.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .decoupling import (
    Partition,
    PartitionError,
    equivalence_chain_check,
    estimate_decoupling,
    parabola_partition,
)
from .division import (
    DEFAULT_FLOOR,
    ModulusFloorError,
    OmegaTooLargeError,
    build_division_kit,
    chebyshev_center,
    gaussian_window,
    random_bandlimited_function,
    random_bandlimited_operator,
    reconstruct_function,
    reconstruct_operator,
    relative_residual,
)
from .exponents import format_exponent, parse_exponent
from .phase_space import CellSet, GridSpec
from .verify import TOL, run_suite
from .weyl_rep import ambiguity

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DIVISION = 3
EXIT_PARTITION = 4

# flags that change how a result is produced or stored but never the result
_NOT_RECORDED = {"threads", "out", "func", "command"}

SWEEP_COLUMNS = ("delta", "cells", "classical_lb", "quantum_lb", "c_omega", "seed")


class UsageError(Exception):
    pass


def odd_n(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"n must be an odd integer >= 3, got {text!r}")
    if n < 3 or n % 2 == 0:
        raise argparse.ArgumentTypeError(f"n must be an odd integer >= 3, got {n}")
    return n


def exponent(text: str):
    try:
        return parse_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def deltas(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"deltas must be comma-separated numbers, got {text!r}")
    if not vals or any(not 0 < d <= 1 for d in vals):
        raise argparse.ArgumentTypeError("every delta must lie in (0, 1]")
    if any(a <= b for a, b in zip(vals, vals[1:])):
        raise argparse.ArgumentTypeError("deltas must be strictly descending")
    return vals


def _jsonable(v):
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction) or v == math.inf:
        return format_exponent(v)
    return v


def invocation(args: argparse.Namespace) -> dict:
    """Everything needed to rerun the command; thread count and output path are left out."""
    flags = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in _NOT_RECORDED}
    return {"tool": "opdecouple", "version": __version__, "command": args.command, "flags": flags}


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


# -- region and partition specs -----------------------------------------------------


def _ints(body: str, count: int, what: str) -> list[int]:
    try:
        vals = [int(t) for t in body.split(",")]
    except ValueError:
        raise UsageError(f"{what} expects {count} integers, got {body!r}")
    if len(vals) != count:
        raise UsageError(f"{what} expects {count} integers, got {body!r}")
    return vals


def parse_omega(spec: str, grid: GridSpec) -> CellSet:
    kind, _, body = spec.partition(":")
    if kind == "disk":
        cx, cy, r = _ints(body, 3, "disk")
        if r < 0:
            raise UsageError("disk radius must be >= 0")
        return CellSet.disk(grid, (cx, cy), r)
    if kind == "rect":
        x0, xi0, w, h = _ints(body, 4, "rect")
        try:
            return CellSet.rect(grid, x0, xi0, w, h)
        except ValueError as exc:
            raise UsageError(str(exc))
    if kind == "file":
        try:
            data = json.loads(Path(body).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read region file {body!r}: {exc}")
        try:
            cell = Partition.from_json(data).omega if "cells" in data else CellSet.from_json(data)
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"invalid region file {body!r}: {exc}")
        if cell.grid.n != grid.n:
            raise UsageError(f"region file has n={cell.grid.n}, expected {grid.n}")
        return cell
    raise UsageError(f"omega must be disk:cx,cy,r | rect:x0,xi0,w,h | file:path, got {spec!r}")


def load_partition(spec: str, n: Optional[int], thickness: int) -> Partition:
    """``parabola:delta`` or a partition JSON file (optionally prefixed ``file:``)."""
    if spec.startswith("parabola:"):
        if n is None:
            raise UsageError("--n is required for parabola partitions")
        try:
            delta = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad parabola delta in {spec!r}")
        if not 0 < delta <= 1:
            raise UsageError("parabola delta must lie in (0, 1]")
        return parabola_partition(GridSpec(n), delta, thickness)
    path = Path(spec[5:] if spec.startswith("file:") else spec)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise PartitionError(f"cannot read partition file {str(path)!r}: {exc}")
    try:
        part = Partition.from_json(data)
    except PartitionError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise PartitionError(f"invalid partition file {str(path)!r}: {exc}")
    if n is not None and part.grid.n != n:
        raise PartitionError(f"partition file has n={part.grid.n} but --n {n} was given")
    return part


def _kit_failure(exc: OmegaTooLargeError, omega: CellSet, floor: float) -> str:
    if isinstance(exc, ModulusFloorError):
        return f"error: {exc} (floor {exc.floor:.3e}, achieved {exc.achieved:.3e})"
    center, _ = chebyshev_center(omega)
    g = gaussian_window(omega.grid, center)
    h = gaussian_window(omega.grid, (0, 0))
    achieved = float(np.abs(ambiguity(g, h).values[omega.mask]).min())
    return f"error: {exc}; min |A(g,h)| on omega is {achieved:.3e} against floor {floor:.3e}"


def _kit_summary(kit) -> dict:
    return {
        "c_omega": kit.c_omega,
        "min_modulus": kit.min_modulus,
        "center": [kit.center.x, kit.center.xi],
        "profile": kit.profile,
        "margin": kit.margin,
        "support_radius": kit.support_radius,
        "omega_size": len(kit.omega),
    }


# -- subcommands ---------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_suite(args.n, seed=args.seed, trials=args.trials, tol=TOL)
    for e in report["identities"]:
        status = "PASS" if e["pass"] else "FAIL"
        print(f"{status} {e['name']:<36} max_err={e['max_err']:.3e} tol={e['tol']:.0e}")
    if args.out is not None:
        _emit(_dump({"invocation": invocation(args), "report": report}), args.out)
    return EXIT_OK if report["all_pass"] else EXIT_FAIL


def cmd_division(args: argparse.Namespace) -> int:
    grid = GridSpec(args.n)
    omega = parse_omega(args.omega, grid)
    if len(omega) == 0:
        raise UsageError("omega is empty")
    try:
        kit = build_division_kit(omega, args.bump, args.margin, args.floor)
    except OmegaTooLargeError as exc:
        print(_kit_failure(exc, omega, args.floor), file=sys.stderr)
        return EXIT_DIVISION
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(4,)))
    op_res = max(
        relative_residual(reconstruct_operator(T, kit), T)
        for T in (random_bandlimited_operator(kit, rng) for _ in range(args.probes))
    )
    fn_res = max(
        relative_residual(reconstruct_function(f, kit), f)
        for f in (random_bandlimited_function(kit, rng) for _ in range(args.probes))
    )
    print(f"C(Omega) = {kit.c_omega:.12g}")
    print(f"min_modulus = {kit.min_modulus:.6e}")
    print(f"residual (operators, {args.probes} probes) = {op_res:.3e}")
    print(f"residual (functions, {args.probes} probes) = {fn_res:.3e}")
    if args.out is not None:
        payload = {
            "invocation": invocation(args),
            "summary": dict(_kit_summary(kit), operator_residual=op_res, function_residual=fn_res),
            "kit": kit.to_json(),
        }
        _emit(_dump(payload), args.out)
    return EXIT_OK


def _threads(args) -> int:
    return args.threads if args.threads else (os.cpu_count() or 1)


def cmd_decouple(args: argparse.Namespace) -> int:
    part = load_partition(args.partition, args.n, args.thickness)
    sides = ("classical", "quantum") if args.side == "both" else (args.side,)
    estimates = {}
    for side in sides:
        est = estimate_decoupling(
            part, side, args.p, args.q,
            restarts=args.restarts, iters=args.iters, seed=args.seed, threads=_threads(args),
        )
        estimates[side] = est
        print(f"{side}: lower_bound = {est.lower_bound:.12g} (best restart {est.best_restart})")
    payload = {
        "invocation": invocation(args),
        "partition": part.to_json(),
        "estimates": {side: est.to_json() for side, est in estimates.items()},
    }
    if args.side == "both":
        try:
            kit = build_division_kit(part.omega, args.bump, args.margin, args.floor)
        except OmegaTooLargeError as exc:
            print(_kit_failure(exc, part.omega, args.floor), file=sys.stderr)
            return EXIT_DIVISION
        chain = equivalence_chain_check(part, kit, args.p, args.q, trials=args.trials, seed=args.seed)
        payload["kit"] = _kit_summary(kit)
        payload["chain"] = chain.to_json()
        print(f"C(Omega) = {kit.c_omega:.12g}")
        print(
            f"chain: {chain.violations} violations over {chain.trials} trials per side; "
            f"min ratio slack classical {chain.classical.ratio_min_slack:.3e}, "
            f"quantum {chain.quantum.ratio_min_slack:.3e}"
        )
    if args.out is not None:
        _emit(_dump(payload), args.out)
    if args.side == "both" and payload["chain"]["violations"]:
        return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    grid = GridSpec(args.n)
    buf = io.StringIO()
    buf.write("# invocation: " + json.dumps(invocation(args), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for delta in args.deltas:
        try:
            part = parabola_partition(grid, delta, args.thickness)
        except PartitionError as exc:
            print(f"delta={delta}: skipped ({exc})", file=sys.stderr)
            writer.writerow([repr(delta), "skipped", "skipped", "skipped", "skipped", args.seed])
            continue
        lbs = [
            estimate_decoupling(
                part, side, args.p, args.q,
                restarts=args.restarts, iters=args.iters, seed=args.seed, threads=_threads(args),
            ).lower_bound
            for side in ("classical", "quantum")
        ]
        try:
            c_omega = repr(build_division_kit(part.omega, args.bump, args.margin, args.floor).c_omega)
        except OmegaTooLargeError as exc:
            print(f"delta={delta}: no division kit ({exc})", file=sys.stderr)
            c_omega = "skipped"
        writer.writerow([repr(delta), len(part), repr(lbs[0]), repr(lbs[1]), c_omega, args.seed])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def _kit_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bump", choices=("smooth", "indicator"), default="smooth", help="profile of Psi")
    p.add_argument("--margin", type=int, default=2, help="collar width of the smooth bump")
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR, help="minimum allowed |A(g,h)| on supp Psi")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opdecouple", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the identity and inequality suite")
    p.add_argument("--n", type=odd_n, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("division", help="build a division kit for a region")
    p.add_argument("--n", type=odd_n, required=True)
    p.add_argument("--omega", required=True, help="disk:cx,cy,r | rect:x0,xi0,w,h | file:path")
    _kit_options(p)
    p.add_argument("--probes", type=int, default=5, help="random band-limited probes per kind")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_division)

    p = sub.add_parser("decouple", help="estimate decoupling constants for a partition")
    p.add_argument("--n", type=odd_n, default=None, help="grid size (required for parabola:delta)")
    p.add_argument("--partition", required=True, help="partition JSON path or parabola:delta")
    p.add_argument("--thickness", type=int, default=1, help="parabola thickness in cells")
    p.add_argument("--side", choices=("classical", "quantum", "both"), default="both")
    p.add_argument("--p", type=exponent, required=True)
    p.add_argument("--q", type=exponent, required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--trials", type=int, default=20, help="random families per side for the chain check")
    _kit_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_decouple)

    p = sub.add_parser("sweep", help="parabola-cap lower bounds over descending deltas")
    p.add_argument("--n", type=odd_n, required=True)
    p.add_argument("--p", type=exponent, required=True)
    p.add_argument("--q", type=exponent, default=parse_exponent(2))
    p.add_argument("--deltas", type=deltas, required=True, help="comma-separated, descending, in (0, 1]")
    p.add_argument("--thickness", type=int, default=1)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--iters", type=int, default=200)
    _kit_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("restarts", "iters", "trials", "probes"):
        if getattr(args, name, 0) < 0:
            parser.error(f"--{name} must be >= 0")
    for name in ("thickness", "threads"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            parser.error(f"--{name} must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except PartitionError as exc:
        print(f"error: invalid partition: {exc}", file=sys.stderr)
        return EXIT_PARTITION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
