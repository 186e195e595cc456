"""Command line front-end.

Exit codes: 0 success (all checks pass), 1 verification failure,
2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .energy import energy_profile, kinetic_energy
from .fields_io import FieldFileError, GeneratorSpec, Kind, generate, load_field_with_header, save_field
from .spectral import FourierVectorField, SpectralGrid, l2_norm_sq
from .subsolution import evolve_fractional_heat, make_snapshot
from .verifier import VerifyConfig, full_report
from .weakform import (
    TestFunction,
    observed_order,
    refinement_study,
    steady_shear,
    subsolution_candidate,
    zero_candidate,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def fmt(x: float) -> str:
    return f"{x:.17g}"


class _IOFailure(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text!r}")


def _load(path):
    try:
        return load_field_with_header(path)
    except (OSError, FieldFileError) as exc:
        raise _IOFailure(f"cannot read field file {path}: {exc}") from exc


def _save(field, path, **kwargs):
    try:
        save_field(field, path, **kwargs)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from exc


def _write_text(text: str, path):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from exc


def cmd_generate(args, parser) -> int:
    try:
        grid = SpectralGrid(args.dim, args.modes)
        spec = GeneratorSpec(
            kind=args.kind,
            seed=args.seed,
            decay=args.decay,
            kmax=args.kmax,
            amplitude=args.amplitude,
            mode=tuple(args.mode) if args.mode else None,
            polarization=tuple(args.polarization) if args.polarization else None,
        )
        field = generate(spec, grid)
    except ValueError as exc:
        parser.error(str(exc))
    _save(field, args.out, seed=args.seed)
    print(f"generated {spec.kind.value} d={grid.d} n={grid.n} norm_sq={fmt(l2_norm_sq(field))} -> {args.out}")
    return EXIT_OK


def cmd_evolve(args, parser) -> int:
    if args.time < 0:
        parser.error("--time must be >= 0")
    field, header = _load(args.inp)
    evolved = evolve_fractional_heat(field, args.time)
    _save(evolved, args.out, seed=header.seed)
    print(f"evolved to t={fmt(args.time)} norm_sq={fmt(l2_norm_sq(evolved))} -> {args.out}")
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    times = args.times
    if not times or any(not math.isfinite(t) or t <= 0 for t in times):
        parser.error(f"--times must be a non-empty list of positive times, got {times}")
    field, header = _load(args.inp)
    config = VerifyConfig(
        oversample=args.oversample,
        tol_algebraic=args.tol_algebraic,
        tol_quadrature=args.tol_quadrature,
    )
    report = full_report(field, times, config)
    if header.solenoidal and not field.solenoidal:
        print("warning: header flags the field solenoidal but its coefficients are not", file=sys.stderr)
    if args.report:
        _write_text(report.to_json() + "\n", args.report)
    for name, ok in report.passes.items():
        print(f"{name}: {'PASS' if ok else 'FAIL'}")
    print(f"min_margin: {fmt(report.min_margin)}")
    print(f"residual_max: {fmt(report.residual_max)}")
    return EXIT_OK if report.passes["all"] else EXIT_FAIL


def cmd_energy_profile(args, parser) -> int:
    if args.t_count < 1:
        parser.error("--t-count must be >= 1")
    if args.t_start <= 0:
        parser.error("--t-start must be positive (profiles are defined for t > 0)")
    if args.t_end < args.t_start:
        parser.error("--t-end must be >= --t-start")
    if args.log_spacing:
        times = np.geomspace(args.t_start, args.t_end, args.t_count)
    else:
        times = np.linspace(args.t_start, args.t_end, args.t_count)
    field, _ = _load(args.inp)
    grid = field.grid
    rows = []
    for t in times:
        snap = make_snapshot(field, float(t), check=False)
        prof = energy_profile(snap, args.oversample)
        rows.append((float(t), kinetic_energy(snap.vbar), prof.base_integral(), prof.bump, prof.integral()))

    lines = [
        f"# d={grid.d} n={grid.n} oversample={args.oversample} volume={fmt(grid.volume)}",
        "t,E_vbar,int_e,bump,int_ebar",
    ]
    lines += [",".join(fmt(x) for x in row) for row in rows]
    e_vals = [r[1] for r in rows]
    ebar_tail = [r[4] for r in rows if r[0] >= 1.0]
    lines.append(f"# E_vbar nonincreasing: {str(all(b <= a for a, b in zip(e_vals, e_vals[1:]))).lower()}")
    lines.append(
        f"# int_ebar strictly decreasing for t >= 1: {str(all(b < a for a, b in zip(ebar_tail, ebar_tail[1:]))).lower()}"
    )
    _write_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_weakform(args, parser) -> int:
    try:
        phi = TestFunction(tuple(args.phi_k), tuple(args.phi_a), args.horizon, args.phase, args.window)
    except ValueError as exc:
        parser.error(str(exc))
    if any(s < 2 or s % 2 for s in args.steps):
        parser.error("--steps entries must be even and >= 2")
    if args.inp:
        v0, _ = _load(args.inp)
        grid = v0.grid
    else:
        try:
            grid = SpectralGrid(args.dim, args.modes)
        except ValueError as exc:
            parser.error(str(exc))
        if args.candidate == "subsolution":
            parser.error("--candidate subsolution needs --in")
        kind = Kind.SHEAR if args.candidate == "shear" else None
        v0 = generate(GeneratorSpec(kind), grid) if kind else FourierVectorField.zeros(grid)
    if len(phi.k) != grid.d:
        parser.error(f"--phi-k has {len(phi.k)} entries, field dimension is {grid.d}")
    fine = grid.refined(args.oversample)
    candidate = {
        "shear": lambda: steady_shear(fine),
        "zero": lambda: zero_candidate(fine),
        "subsolution": lambda: subsolution_candidate(v0, fine),
    }[args.candidate]()
    levels = refinement_study(candidate, v0, phi, fine, args.steps)
    print(f"# candidate={args.candidate} k={phi.k} a={phi.a} horizon={fmt(phi.horizon)} window={phi.window}")
    print("steps,residual,order")
    for lvl in levels:
        print(f"{lvl.steps},{fmt(lvl.residual)},{'' if lvl.order is None else fmt(lvl.order)}")
    order = observed_order(levels, floor=1e-13 * max(1.0, math.sqrt(l2_norm_sq(v0))))
    print(f"# observed_order={'nan' if order is None else fmt(order)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eulersub", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write solenoidal initial data to a field file")
    p.add_argument("--kind", choices=[k.value for k in Kind], default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--modes", type=int, default=32)
    p.add_argument("--decay", type=float, default=2.0)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--mode", type=_ints, default=None, help="wavenumber for single_mode, e.g. 1,0")
    p.add_argument("--polarization", type=_floats, default=None, help="vector for single_mode, e.g. 0,1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evolve", help="apply the fractional heat flow to a field file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", help="certify the subsolution hypotheses for a field file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--times", type=_floats, default=[0.1, 1.0, 10.0])
    p.add_argument("--oversample", type=int, default=2)
    p.add_argument("--tol-algebraic", type=float, default=1e-12)
    p.add_argument("--tol-quadrature", type=float, default=1e-10)
    p.add_argument("--report", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("energy-profile", help="CSV of energies along a time grid")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--t-start", type=float, default=0.1)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--t-count", type=int, default=31)
    p.add_argument("--log-spacing", action="store_true")
    p.add_argument("--oversample", type=int, default=2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_energy_profile)

    p = sub.add_parser("weakform", help="weak-form residuals under time refinement")
    p.add_argument("--candidate", choices=["shear", "zero", "subsolution"], required=True)
    p.add_argument("--in", dest="inp", default=None)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--modes", type=int, default=16)
    p.add_argument("--phi-k", type=_ints, default=[0, 1])
    p.add_argument("--phi-a", type=_floats, default=[1.0, 0.0])
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--window", choices=["initial", "centered"], default="initial")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--steps", type=_ints, default=[8, 16, 32, 64, 128, 256])
    p.add_argument("--oversample", type=int, default=2)
    p.set_defaults(func=cmd_weakform)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "oversample", 1) < 1:
        parser.error("--oversample must be >= 1")
    try:
        return args.func(args, parser)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
