"""Command-line front end: ``rkcond <command> [flags]``.

Exit codes: 0 success (also with warnings), 2 usage or input errors,
3 when a grid node or contour node hits the spectrum, 4 on overflow.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .contour import (
    contour_crosscheck,
    fit_regime,
    norm_sequence,
    sequence_csv,
)
from .errors import DomainError, InsufficientData, OverflowGuard, SingularResolvent
from .growth import (
    EXP_DECAY,
    classify_differences,
    classify_powers,
    is_ritt,
    no_power_bounded_pair_witness,
    regime_le,
)
from .linalg_core import is_triangular, read_matrix, triangular_spectrum
from .regions import boundary_points, check_spectrum, kreiss_floor_ok, region_for
from .report import (
    FIGURE_CASES,
    FIGURE_POINTS,
    boundary_csv,
    dumps,
    render_powers_svg,
    render_region_svg,
)
from .rk_condition import DEFAULT_SAFETY, LambdaGrid, RKParams, estimate_min_c, torus_constant
from .zoo import PRESETS, interpolate_rk, preset

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_OVERFLOW = 0, 2, 3, 4
PARAM_MAX = 8.0
DIVERGENCE_FACTOR = 10.0
CROSSCHECK_N_CAP = 1000
SLOPE_SLACK = 0.1


class UsageError(Exception):
    pass


# -- ledger flags attached to JSON reports ------------------------------------


def ledger_flags(alpha: float, beta: float) -> list[str]:
    flags = []
    powers = classify_powers(alpha, beta)
    if powers.kind == EXP_DECAY:
        flags.append("differences-inherit-exp-decay")
    else:
        flags.append("j-integral-exponent-2-minus-gamma")
    if powers.case == "4.2.2" and abs((1 / alpha - math.floor(1 / alpha)) - (alpha + beta - 1) / alpha) <= 1e-12:
        flags.append("case-4.2-tie-resolved-as-4.2.2")
    if beta < 1 and alpha == 0:
        flags.append("omega-gap-exponent-zero")
    if is_ritt(alpha, beta):
        flags.append("sum-one-log-free-difference-rate")
    return flags


# -- helpers ------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _param(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return v


def _emit(text: str | bytes, out: str | None) -> None:
    if out:
        data = text.encode("utf-8") if isinstance(text, str) else text
        Path(out).write_bytes(data)
        return
    if isinstance(text, bytes):
        sys.stdout.buffer.write(text)
        sys.stdout.buffer.flush()
    else:
        sys.stdout.write(text)


def _check_range(alpha: float, beta: float) -> None:
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not 0 <= v <= PARAM_MAX:
            raise UsageError(f"{name} must lie in [0, {PARAM_MAX:g}], got {v}")


def _preset_kwargs(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"--preset-arg expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load_operator(args):
    """``(matrix, spectrum or None, label)`` from a matrix file or a preset."""
    if bool(args.matrix) == bool(args.preset):
        raise UsageError("give exactly one of a matrix file or --preset")
    if args.preset:
        kw = _preset_kwargs(args.preset_arg)
        if "points" in kw:
            kw["points"] = [complex(s) for s in kw["points"].split(";")]
        p = preset(args.preset, **kw)
        return p.matrix, p.spectrum, f"preset:{p.name}"
    try:
        mat, spec = read_matrix(args.matrix)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read matrix file {args.matrix}: {exc}") from exc
    if spec is None and is_triangular(mat):
        spec = triangular_spectrum(mat)
    return mat, spec, str(args.matrix)


def _regime_doc(r) -> dict:
    d = r.as_dict()
    d["rate"] = r.describe()
    return d


# -- commands -----------------------------------------------------------------


def cmd_classify(args) -> int:
    _check_range(args.alpha, args.beta)
    a, b = args.alpha, args.beta
    powers = classify_powers(a, b)
    diffs = classify_differences(a, b)
    doc = {
        "command": "classify",
        "alpha": a,
        "beta": b,
        "case": powers.case,
        "optimal_k": powers.optimal_k,
        "is_ritt": is_ritt(a, b),
        "powers": _regime_doc(powers),
        "differences": _regime_doc(diffs),
        "notes": [powers.source, diffs.source, no_power_bounded_pair_witness(a, b).explanation],
        "ledger_flags": ledger_flags(a, b),
    }
    if args.c is not None:
        params = RKParams(a, b, args.c)
        doc["c"] = args.c
        doc["region"] = region_for(params).as_dict()
        if b < 1:
            doc["torus_constant"] = torus_constant(params)
            doc["kreiss_floor_ok"] = kreiss_floor_ok(params)
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_region(args) -> int:
    if args.points < 16:
        raise UsageError("--points must be >= 16")
    params = RKParams(args.alpha, args.beta, args.c)
    region = region_for(params)
    if args.beta >= 1:
        print("warning: beta >= 1 gives only the closed unit disk", file=sys.stderr)
    if args.format == "svg":
        _emit(render_region_svg(params, args.points, workers=args.threads), args.out)
    elif args.format == "csv":
        _emit(boundary_csv(boundary_points(region, args.points, workers=args.threads)), args.out)
    else:
        doc = {
            "command": "region",
            "params": params.as_dict(),
            "case": classify_powers(args.alpha, args.beta).case,
            "region": region.as_dict(),
            "boundary": boundary_points(region, args.points, workers=args.threads),
            "ledger_flags": ledger_flags(args.alpha, args.beta),
        }
        if args.beta >= 1:
            doc["warning"] = "beta >= 1: trivial region"
        _emit(dumps(doc), args.out)
    return EXIT_OK


def _grid_from_args(args) -> LambdaGrid:
    return LambdaGrid.make(args.radii, args.angles, args.min_offset, args.max_offset)


def cmd_verify(args) -> int:
    _check_range(args.alpha, args.beta)
    mat, spectrum, label = _load_operator(args)
    grid = _grid_from_args(args)
    est = estimate_min_c(mat, args.alpha, args.beta, grid, workers=args.threads)
    doc = {
        "command": "verify",
        "operator": label,
        "dim": int(mat.shape[0]),
        "alpha": args.alpha,
        "beta": args.beta,
        "case": classify_powers(args.alpha, args.beta).case,
        "c_hat": est.c_hat,
        "argmax": est.argmax,
        "grid": {"radii": len(grid.radii), "angles": len(grid.angles),
                 "min_offset": args.min_offset, "max_offset": args.max_offset},
        "notes": [],
        "ledger_flags": ledger_flags(args.alpha, args.beta),
    }
    finite = True
    if not args.no_probe:
        try:
            fine_c = estimate_min_c(mat, args.alpha, args.beta, grid.refined(), workers=args.threads).c_hat
        except SingularResolvent as exc:
            # the refined grid reached the numerical spectrum: the ratio is unbounded there
            fine_c = math.inf
            doc["notes"].append(f"refined grid hit a numerically singular point at {exc.lam!r}")
        growth = fine_c / est.c_hat
        finite = growth < DIVERGENCE_FACTOR
        doc["refined_c_hat"] = fine_c
        doc["refinement_growth"] = growth
        if not finite:
            doc["notes"].append("no finite C at tested resolution")
    doc["finite_c"] = finite
    params = RKParams(args.alpha, args.beta, max(1.0, args.safety * est.c_hat))
    doc["c_used"] = params.c
    if args.beta < 1:
        doc["torus_constant"] = torus_constant(params)
    region = region_for(params)
    doc["region"] = region.as_dict()
    if spectrum is None:
        doc["spectrum_check"] = None
        doc["notes"].append("matrix is not triangular and no spectrum was supplied; inclusion not checked")
    else:
        doc["spectrum_check"] = check_spectrum(spectrum, region, args.tol).as_dict()
    _emit(dumps(doc), args.out)
    return EXIT_OK


def _crosscheck_ns(n_max: int) -> list[int]:
    top = min(n_max, CROSSCHECK_N_CAP)
    return sorted({int(round(x)) for x in np.geomspace(1, top, 5)})


def _powers_summary(mat, rep, args, label) -> dict:
    doc = {
        "command": "powers",
        "operator": label,
        "n_max": args.n_max,
        "report": rep.as_dict(),
    }
    try:
        p_reg, d_reg = fit_regime(rep)
        doc["fitted_powers"] = _regime_doc(p_reg)
        doc["fitted_differences"] = _regime_doc(d_reg)
    except InsufficientData as exc:
        p_reg = None
        doc["fitted_powers"] = None
        doc["fitted_differences"] = None
        doc["fit_note"] = str(exc)
    if args.alpha is not None and args.beta is not None:
        _check_range(args.alpha, args.beta)
        predicted = classify_powers(args.alpha, args.beta)
        doc["case"] = predicted.case
        doc["predicted_powers"] = _regime_doc(predicted)
        doc["ledger_flags"] = ledger_flags(args.alpha, args.beta)
        if p_reg is None:
            doc["verdict"] = "insufficient data"
        else:
            ok = regime_le(p_reg, predicted, tol=SLOPE_SLACK)
            doc["verdict"] = "consistent" if ok else "exceeds prediction"
    else:
        doc["case"] = None
        doc["ledger_flags"] = []
    return doc


def cmd_powers(args) -> int:
    if not 1 <= args.n_max <= 10**6:
        raise UsageError("--n-max must lie in [1, 1e6]")
    mat, _, label = _load_operator(args)
    code = EXIT_OK
    try:
        rep = norm_sequence(mat, args.n_max)
    except OverflowGuard as exc:
        rep = exc.partial
        code = EXIT_OVERFLOW
        print(f"overflow: {exc}", file=sys.stderr)
    doc = _powers_summary(mat, rep, args, label)
    if code == EXIT_OVERFLOW:
        doc["overflow"] = True
    else:
        doc["contour_crosscheck"] = contour_crosscheck(mat, _crosscheck_ns(args.n_max), k=args.k)
        doc["contour_k"] = args.k
    csv = sequence_csv(rep)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "norms.csv").write_text(csv, encoding="utf-8")
        (out / "summary.json").write_text(dumps(doc), encoding="utf-8")
        (out / "norms.svg").write_bytes(render_powers_svg(rep.n_values, rep.power_norms, rep.diff_norms))
    if args.format == "csv":
        _emit(csv, args.out)
    elif args.format == "svg":
        _emit(render_powers_svg(rep.n_values, rep.power_norms, rep.diff_norms), args.out)
    else:
        _emit(dumps(doc), args.out)
    return code


def cmd_interp(args) -> int:
    p, params = interpolate_rk(args.c0, args.p0, args.c1, args.p1, args.theta)
    doc = {
        "command": "interp",
        "p": p,
        "params": params.as_dict(),
        "is_ritt": is_ritt(params.alpha, params.beta),
        "case": classify_powers(params.alpha, params.beta).case,
        "ledger_flags": ledger_flags(params.alpha, params.beta),
    }
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_figures(args) -> int:
    cases = sorted(FIGURE_CASES) if args.case == "all" else [int(args.case)]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for case in cases:
        params = FIGURE_CASES[case]
        svg = render_region_svg(params, FIGURE_POINTS, workers=args.threads)
        path = out / f"figure_case{case}.svg"
        path.write_bytes(svg)
        csv_path = out / f"figure_case{case}.csv"
        csv_path.write_text(boundary_csv(boundary_points(region_for(params), FIGURE_POINTS,
                                                         workers=args.threads)), encoding="utf-8")
        files.append({"case": case, "params": params.as_dict(), "svg": str(path), "csv": str(csv_path),
                      "sha256": hashlib.sha256(svg).hexdigest(),
                      "ledger_flags": ledger_flags(params.alpha, params.beta)})
    _emit(dumps({"command": "figures", "figures": files}), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_operator_args(p):
    p.add_argument("matrix", nargs="?", help="matrix JSON file")
    p.add_argument("--preset", choices=PRESETS, help="use a built-in test operator instead of a file")
    p.add_argument("--preset-arg", action="append", metavar="KEY=VALUE",
                   help="preset parameter (repeatable); diag points are ';'-separated")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file of defaults; flags override it")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads for grid sweeps")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="rkcond", description="(alpha, beta)-RK resolvent condition toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("classify", parents=[common], help="growth regimes for (alpha, beta)")
    p.add_argument("--alpha", type=_param, required=True)
    p.add_argument("--beta", type=_param, required=True)
    p.add_argument("--c", type=_param, default=None)
    p.set_defaults(func=cmd_classify)
    subs["classify"] = p

    p = sub.add_parser("region", parents=[common], help="spectral region boundary or figure")
    p.add_argument("--alpha", type=_param, required=True)
    p.add_argument("--beta", type=_param, required=True)
    p.add_argument("--c", type=_param, default=1.0)
    p.add_argument("--points", type=int, default=FIGURE_POINTS)
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.set_defaults(func=cmd_region)
    subs["region"] = p

    p = sub.add_parser("verify", parents=[common], help="estimate C and check spectral inclusion")
    _add_operator_args(p)
    p.add_argument("--alpha", type=_param, required=True)
    p.add_argument("--beta", type=_param, required=True)
    p.add_argument("--radii", type=_positive_int, default=48)
    p.add_argument("--angles", type=_positive_int, default=256)
    p.add_argument("--min-offset", type=_param, default=1e-6)
    p.add_argument("--max-offset", type=_param, default=9.0)
    p.add_argument("--safety", type=_param, default=DEFAULT_SAFETY)
    p.add_argument("--tol", type=_param, default=1e-9)
    p.add_argument("--no-probe", action="store_true", help="skip the grid-refinement divergence probe")
    p.set_defaults(func=cmd_verify)
    subs["verify"] = p

    p = sub.add_parser("powers", parents=[common], help="measured norm sequences and fitted regimes")
    _add_operator_args(p)
    p.add_argument("--n-max", type=_positive_int, default=1000)
    p.add_argument("--k", type=int, default=1, help="integration order for the contour cross-check")
    p.add_argument("--alpha", type=_param)
    p.add_argument("--beta", type=_param)
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.add_argument("--out-dir", help="also write norms.csv, summary.json and norms.svg here")
    p.set_defaults(func=cmd_powers)
    subs["powers"] = p

    p = sub.add_parser("interp", parents=[common], help="interpolate Kreiss and Ritt constants")
    p.add_argument("--c0", type=_param, required=True)
    p.add_argument("--p0", required=True)
    p.add_argument("--c1", type=_param, required=True)
    p.add_argument("--p1", required=True)
    p.add_argument("--theta", type=_param, required=True)
    p.set_defaults(func=cmd_interp)
    subs["interp"] = p

    p = sub.add_parser("figures", parents=[common], help="render the three reference region figures")
    p.add_argument("--case", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_figures)
    subs["figures"] = p
    return parser, subs


def read_config(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _apply_config(parser, subs, argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known_args, _ = pre.parse_known_args(argv)
    command = next((tok for tok in argv if tok in subs), None)
    if known_args.config and command:
        try:
            cfg = read_config(known_args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config {known_args.config}: {exc}") from exc
        sp = subs[command]
        actions = {a.dest: a for a in sp._actions}
        unknown = sorted(set(cfg) - set(actions) - {"config"})
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
        cfg.pop("config", None)
        for key, val in cfg.items():
            action = actions[key]
            if isinstance(action, argparse._StoreTrueAction):
                cfg[key] = val.lower() in ("1", "true", "yes", "on")
            action.required = False
        # string defaults go through each action's type conversion during parsing
        sp.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser, subs = build_parser()
    try:
        args = _apply_config(parser, subs, argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SingularResolvent as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except OverflowGuard as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
