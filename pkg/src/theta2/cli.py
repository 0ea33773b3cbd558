"""Command-line front end: catalog derivation, verification suites, the
structure pipeline.  Reports are JSON with a fixed schema; exit code 0
means every check passed, 1 a verification failure, 2 an internal or
derivation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from functools import lru_cache

import numpy as np

from . import chars, numerics, thetaring
from .errors import DerivationError, EvaluationError, VerificationFailure
from .groebner import FIELDS
from .thetaring import (
    GRADIENT_MODULE_SERIES,
    StructurePipeline,
    all_relations,
    catalog_json,
    default_oracle,
    bracket_modules,
)

SCHEMA = 1


def _manifest(args: argparse.Namespace, command: str) -> dict:
    return {
        "command": command,
        "seed": args.seed,
        "points": args.points,
        "radius": args.radius,
        "eps": args.eps,
        "coeff_mode": args.coeff_mode,
        "cache_dir": args.cache_dir,
        "jobs": args.jobs,
    }


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _modes_for(mode: str) -> list[str]:
    return ["p1", "p2"] if mode == "dual" else [mode]


def _fields_for(mode: str) -> list:
    return [FIELDS[m] for m in _modes_for(mode)]


@lru_cache(maxsize=None)
def _pipeline(mode: str, cache_dir: str | None) -> StructurePipeline:
    return StructurePipeline(FIELDS[mode], cache_dir)


def _cfg(args) -> numerics.EvalConfig:
    return numerics.EvalConfig(radius=args.radius, target_eps=args.eps, seed=args.seed)


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------

def _suite_numeric(args) -> list[dict]:
    cfg = _cfg(args)
    points = numerics.sample_siegel(args.seed, args.points)
    oracle = default_oracle()
    checks = []

    groups = [("riemann-quartics", [("", q) for q in thetaring.riemann_ideal()], 1e-9)]
    rels = all_relations(oracle)
    for kind in ("RelD", "ExtrA", "ExtrB"):
        groups.append((f"relations-{kind.lower()}",
                       [(str(r.indices), r.element) for r in rels if r.kind == kind],
                       1e-9))
    for name, items, tol in groups:
        worst = 0.0
        for _, e in items:
            for Z in points:
                worst = max(worst, numerics.relation_residual(e, Z, cfg))
        checks.append({
            "name": name,
            "count": len(items),
            "max_relative_residual": worst,
            "tolerance": tol,
            "status": "pass" if worst < tol else "fail",
        })

    ratios = numerics.dtable_ratios(points, cfg)
    worst_dev = 0.0
    sign_ok = True
    for entry in thetaring.d_table():
        vals = np.array(ratios[entry.pair])
        dev = float(np.abs(vals - entry.sign).max())
        worst_dev = max(worst_dev, dev)
        if dev > 1e-8:
            sign_ok = False
    checks.append({
        "name": "determinant-table",
        "max_deviation_from_sign": worst_dev,
        "tolerance": 1e-8,
        "orientation": "det(grad_j, grad_i) = sign * pi^2 * product for i < j; "
                       "the (i, j) column order carries the opposite global sign",
        "first_entry_normalization": "pi^2; the reciprocal power sometimes "
                                     "printed with the first entry is a misprint",
        "status": "pass" if sign_ok else "fail",
    })

    # truncation self-consistency at a stricter radius
    cfg_hi = numerics.EvalConfig(radius=cfg.radius + 4, target_eps=cfg.target_eps,
                                 seed=cfg.seed)
    worst = 0.0
    for Z in points[: min(3, len(points))]:
        for m in chars.EVEN_CHARS:
            worst = max(worst, abs(numerics.theta(m, Z, cfg) - numerics.theta(m, Z, cfg_hi)))
    checks.append({
        "name": "radius-self-consistency",
        "max_difference": worst,
        "tolerance": cfg.target_eps,
        "status": "pass" if worst < cfg.target_eps else "fail",
    })
    return checks


def _kernel_report(mode: str, cache_dir: str | None) -> dict:
    pipe = _pipeline(mode, cache_dir)
    field = pipe.field
    kernel = pipe.total_kernel()
    rels = all_relations(default_oracle())
    missing = [str(r.indices) for r in rels if not kernel.contains(r.element)]
    return {
        "name": f"catalog-in-kernel[{field.name}]",
        "relations": len(rels),
        "missing": missing,
        "status": "pass" if not missing else "fail",
    }


def _allrel_report(mode: str, cache_dir: str | None) -> dict:
    pipe = _pipeline(mode, cache_dir)
    field = pipe.field
    equal = pipe.completeness_check()
    return {
        "name": f"kernel-equals-catalog-span[{field.name}]",
        "basis_size": len(pipe.total_kernel()),
        "fingerprint": pipe.total_kernel().structure_fingerprint(),
        "status": "pass" if equal else "fail",
    }


def _per_field(worker, args) -> list[dict]:
    """Run a per-field report builder, in parallel processes when asked."""
    modes = _modes_for(args.coeff_mode)
    if args.jobs > 1 and len(modes) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(args.jobs, len(modes))) as pool:
            return list(pool.map(worker, modes, [args.cache_dir] * len(modes)))
    return [worker(m, args.cache_dir) for m in modes]


def _suite_kernel(args) -> list[dict]:
    return _per_field(_kernel_report, args)


def _suite_allrel(args) -> list[dict]:
    checks = _per_field(_allrel_report, args)
    fps = [c["fingerprint"] for c in checks]
    if len(fps) > 1:
        checks.append({
            "name": "cross-field-agreement",
            "status": "pass" if len(set(fps)) == 1 else "fail",
        })
    return checks


def _suite_brackets(args) -> list[dict]:
    cfg = _cfg(args)
    points = numerics.sample_siegel(args.seed, args.points)
    rep = numerics.second_kind_checks(points, cfg)
    checks = [
        {
            "name": "jacobian-ratio-constant",
            "constant": [rep["jacobian_constant"].real, rep["jacobian_constant"].imag],
            "relative_spread": rep["jacobian_rel_spread"],
            "tolerance": 1e-6,
            "convention": rep["derivative_convention"],
            "status": "pass" if rep["jacobian_rel_spread"] < 1e-6 else "fail",
        },
        {
            "name": "bracket-identity",
            "max_residual": rep["bracket_max_residual"],
            "tolerance": 1e-7,
            "status": "pass" if rep["bracket_max_residual"] < 1e-7 else "fail",
        },
        {
            "name": "triple-bracket-identity",
            "max_residual": rep["triple_max_residual"],
            "tolerance": 1e-7,
            "status": "pass" if rep["triple_max_residual"] < 1e-7 else "fail",
        },
    ]
    wm = bracket_modules()
    plus_dims = wm["plus"]["dimensions"]
    minus_dims = wm["minus"]["dimensions"]
    checks.append({
        "name": "bracket-module-series",
        "plus_series": wm["plus"]["series"].reduced().to_text(),
        "plus_dimensions": plus_dims,
        "minus_series": wm["minus"]["series"].reduced().to_text(),
        "minus_dimensions": minus_dims,
        "status": "pass" if (plus_dims[2] == 6 and minus_dims[5] == 4
                             and minus_dims[6] == 15) else "fail",
    })
    return checks


SUITES = {
    "numeric": _suite_numeric,
    "kernel": _suite_kernel,
    "allrel": _suite_allrel,
    "brackets": _suite_brackets,
}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    checks = []
    for n in names:
        checks.extend(SUITES[n](args))
    failed = [c["name"] for c in checks if c["status"] != "pass"]
    report = {
        "schema": SCHEMA,
        "manifest": _manifest(args, f"verify {args.suite}"),
        "checks": checks,
        "status": "fail" if failed else "pass",
        "first_failure": failed[0] if failed else None,
    }
    _emit(report, args.out)
    return 1 if failed else 0


def cmd_catalog(args) -> int:
    data = catalog_json(args.which)
    report = {
        "schema": SCHEMA,
        "manifest": _manifest(args, f"catalog {args.which}"),
        "catalog": args.which,
        "data": data,
        "status": "pass",
    }
    _emit(report, args.out)
    return 0


def _structure_report_report(mode: str, cache_dir: str | None) -> dict:
    pipe = _pipeline(mode, cache_dir)
    field = pipe.field
    rep = pipe.structure_report()
    completeness = pipe.completeness_check()
    series = rep.series
    return {
        "field": field.name,
        "orbit_size": rep.orbit_size,
        "kernel_equals_catalog_span": completeness,
        "generated_in_intersection": rep.generated_in_intersection,
        "intersection_in_generated": rep.intersection_in_generated,
        "extr_h_in_intersection": rep.extr_h_in_intersection,
        "extr_h_outside_gradient_span": rep.extr_h_outside_gradient_span,
        "series_numerator": list(series.numerator),
        "series_denominator_exponent": series.denom_exp,
        "series_shift": series.shift,
        "series": series.to_text(),
        "coefficients_t1_t12": rep.coefficients,
        "series_matches": rep.series_matches,
        "fingerprints": rep.basis_fingerprints,
        "status": "pass" if (rep.ok() and completeness) else "fail",
    }


def cmd_structure(args) -> int:
    reports = _per_field(_structure_report_report, args)
    fps = [json.dumps(r["fingerprints"], sort_keys=True) for r in reports]
    agreement = len(set(fps)) == 1
    ok = agreement and all(r["status"] == "pass" for r in reports)
    expected = GRADIENT_MODULE_SERIES
    report = {
        "schema": SCHEMA,
        "manifest": _manifest(args, "structure"),
        "expected_series": expected.to_text(),
        "expected_coefficients_t1_t8": expected.expand(8)[1:],
        "runs": reports,
        "cross_field_agreement": agreement,
        "status": "pass" if ok else "fail",
    }
    _emit(report, args.out)
    if ok:
        return 0
    body = [r for r in reports if r["status"] != "pass"]
    first = body[0] if body else {"field": "cross-field", "status": "fail"}
    print(f"mismatch in run: {first['field']}", file=sys.stderr)
    return 1


_FLAG_DEFAULTS = {
    "seed": 0,
    "points": 10,
    "radius": 10,
    "eps": 1e-12,
    "coeff_mode": "dual",
    "cache_dir": None,
    "jobs": 1,
    "out": None,
}


def _add_common_flags(ap: argparse.ArgumentParser, suppress: bool) -> None:
    # flags are accepted both before and after the subcommand; the
    # subcommand copy suppresses defaults so it never clobbers earlier values
    d = (lambda k: argparse.SUPPRESS) if suppress else _FLAG_DEFAULTS.get
    ap.add_argument("--seed", type=int, default=d("seed"))
    ap.add_argument("--points", type=int, default=d("points"))
    ap.add_argument("--radius", type=int, default=d("radius"))
    ap.add_argument("--eps", type=float, default=d("eps"))
    ap.add_argument("--coeff-mode", choices=["q", "p1", "p2", "dual"],
                    default=d("coeff_mode"))
    ap.add_argument("--cache-dir", default=d("cache_dir"))
    ap.add_argument("--jobs", type=int, default=d("jobs"))
    ap.add_argument("--out", default=d("out"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="theta2",
        description="derive and certify the genus-2 theta gradient module structure")
    _add_common_flags(ap, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_common_flags(common, suppress=True)
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("catalog", parents=[common],
                       help="derive and print one catalog")
    c.add_argument("which", choices=["chars", "riemann", "dtable", "reld",
                                     "extra", "extrb", "sextets"])
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", parents=[common],
                       help="run a verification suite")
    v.add_argument("suite", choices=["numeric", "kernel", "allrel", "brackets", "all"])
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("structure", parents=[common],
                       help="full pipeline and series check")
    m.set_defaults(func=cmd_structure)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DerivationError, EvaluationError) as exc:
        print(f"derivation error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001  CI contract: 2 = internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
