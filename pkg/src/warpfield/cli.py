"""Command-line interface.

``warpfield verify MANIFEST [--props IDS]`` runs registry checks against
one manifest; ``warpfield killing MANIFEST --field NAME`` runs a single
residual check for a named field.  Exit codes: 0 all selected checks
pass, 1 a check failed (or an explicitly selected check could not run),
2 usage or manifest errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .connections import Geometry
from .fields import ProductField
from .lie_killing import (
    killing_residual,
    ssm_killing_residual,
    two_killing_residual,
)
from .manifest import Manifest, ManifestError, load_manifest
from .metric import GeometryError, sample_points
from .report import jsonl_report, text_report
from .sampling import DEFAULT_SAMPLES, DEFAULT_SEED, SplitMix, subseed
from .suite import (
    CheckResult,
    Tolerances,
    default_registry,
    run_checks,
)

USAGE_ERROR = 2


def corpus_dir() -> Path:
    env = os.environ.get("WARPFIELD_CORPUS")
    if env:
        return Path(env)
    return Path(__file__).parent / "corpus"


def resolve_manifest(path_text: str) -> Path:
    p = Path(path_text)
    if p.exists():
        return p
    candidate = corpus_dir() / p.name
    if candidate.exists():
        return candidate
    raise FileNotFoundError(f"manifest not found: {path_text}")


def _tolerances(args) -> Tolerances:
    return Tolerances(alg=args.tol_alg, two=args.tol_2k, fd=args.tol_fd)


def _common_flags(sub):
    sub.add_argument("manifest", help="manifest file (.wm)")
    sub.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--tol-alg", type=float, default=1e-8, dest="tol_alg")
    sub.add_argument("--tol-2k", type=float, default=1e-7, dest="tol_2k")
    sub.add_argument("--tol-fd", type=float, default=1e-6, dest="tol_fd")
    sub.add_argument("--format", choices=("text", "jsonl"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpfield",
        description="residual checks for warped-product metric identities")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run registry checks on a manifest")
    _common_flags(verify)
    verify.add_argument("--props", default="all",
                        help="comma-separated check ids (or 'all')")

    killing = sub.add_parser("killing", help="run a field residual check")
    _common_flags(killing)
    killing.add_argument("--field", required=True,
                         help="field name, or names joined with '+'")
    killing.add_argument("--kind", choices=("killing", "ssm", "2killing"),
                         default="killing")
    return parser


def _emit(args, mf_name: str, results: list[CheckResult]) -> None:
    fn = jsonl_report if args.format == "jsonl" else text_report
    sys.stdout.write(fn(mf_name, __version__, args.seed, args.samples, results))


def _exit_code(results: list[CheckResult], explicit: bool) -> int:
    if any(r.failed for r in results):
        return 1
    if explicit and any(r.verdict == "inconclusive" for r in results):
        return 1
    return 0


def cmd_verify(args) -> int:
    mf = load_manifest(resolve_manifest(args.manifest))
    registry = default_registry()
    tokens = [t.strip() for t in args.props.split(",") if t.strip()]
    explicit = tokens != ["all"]
    try:
        specs = registry.select_many(tokens)
    except KeyError as err:
        print(f"warpfield: {err}", file=sys.stderr)
        return USAGE_ERROR
    results = run_checks(registry, mf, specs, samples=args.samples,
                         seed=args.seed, tol=_tolerances(args),
                         explicit=explicit)
    _emit(args, mf.name, results)
    return _exit_code(results, explicit)


def _field_combo(mf: Manifest, spec: str) -> ProductField:
    parts = []
    for name in spec.split("+"):
        name = name.strip()
        if name not in mf.fields:
            raise KeyError(f"unknown field {name!r} "
                           f"(manifest declares {sorted(mf.fields)})")
        parts.append(mf.fields[name])
    return ProductField(tuple(parts))


def cmd_killing(args) -> int:
    mf = load_manifest(resolve_manifest(args.manifest))
    try:
        zeta = _field_combo(mf, args.field)
    except (KeyError, GeometryError) as err:
        print(f"warpfield: {err}", file=sys.stderr)
        return USAGE_ERROR
    tol = _tolerances(args)
    rng = SplitMix(subseed(args.seed, mf.name, "cli-killing"))
    points = sample_points(mf.structure, args.samples, rng, mf.exclusions)
    if args.kind == "killing":
        geom = Geometry(mf.structure)
        res = killing_residual(geom, zeta, points, tol=tol.alg)
    elif args.kind == "ssm":
        geom = Geometry(mf.structure, mf.torsion)
        res = ssm_killing_residual(geom, zeta, points, tol=tol.alg)
    else:
        geom = Geometry(mf.structure)
        res = two_killing_residual(geom, zeta, points, tol=tol.two)
    result = CheckResult(
        check=f"{res.kind}:{args.field}", result=res.kind, manifest=mf.name,
        verdict=res.verdict, max_abs=res.max_abs, mean_abs=res.mean_abs,
        samples=res.samples, tolerance=res.tolerance, note="")
    _emit(args, mf.name, [result])
    return 0 if result.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return USAGE_ERROR if err.code not in (0,) else 0
    try:
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_killing(args)
    except (ManifestError, FileNotFoundError, GeometryError) as err:
        print(f"warpfield: {err}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
