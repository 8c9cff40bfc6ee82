"""Command-line front end.

Subcommands: validate, structure, check, classify, catalog.  Exit codes are
a stable contract: 0 = all applicable checks pass, 1 = a mathematical
validation or identity check failed, 2 = usage error / bad manifest /
internal error.  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

from cpgeo import catalog as catalog_mod
from cpgeo import manifest as manifest_mod
from cpgeo.errors import (
    CatalogError,
    ContactPairError,
    CpgeoError,
    ManifestError,
    MetricError,
    ScalarParseError,
    StructureError,
)
from cpgeo.riemann import build_associated_metric, check_associated, check_compatible
from cpgeo.structure import (
    build_structure,
    is_decomposable,
    normality_tensors,
    solve_reeb,
    validate_contact_pair,
    validate_phi,
)
from cpgeo.verifier import classify_vertical_flat, run_suite

USAGE_ERROR = 2
MATH_FAILURE = 1


def _load(path: str, samples: int, seed: int, backend_override: str | None = None):
    manifest = manifest_mod.load_manifest(path)
    if backend_override:
        manifest.backend = backend_override
    if samples and manifest.coordinates and not manifest.sample_points:
        # regenerate chart sample points with the requested count and seed
        geo = manifest_mod.realize(manifest)
        from cpgeo.patch import FramedPatch

        patch = FramedPatch(
            geo.patch.dim,
            geo.patch.ctx.names,
            frame_matrix=geo.patch.frame_matrix,
            n_random_points=samples,
            seed=seed,
        )
        manifest.sample_points = [[str(x) for x in p] for p in patch.sample_points]
    return manifest_mod.realize(manifest)


def _geometry_with_structure(geo, tol: float, polarize: bool):
    """Assemble (structure, metric), polarizing when requested and needed."""
    h, k = geo.manifest.pair_type
    phi, metric = geo.phi, geo.metric
    if (phi is None or metric is None) and polarize:
        pair = validate_contact_pair(geo.patch, geo.alpha1, geo.alpha2, h, k, tol=tol)
        z1, z2 = solve_reeb(geo.patch, pair)
        built_phi, built_g = build_associated_metric(geo.patch, pair, z1, z2)
        phi = phi if phi is not None else built_phi
        metric = metric if metric is not None else built_g
    if phi is None:
        raise ManifestError(
            "manifest has no phi; pass --polarize to construct an associated (phi, g)"
        )
    structure = build_structure(geo.patch, geo.alpha1, geo.alpha2, h, k, phi, tol=tol)
    return structure, metric


def cmd_validate(args) -> int:
    geo = _load(args.file, args.samples, args.seed)
    h, k = geo.manifest.pair_type
    try:
        pair = validate_contact_pair(geo.patch, geo.alpha1, geo.alpha2, h, k, tol=args.tol)
    except ContactPairError as exc:
        payload = {"manifold": geo.manifest.name or args.file, "valid": False, "error": str(exc)}
        _emit(payload, args.json, f"INVALID: {exc}")
        return MATH_FAILURE
    payload = {
        "manifold": geo.manifest.name or args.file,
        "valid": True,
        "type": [h, k],
        "volume_status": pair.volume_status,
        "volume_coefficient": str(pair.volume_coefficient),
    }
    _emit(payload, args.json, f"valid contact pair of type ({h}, {k}); volume {pair.volume_status}")
    return 0


def cmd_structure(args) -> int:
    geo = _load(args.file, args.samples, args.seed)
    h, k = geo.manifest.pair_type
    pair = validate_contact_pair(geo.patch, geo.alpha1, geo.alpha2, h, k, tol=args.tol)
    z1, z2 = solve_reeb(geo.patch, pair)
    from cpgeo.structure import splittings as _splittings

    split = _splittings(geo.patch, pair, z1, z2)
    payload: dict = {
        "manifold": geo.manifest.name or args.file,
        "backend": geo.manifest.backend,
        "type": [h, k],
        "reeb": {"Z1": [str(c) for c in z1.components], "Z2": [str(c) for c in z2.components]},
        "reeb_commute": geo.patch.lie_bracket(z1, z2).is_zero(tol=args.tol),
        "splittings": {
            "TG1": [[str(c) for c in v.components] for v in split.g1],
            "TG2": [[str(c) for c in v.components] for v in split.g2],
            "V": [[str(c) for c in v.components] for v in split.v],
        },
    }
    exit_code = 0
    if geo.phi is not None:
        structure = build_structure(geo.patch, geo.alpha1, geo.alpha2, h, k, geo.phi, tol=args.tol)
        phi_rep = validate_phi(structure, tol=args.tol)
        normality = normality_tensors(structure, tol=args.tol)
        payload["phi"] = {"valid": phi_rep.valid, "failures": phi_rep.failures}
        payload["decomposable"] = is_decomposable(structure)
        payload["normality"] = {
            "is_normal": normality.is_normal,
            "witness": None
            if normality.witness is None
            else {
                "pair": [normality.witness[0] + 1, normality.witness[1] + 1],
                "N1": [str(c) for c in normality.witness[2].components],
            },
        }
        if not phi_rep.valid:
            exit_code = MATH_FAILURE
    else:
        payload["phi"] = None
    _emit(payload, args.json, _structure_text(payload))
    return exit_code


def _structure_text(payload: dict) -> str:
    lines = [f"manifold: {payload['manifold']} (type {tuple(payload['type'])})"]
    lines.append(f"Z1 = {payload['reeb']['Z1']}")
    lines.append(f"Z2 = {payload['reeb']['Z2']}   commute: {payload['reeb_commute']}")
    for name in ("TG1", "TG2", "V"):
        lines.append(f"{name}: {payload['splittings'][name]}")
    if payload.get("phi") is not None:
        lines.append(f"phi valid: {payload['phi']['valid']}")
        lines.append(f"decomposable: {payload['decomposable']}")
        lines.append(f"normal: {payload['normality']['is_normal']}")
        if payload["normality"]["witness"]:
            w = payload["normality"]["witness"]
            lines.append(f"  N1 witness on frame pair {w['pair']}: {w['N1']}")
    else:
        lines.append("phi: not supplied")
    return "\n".join(lines)


def cmd_check(args) -> int:
    geo = _load(args.file, args.samples, args.seed, args.backend)
    structure, metric = _geometry_with_structure(geo, args.tol, args.polarize)
    if metric is None:
        raise ManifestError(
            "manifest has no metric; pass --polarize to construct an associated (phi, g)"
        )
    results = run_suite(structure, metric, args.suite, tol=args.tol)
    payload = {
        "manifold": geo.manifest.name or args.file,
        "backend": geo.manifest.backend,
        "suite": args.suite,
        "checks": [r.to_dict() for r in results],
    }
    ok = all(r.passed for r in results)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        for r in results:
            line = f"{r.check_id:20s} {r.status}"
            if r.residual is not None:
                line += f"  (residual {r.residual:.3e})"
            if r.reason:
                line += f"  [{r.reason}]"
            print(line)
        print(f"suite {args.suite}: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else MATH_FAILURE


def cmd_classify(args) -> int:
    geo = _load(args.file, args.samples, args.seed)
    structure, metric = _geometry_with_structure(geo, args.tol, args.polarize)
    if metric is None:
        raise ManifestError("classify needs a metric (or --polarize)")
    report = classify_vertical_flat(structure, metric, tol=args.tol)
    payload = {
        "manifold": geo.manifest.name or args.file,
        "backend": geo.manifest.backend,
        "classification": report.to_dict(),
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        if report.hypothesis.status != "holds_exact":
            print("hypothesis fails: curvature does not vanish on the vertical subbundle")
            print(f"  witness: {report.hypothesis.witness}")
        else:
            print(f"h eigenvalues: {report.h_eigenvalues}")
            print(f"eigensplit dims: {report.eigensplit_dims}")
            print(f"all block checks passed: {report.passed}")
            print(f"model: {report.model_string or '(checks failed)'}")
    return 0 if report.passed else MATH_FAILURE


def cmd_catalog(args) -> int:
    if args.action == "list":
        listing = catalog_mod.list_examples()
        if args.json:
            print(json.dumps(listing, indent=2, sort_keys=True, default=str))
        else:
            for name, props in listing.items():
                print(f"{name:20s} {props}")
        return 0
    # emit
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise CatalogError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key] = int(value) if value.lstrip("-").isdigit() else value
    example = catalog_mod.build_example(args.name, **params)
    m = manifest_mod.manifest_from_example(example)
    if args.output:
        manifest_mod.write_manifest(m, args.output)
        print(f"wrote {args.output}", file=sys.stderr)
    else:
        print(manifest_mod.emit_manifest(m), end="")
    return 0


def _emit(payload: dict, as_json: bool, text: str):
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpgeo",
        description="Verification engine for metric contact pair geometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_file=True):
        if needs_file:
            p.add_argument("file", help="manifest file (TOML)")
        p.add_argument("--tol", type=float, default=1e-9, help="float-backend tolerance")
        p.add_argument("--samples", type=int, default=0, help="extra random sample points")
        p.add_argument("--seed", type=int, default=0, help="seed for sample-point generation")
        p.add_argument("--json", action="store_true", help="JSON report on stdout")

    p_validate = sub.add_parser("validate", help="check the contact-pair axioms")
    common(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_structure = sub.add_parser("structure", help="Reeb fields, splittings, normality")
    common(p_structure)
    p_structure.set_defaults(func=cmd_structure)

    p_check = sub.add_parser("check", help="run the identity suite")
    common(p_check)
    p_check.add_argument(
        "--suite",
        choices=("core", "curvature", "classification", "all"),
        default="all",
    )
    p_check.add_argument(
        "--backend",
        choices=("exact", "float"),
        default=None,
        help="override the manifest backend",
    )
    p_check.add_argument(
        "--polarize",
        action="store_true",
        help="construct (phi, g) by polarization when the manifest has none",
    )
    p_check.set_defaults(func=cmd_check)

    p_classify = sub.add_parser("classify", help="vertical-flat classification diagnostics")
    common(p_classify)
    p_classify.add_argument("--polarize", action="store_true")
    p_classify.set_defaults(func=cmd_classify)

    p_catalog = sub.add_parser("catalog", help="built-in example manifolds")
    cat_sub = p_catalog.add_subparsers(dest="action", required=True)
    p_list = cat_sub.add_parser("list", help="list entries with expected properties")
    p_list.add_argument("--json", action="store_true")
    p_list.set_defaults(func=cmd_catalog)
    p_emit = cat_sub.add_parser("emit", help="export an entry as a manifest")
    p_emit.add_argument("name")
    p_emit.add_argument("--param", action="append", help="builder parameter key=value")
    p_emit.add_argument("-o", "--output", help="output path (default: stdout)")
    p_emit.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ManifestError, ScalarParseError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ContactPairError, StructureError, MetricError) as exc:
        print(f"invalid geometry: {exc}", file=sys.stderr)
        return MATH_FAILURE
    except CpgeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception:
        traceback.print_exc()
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
