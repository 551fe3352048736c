"""
Command-line front end: JSON in (file or stdin), JSON out on stdout

Usage: python main.py <subcommand> [options]
"""
import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from src.config.parameters import EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION
from src.config.settings import get_settings
from src.core.cones import (
    certify_tcp,
    ppt_test,
    psd_test,
    quantum_state_test,
    realignment_test,
)
from src.core.docmaps import (
    CovariantMap,
    apply,
    compose,
    covariance_span_test,
    decomposable_sufficient,
    kraus_extract,
    map_properties,
    positivity_falsifier,
    positivity_necessary,
)
from src.core.ldoi import (
    InvariantClass,
    LegPermutation,
    MatrixTriple,
    build,
    extract_triple,
    leg_permutation,
    project,
    rank_of,
    spectrum,
    tightest_class,
)
from src.core.matcore import Tolerance
from src.gallery.families import (
    StormerFixture,
    generate,
    get_family,
    list_families,
    projector,
)
from src.models.schemas import (
    CertificateModel,
    KrausModel,
    MapModel,
    MatrixModel,
    TripleModel,
    VerdictModel,
    WitnessModel,
    dump_json,
    load_json,
)
from src.services.detection_service import DetectionService, as_catalog_witness

logger = logging.getLogger("ldoi.cli")

CLASS_CHOICES = [k.value for k in InvariantClass]


# Input helpers

def _read_document(source: Optional[str]) -> Dict[str, Any]:
    """Read a JSON object from a file path, or stdin when source is None or '-'."""
    if source is None or source == "-":
        text = sys.stdin.read()
    else:
        text = Path(source).read_text()
    return load_json(text)


def _triple_from(doc: Dict[str, Any]) -> MatrixTriple:
    """Accept a triple, a map (its Choi triple), a matrix, or a bundle with a 'triple' field."""
    if "A" in doc:
        return TripleModel.model_validate(doc).to_triple()
    if "rows" in doc and "data" in doc:
        return extract_triple(MatrixModel.model_validate(doc).to_numpy())
    if "triple" in doc:
        return _triple_from(doc["triple"])
    raise ValueError("Expected a triple, map, matrix or bundle document")


def _map_from(doc: Dict[str, Any]) -> CovariantMap:
    if "class" in doc and "triple" in doc:
        return MapModel.model_validate(doc).to_map()
    if "map" in doc:
        return _map_from(doc["map"])
    if "witness_map" in doc:
        return _map_from(doc["witness_map"])
    if "A" in doc:
        t = TripleModel.model_validate(doc).to_triple()
        klass = tightest_class(t)
        return CovariantMap(klass, t.promote(klass))
    raise ValueError("Expected a map document {\"class\": ..., \"triple\": ...}")


def _detect_inputs(doc: Dict[str, Any]) -> Tuple[MatrixTriple, List[CovariantMap]]:
    """State triple plus any maps bundled with it (map+triple bundles, fixture output)."""
    extras = [_map_from(doc[key]) for key in ("map", "witness_map") if key in doc]
    return _triple_from(doc), extras


def _class(name: Optional[str]) -> Optional[InvariantClass]:
    return InvariantClass.parse(name) if name is not None else None


def _complex_list(values) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def _item_payload(item) -> Dict[str, Any]:
    if isinstance(item, StormerFixture):
        return {
            "family": "stormer",
            "mu": item.mu,
            "triple": TripleModel.from_triple(item.triple, InvariantClass.CLDUI).model_dump(
                by_alias=True, exclude_none=True),
            "witness_map": MapModel.from_map(item.witness_map).model_dump(by_alias=True, exclude_none=True),
        }
    if isinstance(item, CovariantMap):
        return MapModel.from_map(item).model_dump(by_alias=True, exclude_none=True)
    return TripleModel.from_triple(item, tightest_class(item)).model_dump(by_alias=True, exclude_none=True)


# Subcommands

def cmd_build(args, tol: Tolerance) -> Any:
    t = _triple_from(_read_document(args.input))
    return MatrixModel.from_numpy(build(_class(args.klass), t))


def cmd_extract(args, tol: Tolerance) -> Any:
    X = MatrixModel.model_validate(_read_document(args.input)).to_numpy()
    t = extract_triple(X)
    klass = _class(args.klass) or tightest_class(t, tol)
    return TripleModel.from_triple(t.promote(klass), klass)


def cmd_project(args, tol: Tolerance) -> Any:
    X = MatrixModel.model_validate(_read_document(args.input)).to_numpy()
    return MatrixModel.from_numpy(project(X, _class(args.klass)))


def cmd_check(args, tol: Tolerance) -> Any:
    doc = _read_document(args.input)
    t = _triple_from(doc)
    result: Dict[str, Any] = {}
    selected = args.psd or args.ppt or args.realignment or args.state or args.channel or args.positivity
    if args.psd or not selected:
        result["psd"] = CertificateModel.from_report(psd_test(t, tol)).model_dump()
    if args.ppt:
        result["ppt"] = CertificateModel.from_report(ppt_test(t, tol)).model_dump()
    if args.realignment:
        result["realignment"] = CertificateModel.from_report(realignment_test(t, tol)).model_dump()
    if args.state:
        result["state"] = quantum_state_test(t, tol)
    if args.channel:
        props = map_properties(_map_from(doc), tol)
        result["channel"] = props.channel
        result["map_properties"] = {
            "herm_preserving": props.herm_preserving,
            "cp": props.cp,
            "ccp": props.ccp,
            "unital": props.unital,
            "trace_preserving": props.trace_preserving,
            "entanglement_breaking": props.eb,
        }
    if args.positivity:
        if args.seed is None:
            raise ValueError("--positivity samples random vectors and needs --seed")
        budget = args.budget if args.budget is not None else get_settings().LDOI_FALSIFIER_SAMPLES
        found = positivity_falsifier(t, budget, args.seed, tol)
        sufficient = decomposable_sufficient(t, tol)
        result["positivity"] = {
            "necessary": CertificateModel.from_report(positivity_necessary(t, tol)).model_dump(),
            "decomposable": sufficient.status,
            "falsifier": {
                "found": found.found,
                "samples": found.samples,
                "value": _complex_list([found.value])[0] if found.found else None,
                "v": _complex_list(found.v) if found.found else None,
                "w": _complex_list(found.w) if found.found else None,
            },
        }
    return result


def cmd_spectrum(args, tol: Tolerance) -> Any:
    t = _triple_from(_read_document(args.input))
    klass = _class(args.klass) or tightest_class(t, tol)
    return {"class": klass.value, "eigenvalues": _complex_list(spectrum(t, klass))}


def cmd_rank(args, tol: Tolerance) -> Any:
    t = _triple_from(_read_document(args.input))
    klass = _class(args.klass) or tightest_class(t, tol)
    return {"class": klass.value, "rank": rank_of(t, klass, tol)}


def cmd_permute(args, tol: Tolerance) -> Any:
    t = _triple_from(_read_document(args.input))
    return TripleModel.from_triple(leg_permutation(t, LegPermutation.parse(args.perm)))


def cmd_compose(args, tol: Tolerance) -> Any:
    m1 = _map_from(_read_document(args.first))
    m2 = _map_from(_read_document(args.second))
    return MapModel.from_map(compose(m1, m2))


def cmd_apply(args, tol: Tolerance) -> Any:
    m = _map_from(_read_document(args.map))
    Z = MatrixModel.model_validate(_read_document(args.matrix)).to_numpy()
    return MatrixModel.from_numpy(apply(m, Z))


def cmd_kraus(args, tol: Tolerance) -> Any:
    m = _map_from(_read_document(args.input))
    kraus = kraus_extract(m, tol)
    return {
        "kraus": KrausModel.from_kraus(kraus).model_dump(),
        "rank": kraus.rank,
        "covariant": covariance_span_test(kraus, m.klass, tol),
    }


def cmd_detect(args, tol: Tolerance) -> Any:
    t, maps = _detect_inputs(_read_document(args.triple_file or args.input))
    service = DetectionService()
    config = replace(
        service.default_config(catalog=args.catalog, budget=args.budget, seed=args.seed, jobs=args.jobs),
        tolerance=tol,
        exhaustive=args.exhaustive,
    )
    extras = [as_catalog_witness(m, "input_map") for m in maps]
    verdict = service.separability_verdict(t, config, extras)
    return VerdictModel(
        outcome=verdict.outcome.value,
        certificate=verdict.certificate,
        witness=WitnessModel.from_witness(verdict.witness) if verdict.witness is not None else None,
        margin=verdict.margin,
        map_id=verdict.map_id,
        min_eigenvalue=verdict.min_eigenvalue,
        inconclusive=list(verdict.inconclusive),
        certificates=list(verdict.certificates),
    )


def cmd_certify(args, tol: Tolerance) -> Any:
    t = _triple_from(_read_document(args.input))
    cert = certify_tcp(t, tol)
    if cert is None:
        return {"certified": False}
    return {
        "certified": True,
        "certificate": cert.name,
        "margin": cert.margin,
        "notes": list(cert.notes),
        "witness": WitnessModel.from_witness(cert.witness).model_dump() if cert.witness is not None else None,
    }


def cmd_gallery(args, tol: Tolerance) -> Any:
    if args.projector:
        if args.dim is None:
            raise ValueError("--projector needs --dim")
        return MatrixModel.from_numpy(projector(args.projector, args.dim))
    if args.family is None:
        return {"families": [
            {"name": name, "kind": get_family(name).kind, "description": get_family(name).description}
            for name in list_families(args.kind)
        ]}
    spec = get_family(args.family)
    params = json.loads(args.params) if args.params else dict(spec.example)
    if not isinstance(params, dict):
        raise ValueError("--params must be a JSON object")
    return _item_payload(generate(args.family, params))


def cmd_validate_catalog(args, tol: Tolerance) -> Any:
    service = DetectionService()
    config = replace(
        service.default_config(catalog=args.catalog, budget=args.budget, seed=args.seed),
        tolerance=tol,
    )
    report = service.screen_catalog(args.dims, config)
    return {
        "accepted": report.accepted,
        "entries": [
            {
                "id": e.map_id,
                "d": e.d,
                "accepted": e.accepted,
                "reason": e.reason or None,
                "counterexample": {
                    "v": _complex_list(e.counterexample.v),
                    "w": _complex_list(e.counterexample.w),
                    "value": _complex_list([e.counterexample.value])[0],
                } if e.counterexample is not None else None,
            }
            for e in report.entries
        ],
    }


# Parser

def _add_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?", help="JSON input file (default: stdin)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldoi",
        description="Invariant bipartite matrices, covariant maps and separability certificates",
    )
    parser.add_argument("--log-level", default=None, help="Logging level (default: LDOI_LOG_LEVEL)")
    parser.add_argument("--tol", type=float, default=None, help="Absolute tolerance (default: LDOI_TOL)")
    parser.add_argument("--rel-tol", type=float, default=None, help="Relative tolerance (default: LDOI_REL_TOL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="Dense matrix of a triple")
    _add_input(p)
    p.add_argument("--class", dest="klass", choices=CLASS_CHOICES, default="LDOI")
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("extract", help="Triple of a dense invariant matrix")
    _add_input(p)
    p.add_argument("--class", dest="klass", choices=CLASS_CHOICES, default=None)
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("project", help="Orthogonal projection onto an invariant class")
    _add_input(p)
    p.add_argument("--class", dest="klass", choices=CLASS_CHOICES, default="LDOI")
    p.set_defaults(handler=cmd_project)

    p = sub.add_parser("check", help="PSD / PPT / realignment / state / channel / positivity tests")
    _add_input(p)
    for flag in ("psd", "ppt", "realignment", "state", "channel", "positivity"):
        p.add_argument(f"--{flag}", action="store_true")
    p.add_argument("--budget", type=int, default=None, help="Falsifier samples for --positivity")
    p.add_argument("--seed", type=int, default=None, help="Seed for --positivity")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("spectrum", help="Eigenvalues via the block decomposition")
    _add_input(p)
    p.add_argument("--class", dest="klass", choices=CLASS_CHOICES, default=None)
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("rank", help="Rank via the block decomposition")
    _add_input(p)
    p.add_argument("--class", dest="klass", choices=CLASS_CHOICES, default=None)
    p.set_defaults(handler=cmd_rank)

    p = sub.add_parser("permute", help="Apply a leg permutation to a triple")
    _add_input(p)
    p.add_argument("--perm", required=True, choices=[m.value for m in LegPermutation])
    p.set_defaults(handler=cmd_permute)

    p = sub.add_parser("compose", help="Compose two covariant maps (second applied first)")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(handler=cmd_compose)

    p = sub.add_parser("apply", help="Apply a covariant map to a matrix")
    p.add_argument("map")
    p.add_argument("matrix", nargs="?", help="Matrix JSON (default: stdin)")
    p.set_defaults(handler=cmd_apply)

    p = sub.add_parser("kraus", help="Minimal Kraus representation of a covariant map")
    _add_input(p)
    p.set_defaults(handler=cmd_kraus)

    p = sub.add_parser("detect", help="Separability verdict for a state triple")
    _add_input(p)
    p.add_argument("--triple", dest="triple_file", default=None, help="Same as the input argument")
    p.add_argument("--catalog", default=None, help="Witness catalog YAML (default: LDOI_WITNESS_CATALOG)")
    p.add_argument("--budget", type=int, default=None, help="Falsifier samples for bundled maps")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None, help="Workers for the witness catalog")
    p.add_argument("--exhaustive", action="store_true", help="Collect every entanglement certificate")
    p.set_defaults(handler=cmd_detect)

    p = sub.add_parser("certify", help="Search for a separability witness")
    _add_input(p)
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("gallery", help="Generate a named family member (lists families without a name)")
    p.add_argument("family", nargs="?")
    p.add_argument("--params", default=None, help="Family parameters as a JSON object")
    p.add_argument("--kind", choices=["matrix", "map", "fixture"], default=None)
    p.add_argument("--projector", default=None, help="Canonical projector kind instead of a family")
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(handler=cmd_gallery)

    p = sub.add_parser("validate-catalog", help="Screen the witness catalog for positivity")
    p.add_argument("--catalog", default=None)
    p.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_validate_catalog)

    return parser


def _configure_logging(level: Optional[str]) -> None:
    level = level or get_settings().LDOI_LOG_LEVEL
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _emit(payload: Any) -> None:
    sys.stdout.write(dump_json(payload) + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help exits cleanly; usage errors map to the validation code
        return EXIT_OK if not e.code else EXIT_VALIDATION

    try:
        _configure_logging(args.log_level)
        base = Tolerance.from_settings()
        tol = Tolerance(
            abs_eps=args.tol if args.tol is not None else base.abs_eps,
            rel_eps=args.rel_tol if args.rel_tol is not None else base.rel_eps,
        )
        payload = args.handler(args, tol)
    # LinAlgError subclasses ValueError
    except (np.linalg.LinAlgError, RuntimeError) as e:
        logger.debug("numeric error", exc_info=True)
        _emit({"error": str(e)})
        return EXIT_NUMERIC
    except (ValidationError, ValueError, FileNotFoundError) as e:
        logger.debug("validation error", exc_info=True)
        _emit({"error": str(e)})
        return EXIT_VALIDATION

    _emit(payload)
    return EXIT_OK


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
