"""
Command-line entry point.

Subcommands mirror the package modules (space, free, delta, veeorg, renorm)
and print JSON to stdout. `run` and `list` drive the experiment catalog.
Exit codes: 0 on success, 1 on a failed check or computation, 2 on bad input.
"""

import argparse
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import codec
from .config import LOG_FORMAT, LOG_LEVEL, OUTPUT_DIR, PROFILES, SLICE_SAMPLES
from .delta_detect import delta_decompose, delta_distance_probe, delta_molecule_check, norm_b_scan
from .errors import (
    ConfigError,
    DomainError,
    LipfreeError,
    MetricStructureError,
    ParameterError,
    UnknownPointError,
)
from .experiments import CATALOG, ExperimentConfig, list_experiments, run_experiment
from .free_space import kr_norm, lip_norm, molecule_decompose, pair
from .metric_core import DerivedParams, b_metric, eps_connectable, grid_space, svc_space, validate_metric
from .renorm_l2 import (
    dkr_norm,
    generic_delta_renorm,
    lemma32_points,
    slice_diameter_probe,
    super_delta_witness,
    trimmed_dual_norm,
    trimmed_norm,
    unit,
)
from .reports import jsonable, write_report
from .veeorg import daugavet_probe, veeorg_space, verify

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ConfigError, ParameterError, DomainError, MetricStructureError, UnknownPointError)


def _rational(text: str):
    try:
        return codec.parse_rational(text)
    except ParameterError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _emit(data) -> int:
    print(json.dumps(jsonable(data), indent=2, sort_keys=True))
    return 0


def _load_space(path: Path):
    return codec.space_from_json(codec.load_json(path))


def _load_renorm_vector(path: Path, dim: int) -> np.ndarray:
    vector = codec.renorm_vector_from_json(codec.load_json(path))
    if len(vector) != dim:
        raise ParameterError(f"{path} holds a vector of dimension {len(vector)}, expected {dim}")
    return vector


# space

def cmd_space_gen(args) -> int:
    space = grid_space(args.param) if args.kind == "grid" else svc_space(args.param)
    return _emit(codec.space_to_json(space))


def cmd_space_validate(args) -> int:
    violations = validate_metric(_load_space(args.file))
    _emit({"valid": not violations, "violations": [asdict(v) for v in violations]})
    return 0 if not violations else 1


def cmd_space_bmetric(args) -> int:
    space = _load_space(args.file)
    return _emit(codec.space_to_json(b_metric(space, DerivedParams(args.alpha, args.eps))))


def cmd_space_connectable(args) -> int:
    result = eps_connectable(_load_space(args.file), args.x, args.y, args.eps)
    return _emit(asdict(result))


# free

def cmd_free_norm(args) -> int:
    space = _load_space(args.space)
    result = kr_norm(space, codec.vector_from_json(space, codec.load_json(args.vec)))
    return _emit({
        "value": result.value,
        "flow": [list(arc) for arc in result.flow.arcs],
        "dual": codec.function_to_json(result.dual),
    })


def cmd_free_decompose(args) -> int:
    space = _load_space(args.space)
    combination = molecule_decompose(space, codec.vector_from_json(space, codec.load_json(args.vec)))
    return _emit({
        "total_weight": combination.total_weight,
        "atoms": [asdict(atom) for atom in combination.atoms],
    })


def cmd_free_pair(args) -> int:
    space = _load_space(args.space)
    f = codec.function_from_json(space, codec.load_json(args.func))
    mu = codec.vector_from_json(space, codec.load_json(args.vec))
    return _emit({"value": pair(space, f, mu)})


def cmd_free_lipnorm(args) -> int:
    space = _load_space(args.space)
    return _emit(asdict(lip_norm(space, codec.function_from_json(space, codec.load_json(args.func)))))


# delta

def cmd_delta_check(args) -> int:
    check = delta_molecule_check(_load_space(args.space), args.x, args.y, args.eps, args.alpha)
    return _emit(asdict(check))


def cmd_delta_decompose(args) -> int:
    space = _load_space(args.space)
    decomposition = delta_decompose(
        space, codec.vector_from_json(space, codec.load_json(args.vec)), args.alpha, args.eps
    )
    data = asdict(decomposition)
    data["total_weight"] = decomposition.total_weight
    return _emit(data)


def cmd_delta_probe(args) -> int:
    space = _load_space(args.space)
    mu = codec.vector_from_json(space, codec.load_json(args.vec))
    f = codec.function_from_json(space, codec.load_json(args.func))
    return _emit(asdict(delta_distance_probe(space, mu, f, args.alpha)))


def cmd_delta_scan(args) -> int:
    space = _load_space(args.space)
    mu = codec.vector_from_json(space, codec.load_json(args.vec))
    table = norm_b_scan(space, mu, args.alpha, args.eps_list)
    return _emit({"alpha": args.alpha, "scan": [asdict(entry) for entry in table]})


# veeorg

def cmd_veeorg_gen(args) -> int:
    return _emit(codec.space_to_json(veeorg_space(args.levels)))


def cmd_veeorg_verify(args) -> int:
    result = verify(args.levels, args.alpha, args.beta, args.eps)
    data = asdict(result)
    data["passed"] = result.passed
    _emit(data)
    return 0 if result.passed else 1


def cmd_veeorg_daugavet_probe(args) -> int:
    table = daugavet_probe(range(1, args.levels + 1), args.alpha)
    return _emit({"alpha": args.alpha, "levels": [{"level": n, **asdict(result)} for n, result in table]})


# renorm

def cmd_renorm_norm(args) -> int:
    v = _load_renorm_vector(args.vec, args.dim)
    result = trimmed_dual_norm(v) if args.dual else trimmed_norm(v)
    data = asdict(result)
    data["dkr"] = None if args.dual else dkr_norm(v).value
    return _emit(data)


def cmd_renorm_lemma32(args) -> int:
    points = lemma32_points(args.n, args.dim)
    data = asdict(points)
    data["distance"] = points.distance
    return _emit(data)


def cmd_renorm_slice(args) -> int:
    xstar = _load_renorm_vector(args.functional, args.dim)
    return _emit(asdict(slice_diameter_probe(xstar, args.delta, args.samples, args.seed)))


def cmd_renorm_witness(args) -> int:
    report = super_delta_witness(args.dim)
    _emit({"dim": report.dim, "rows": report.rows, "max_deviation": report.max_deviation, "holds": report.holds})
    return 0 if report.holds else 1


def cmd_renorm_generic(args) -> int:
    data = codec.load_json(args.functionals)
    if not isinstance(data, list):
        raise ParameterError("Functionals file must hold a JSON array of vectors")
    functionals = [codec.renorm_vector_from_json(entry) for entry in data]
    if any(len(f) != args.dim for f in functionals):
        raise ParameterError(f"Every functional must have dimension {args.dim}")
    renorm = generic_delta_renorm(functionals)
    if args.vec is not None:
        vectors = [_load_renorm_vector(args.vec, args.dim)]
    else:
        vectors = [unit(args.dim, n) for n in range(1, args.dim + 1)]
    return _emit({
        "bound": renorm.bound,
        "values": [{"vector": codec.renorm_vector_to_json(v), "norm": renorm(v)} for v in vectors],
    })


# experiments

def cmd_run(args) -> int:
    overrides = {}
    if args.config is not None:
        overrides = codec.load_json(args.config)
        if not isinstance(overrides, dict):
            raise ConfigError(f"{args.config} must hold a JSON object of parameters")
    config = ExperimentConfig.build(args.experiment, args.profile, overrides, args.seed, args.output_dir)
    report = run_experiment(config)
    path = write_report(report, config.output_dir)
    print(path)
    for row in report.failures:
        logger.error(f"Failed: {row.check} [{row.anchor}] {jsonable(row.detail)}")
    return 0 if report.passed else 1


def cmd_list(args) -> int:
    for entry in list_experiments():
        sampled = " (sampled)" if entry.sampled else ""
        print(f"{entry.id:24s} {entry.description}{sampled} [{entry.anchor}]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lipfree",
        description="Lipschitz-free space geometry over finite metric spaces"
    )
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: LIPFREE_LOG_LEVEL or INFO)"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    space = commands.add_parser("space", help="Build, validate and transform metric spaces").add_subparsers(
        dest="action", required=True)
    p = space.add_parser("gen", help="Emit a generator space")
    p.add_argument("--kind", choices=["grid", "svc"], required=True)
    p.add_argument("--param", type=int, required=True, help="Grid size or SVC depth")
    p.set_defaults(handler=cmd_space_gen)
    p = space.add_parser("validate", help="Check the metric axioms")
    p.add_argument("file", type=Path)
    p.set_defaults(handler=cmd_space_validate)
    p = space.add_parser("bmetric", help="Emit the b metric of a space")
    p.add_argument("file", type=Path)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.set_defaults(handler=cmd_space_bmetric)
    p = space.add_parser("connectable", help="Discrete eps-connectability of two points")
    p.add_argument("file", type=Path)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.set_defaults(handler=cmd_space_connectable)

    free = commands.add_parser("free", help="Free-space norms and pairings").add_subparsers(
        dest="action", required=True)
    p = free.add_parser("norm", help="Exact norm with flow and dual certificates")
    p.add_argument("space", type=Path)
    p.add_argument("vec", type=Path)
    p.set_defaults(handler=cmd_free_norm)
    p = free.add_parser("decompose", help="Optimal molecule decomposition")
    p.add_argument("space", type=Path)
    p.add_argument("vec", type=Path)
    p.set_defaults(handler=cmd_free_decompose)
    p = free.add_parser("pair", help="Evaluate <f, mu>")
    p.add_argument("space", type=Path)
    p.add_argument("func", type=Path)
    p.add_argument("vec", type=Path)
    p.set_defaults(handler=cmd_free_pair)
    p = free.add_parser("lipnorm", help="Lipschitz constant of a function")
    p.add_argument("space", type=Path)
    p.add_argument("func", type=Path)
    p.set_defaults(handler=cmd_free_lipnorm)

    delta = commands.add_parser("delta", help="Delta detection at a finite scale").add_subparsers(
        dest="action", required=True)
    p = delta.add_parser("check", help="Is m_xy a Delta-molecule at scale eps")
    p.add_argument("space", type=Path)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.set_defaults(handler=cmd_delta_check)
    p = delta.add_parser("decompose", help="Delta decomposition of a unit vector")
    p.add_argument("space", type=Path)
    p.add_argument("vec", type=Path)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.set_defaults(handler=cmd_delta_decompose)
    p = delta.add_parser("probe", help="Largest distance to molecules in a slice")
    p.add_argument("space", type=Path)
    p.add_argument("vec", type=Path)
    p.add_argument("func", type=Path)
    p.add_argument("--alpha", type=_rational, required=True)
    p.set_defaults(handler=cmd_delta_probe)
    p = delta.add_parser("scan", help="b-norms over decreasing scales")
    p.add_argument("space", type=Path)
    p.add_argument("vec", type=Path)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--eps-list", type=_rational, nargs="+", required=True)
    p.set_defaults(handler=cmd_delta_scan)

    veeorg = commands.add_parser("veeorg", help="Truncations of the Veeorg space").add_subparsers(
        dest="action", required=True)
    p = veeorg.add_parser("gen", help="Emit a truncation")
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(handler=cmd_veeorg_gen)
    p = veeorg.add_parser("verify", help="Run every truncation check")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--alpha", type=_rational, default=codec.parse_rational("2/5"))
    p.add_argument("--beta", type=_rational, default=codec.parse_rational("1/5"))
    p.add_argument("--eps", type=_rational, default=None, help="Scale of the almost-square witness")
    p.set_defaults(handler=cmd_veeorg_verify)
    p = veeorg.add_parser("daugavet-probe", help="Slice distance of the p-q molecule for levels 1..N")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.set_defaults(handler=cmd_veeorg_daugavet_probe)

    renorm = commands.add_parser("renorm", help="The Delta-point renorming of l2").add_subparsers(
        dest="action", required=True)
    p = renorm.add_parser("norm", help="Certified trimmed norm or dual norm")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--vec", type=Path, required=True)
    p.add_argument("--dual", action="store_true")
    p.set_defaults(handler=cmd_renorm_norm)
    p = renorm.add_parser("lemma32", help="Strongly exposed pair x(n), x*(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(handler=cmd_renorm_lemma32)
    p = renorm.add_parser("slice", help="Sampled slice diameter")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--functional", type=Path, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--samples", type=int, default=SLICE_SAMPLES)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=cmd_renorm_slice)
    p = renorm.add_parser("witness", help="Super Delta distances of e_1")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(handler=cmd_renorm_witness)
    p = renorm.add_parser("generic", help="Evaluate max(½‖x‖, sup |f_n(x)|)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--functionals", type=Path, required=True)
    p.add_argument("--vec", type=Path, default=None, help="Vector to evaluate (default: the unit vectors)")
    p.set_defaults(handler=cmd_renorm_generic)

    p = commands.add_parser("run", help="Run a catalog experiment and write its report")
    p.add_argument("experiment", choices=sorted(CATALOG))
    p.add_argument("--config", type=Path, default=None, help="JSON file of parameter overrides")
    p.add_argument("--profile", choices=sorted(PROFILES), default="acceptance")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output-dir", type=Path, default=Path(OUTPUT_DIR))
    p.set_defaults(handler=cmd_run)

    p = commands.add_parser("list", help="List catalog experiments")
    p.set_defaults(handler=cmd_list)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the command line."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level or LOG_LEVEL, format=LOG_FORMAT)

    try:
        return args.handler(args)
    except USAGE_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except LipfreeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    exit(main())
