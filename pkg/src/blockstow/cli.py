"""Command-line front end.

Verbs: solve, validate, compare, gen-synthetic, gen-reduction, export-lp.
Exit codes: 0 ok, 1 infeasible, 2 input error, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import fileio
from .compare import format_table, run_compare
from .domain import validate_instance, validate_vessel
from .hydro import derive_params
from .model_alloc import build_allocation_model, decode_allocation
from .model_template import build_template_model, decode_template
from .reduction import ReductionRefused, reduce_set_partition
from .solver import INFEASIBLE, SolverConfig, solve
from .synth import GenerationError, SyntheticSpec, gen_synthetic
from .validator import check_allocation_feasibility, check_template_feasibility

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3


class _InputError(Exception):
    pass


def _load_pair(args):
    try:
        vessel = fileio.load_vessel(args.vessel)
        inst = fileio.load_instance(args.instance)
    except fileio.ParseError as exc:
        raise _InputError(str(exc)) from exc
    vrep = validate_vessel(vessel)
    irep = validate_instance(inst, vessel)
    if not vrep.ok or not irep.ok:
        msgs = [f"vessel: {i.message}" for i in vrep.issues]
        msgs += [f"instance: {i.message}" for i in irep.issues]
        raise _InputError("; ".join(msgs))
    return vessel, inst


def _build(args, vessel, inst):
    params = derive_params(inst, vessel)
    if args.model == "allocation":
        model = build_allocation_model(
            inst, vessel, params, strict_pod_per_leg=args.strict_pod_per_leg
        )
    else:
        model = build_template_model(
            inst, vessel, params, strict_pod_per_leg=args.strict_pod_per_leg
        )
    return model, params


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        time_limit_s=args.time_limit,
        rel_gap_target=args.gap,
        deterministic_seed=args.seed,
    )


def _cmd_solve(args) -> int:
    vessel, inst = _load_pair(args)
    model, params = _build(args, vessel, inst)
    outcome = solve(model, _solver_config(args))
    if outcome.status == INFEASIBLE:
        print("infeasible")
        return EXIT_INFEASIBLE
    if not outcome.feasible:
        print(f"no solution within limits (status {outcome.status})")
        return EXIT_SOLVER
    if args.model == "allocation":
        solution = decode_allocation(outcome, model)
        audit = check_allocation_feasibility(
            solution, inst, vessel, params, strict_pod_per_leg=args.strict_pod_per_leg
        )
    else:
        solution = decode_template(outcome, model)
        audit = check_template_feasibility(
            solution, inst, vessel, params, strict_pod_per_leg=args.strict_pod_per_leg
        )
    print(
        f"status={outcome.status} objective={outcome.objective:.0f} "
        f"gap={100 * outcome.gap:.2f}% time={outcome.wall_time_s:.2f}s "
        f"audit={'pass' if audit.feasible else 'FAIL'}"
    )
    if args.out:
        fileio.save_solution(solution, outcome.status, audit.objective, args.out)
        print(f"solution written to {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    vessel, inst = _load_pair(args)
    try:
        kind, solution = fileio.load_solution(args.solution)
    except fileio.ParseError as exc:
        raise _InputError(str(exc)) from exc
    params = derive_params(inst, vessel)
    if kind == "allocation":
        report = check_allocation_feasibility(
            solution, inst, vessel, params, strict_pod_per_leg=args.strict_pod_per_leg
        )
    else:
        report = check_template_feasibility(
            solution, inst, vessel, params, strict_pod_per_leg=args.strict_pod_per_leg
        )
    payload = report.to_dict()
    if args.out:
        fileio.save_report(payload, args.out)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _cmd_compare(args) -> int:
    cases = []
    for pair in args.case:
        vessel_path, inst_path = pair
        try:
            vessel = fileio.load_vessel(vessel_path)
            inst = fileio.load_instance(inst_path)
        except fileio.ParseError as exc:
            raise _InputError(str(exc)) from exc
        cases.append((inst.name or inst_path, vessel, inst))
    report = run_compare(
        cases,
        cfg=_solver_config(args),
        strict_pod_per_leg=args.strict_pod_per_leg,
        max_workers=args.jobs,
    )
    print(format_table(report))
    if args.out:
        fileio.save_report(report, args.out)
        print(f"report written to {args.out}")
    return EXIT_OK


def _cmd_gen_synthetic(args) -> int:
    try:
        vessel, inst = gen_synthetic(SyntheticSpec(args.size_class, args.seed))
    except GenerationError as exc:
        raise _InputError(str(exc)) from exc
    fileio.save_vessel(vessel, args.out_vessel)
    fileio.save_instance(inst, args.out_instance)
    print(f"wrote {args.out_vessel} and {args.out_instance}")
    return EXIT_OK


def _cmd_gen_reduction(args) -> int:
    try:
        elements = [int(tok) for tok in args.set.split(",") if tok.strip()]
    except ValueError as exc:
        raise _InputError(f"--set expects comma-separated integers: {exc}") from exc
    try:
        vessel, inst = reduce_set_partition(elements)
    except (ReductionRefused, ValueError) as exc:
        raise _InputError(str(exc)) from exc
    fileio.save_vessel(vessel, args.out_vessel)
    fileio.save_instance(inst, args.out_instance)
    print(f"wrote {args.out_vessel} and {args.out_instance}")
    return EXIT_OK


def _cmd_export_lp(args) -> int:
    vessel, inst = _load_pair(args)
    model, _ = _build(args, vessel, inst)
    text = model.to_lp_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"model written to {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockstow",
        description="Build, solve, validate, and compare block-level master planning models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("--model", choices=("allocation", "template"), default="template")
        p.add_argument("--strict-pod-per-leg", action="store_true")

    def add_solver_flags(p):
        p.add_argument("--time-limit", type=float, default=3600.0, help="seconds")
        p.add_argument("--gap", type=float, default=0.01, help="relative gap target")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve", help="solve one instance with one model")
    p.add_argument("--vessel", required=True)
    p.add_argument("--instance", required=True)
    add_model_flags(p)
    add_solver_flags(p)
    p.add_argument("--out", help="write the decoded solution JSON here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("validate", help="audit a solution file against an instance")
    p.add_argument("--vessel", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--strict-pod-per-leg", action="store_true")
    p.add_argument("--out", help="write the audit report JSON here")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("compare", help="run both models on a set of cases")
    p.add_argument(
        "--case",
        nargs=2,
        action="append",
        required=True,
        metavar=("VESSEL", "INSTANCE"),
        help="vessel/instance JSON pair; repeatable",
    )
    p.add_argument("--strict-pod-per-leg", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    add_solver_flags(p)
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("gen-synthetic", help="generate a synthetic vessel/instance pair")
    p.add_argument("--size-class", choices=("Small", "Medium", "Large", "XL"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-vessel", required=True)
    p.add_argument("--out-instance", required=True)
    p.set_defaults(func=_cmd_gen_synthetic)

    p = sub.add_parser("gen-reduction", help="encode a set-partition question as an instance")
    p.add_argument("--set", required=True, help="comma-separated positive integers")
    p.add_argument("--out-vessel", required=True)
    p.add_argument("--out-instance", required=True)
    p.set_defaults(func=_cmd_gen_reduction)

    p = sub.add_parser("export-lp", help="write the model in canonical text form")
    p.add_argument("--vessel", required=True)
    p.add_argument("--instance", required=True)
    add_model_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_export_lp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
