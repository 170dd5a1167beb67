"""Model comparison experiment: solve, audit, aggregate, report.

For each case both formulations are solved with the same backend and
budget; rows carry objective, proven gap, wall time, and the expected
optimal objective E[Obj*] = (1 - gap) * objective, which linearly
discounts an incumbent by its unproven share. Class aggregates are
arithmetic means, and the absolute error between the two models'
E[Obj*] values is summarised by mean, standard deviation, and their
ratio (coefficient of variation).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hydro import derive_params
from .model_alloc import build_allocation_model, decode_allocation
from .model_template import build_template_model, decode_template
from .solver import SolverConfig, solve
from .validator import check_allocation_feasibility, check_template_feasibility

MODELS = ("allocation", "template")

#: Reference summary metrics for the four standard vessel size classes:
#: per-model mean objective, mean proven gap (percent), mean runtime,
#: the published mean expected optimal objective, and the published
#: absolute-error statistics between the two models.
REFERENCE_SUMMARY = {
    "Small": {
        "n": 19,
        "allocation": {"obj": 88.68, "gap_pct": 0.21, "time_s": 5.88, "e_obj": 88.45},
        "template": {"obj": 80.80, "gap_pct": 0.05, "time_s": 1.82, "e_obj": 80.75},
        "abs_err": {"mean": 7.30, "std": 5.38, "cv": 0.738},
    },
    "Medium": {
        "n": 21,
        "allocation": {"obj": 176.90, "gap_pct": 8.49, "time_s": 3371.93, "e_obj": 160.92},
        "template": {"obj": 149.05, "gap_pct": 0.91, "time_s": 1387.92, "e_obj": 147.63},
        "abs_err": {"mean": 13.29, "std": 6.31, "cv": 0.475},
    },
    "Large": {
        "n": 16,
        "allocation": {"obj": 169.50, "gap_pct": 9.91, "time_s": 3620.65, "e_obj": 153.41},
        "template": {"obj": 163.00, "gap_pct": 0.99, "time_s": 802.58, "e_obj": 161.31},
        "abs_err": {"mean": 9.89, "std": 8.05, "cv": 0.814},
    },
    "XL": {
        "n": 13,
        "allocation": {"obj": 288.54, "gap_pct": 12.71, "time_s": 3614.61, "e_obj": 249.47},
        "template": {"obj": 248.69, "gap_pct": 0.97, "time_s": 1654.78, "e_obj": 246.26},
        "abs_err": {"mean": 3.82, "std": 3.19, "cv": 0.834},
    },
}


def expected_optimal(objective: float, gap: float) -> float:
    """E[Obj*] = (1 - gap) * objective, the gap-discounted incumbent."""
    return (1.0 - gap) * objective


@dataclass
class ComparisonRow:
    instance: str
    model: str
    status: str
    objective: float | None
    gap: float | None
    time_s: float
    e_obj: float | None
    validated: bool | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "model": self.model,
            "status": self.status,
            "objective": self.objective,
            "gap": self.gap,
            "time_s": self.time_s,
            "e_obj": self.e_obj,
            "validated": self.validated,
            "error": self.error,
        }


def _solve_case(name, vessel, inst, model_kind, cfg, strict, validate) -> ComparisonRow:
    try:
        params = derive_params(inst, vessel)
        if model_kind == "allocation":
            model = build_allocation_model(inst, vessel, params, strict_pod_per_leg=strict)
        else:
            model = build_template_model(inst, vessel, params, strict_pod_per_leg=strict)
        outcome = solve(model, cfg)
    except Exception as exc:  # noqa: BLE001 - a broken case must not kill the run
        return ComparisonRow(name, model_kind, "error", None, None, 0.0, None, error=str(exc))

    if not outcome.feasible:
        return ComparisonRow(
            name, model_kind, outcome.status, None, None, outcome.wall_time_s, None
        )

    gap = outcome.gap if math.isfinite(outcome.gap) else 1.0
    row = ComparisonRow(
        instance=name,
        model=model_kind,
        status=outcome.status,
        objective=outcome.objective,
        gap=gap,
        time_s=outcome.wall_time_s,
        e_obj=expected_optimal(outcome.objective, gap),
    )
    if validate:
        if model_kind == "allocation":
            plan = decode_allocation(outcome, model)
            audit = check_allocation_feasibility(
                plan, inst, vessel, params, strict_pod_per_leg=strict
            )
        else:
            tmpl = decode_template(outcome, model)
            audit = check_template_feasibility(
                tmpl, inst, vessel, params, strict_pod_per_leg=strict
            )
        row.validated = audit.feasible and audit.objective == round(outcome.objective)
    return row


def run_compare(
    cases,
    models=MODELS,
    cfg: SolverConfig | None = None,
    *,
    strict_pod_per_leg: bool = False,
    validate: bool = True,
    max_workers: int = 1,
) -> dict:
    """Solve every (name, vessel, instance) case with every model.

    Returns the report dict (the JSON contract): per-case rows plus
    aggregates. Failed cases become rows with status ``error`` and the
    run continues.
    """
    cfg = cfg or SolverConfig()
    jobs = [
        (name, vessel, inst, kind)
        for (name, vessel, inst) in cases
        for kind in models
    ]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(
                pool.map(
                    lambda j: _solve_case(j[0], j[1], j[2], j[3], cfg, strict_pod_per_leg, validate),
                    jobs,
                )
            )
    else:
        rows = [
            _solve_case(name, vessel, inst, kind, cfg, strict_pod_per_leg, validate)
            for (name, vessel, inst, kind) in jobs
        ]
    rows.sort(key=lambda r: (r.instance, r.model))
    return assemble_report(rows)


def assemble_report(rows: list[ComparisonRow]) -> dict:
    """Aggregate rows into the report structure (pure; re-runnable on rows)."""
    report = {"rows": [r.to_dict() for r in rows], "aggregates": {}, "abs_err": None}
    for kind in sorted({r.model for r in rows}):
        solved = [r for r in rows if r.model == kind and r.objective is not None]
        if not solved:
            report["aggregates"][kind] = {"n_solved": 0}
            continue
        report["aggregates"][kind] = {
            "n_solved": len(solved),
            "obj": float(np.mean([r.objective for r in solved])),
            "gap": float(np.mean([r.gap for r in solved])),
            "time_s": float(np.mean([r.time_s for r in solved])),
            "e_obj": float(np.mean([r.e_obj for r in solved])),
        }

    by_instance = {}
    for r in rows:
        if r.e_obj is not None:
            by_instance.setdefault(r.instance, {})[r.model] = r.e_obj
    errors = [
        abs(pair["allocation"] - pair["template"])
        for pair in by_instance.values()
        if "allocation" in pair and "template" in pair
    ]
    if errors:
        mean = float(np.mean(errors))
        std = float(np.std(errors))
        report["abs_err"] = {
            "n": len(errors),
            "mean": mean,
            "std": std,
            "cv": std / mean if mean > 0 else math.inf,
        }
    return report


def format_table(report: dict) -> str:
    """Human-readable side of the report; the JSON dict is the contract."""
    lines = []
    header = f"{'instance':<24} {'model':<11} {'status':<10} {'obj':>8} {'gap':>8} {'time_s':>8} {'E[Obj*]':>9}"
    lines.append(header)
    lines.append("-" * len(header))
    for row in report["rows"]:
        obj = "-" if row["objective"] is None else f"{row['objective']:.0f}"
        gap = "-" if row["gap"] is None else f"{100 * row['gap']:.2f}%"
        eobj = "-" if row["e_obj"] is None else f"{row['e_obj']:.2f}"
        lines.append(
            f"{row['instance']:<24} {row['model']:<11} {row['status']:<10} "
            f"{obj:>8} {gap:>8} {row['time_s']:>8.2f} {eobj:>9}"
        )
    for kind, agg in report["aggregates"].items():
        if agg.get("n_solved"):
            lines.append(
                f"mean[{kind}]  obj={agg['obj']:.2f}  gap={100 * agg['gap']:.2f}%  "
                f"time={agg['time_s']:.2f}s  E[Obj*]={agg['e_obj']:.2f}"
            )
    if report["abs_err"]:
        ae = report["abs_err"]
        lines.append(
            f"abs err: mean={ae['mean']:.2f}  std={ae['std']:.2f}  cv={ae['cv']:.3f}"
        )
    return "\n".join(lines)
