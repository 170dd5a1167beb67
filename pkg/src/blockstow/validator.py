"""Solver-independent feasibility audit of decoded plans and templates.

Every constraint family is re-evaluated by direct summation over the
decoded solution, the raw instance, and the vessel data; nothing is read
back from a MipModel. This is the ground truth all equivalence tests
lean on: inequality activities are accepted within an absolute tolerance
of 1e-6, integer equalities must hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import (
    LENGTH_CLASSES,
    TEU_PER_CONTAINER,
    Instance,
    VesselProfile,
    transport_sets,
)
from .hydro import DerivedParams
from .model_alloc import StowagePlan, _transport_big_m
from .model_template import BlockTemplate

INEQ_TOL = 1e-6


class AuditError(ValueError):
    """Solution shape does not match the instance/vessel pair."""


@dataclass
class ConstraintCheck:
    family: str
    index: tuple
    lhs: float
    sense: str
    rhs: float

    @property
    def violation(self) -> float:
        if self.sense == "<=":
            return max(0.0, self.lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - self.lhs)
        return abs(self.lhs - self.rhs)


@dataclass
class FeasibilityReport:
    """Per-constraint audit with violation magnitudes and recomputed objective."""

    checks: list[ConstraintCheck] = field(default_factory=list)
    skipped_families: list[str] = field(default_factory=list)
    objective: float = 0.0
    tol: float = INEQ_TOL

    def record(self, family, index, lhs, sense, rhs):
        self.checks.append(ConstraintCheck(family, index, float(lhs), sense, float(rhs)))

    @property
    def violations(self) -> list[ConstraintCheck]:
        out = []
        for c in self.checks:
            limit = 0.0 if c.sense == "=" else self.tol
            if c.violation > limit:
                out.append(c)
        return out

    @property
    def feasible(self) -> bool:
        return not self.violations

    def by_family(self, family: str) -> list[ConstraintCheck]:
        return [c for c in self.checks if c.family == family]

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "objective": self.objective,
            "skipped_families": list(self.skipped_families),
            "violations": [
                {
                    "family": c.family,
                    "index": list(c.index),
                    "lhs": c.lhs,
                    "sense": c.sense,
                    "rhs": c.rhs,
                    "violation": c.violation,
                }
                for c in self.violations
            ],
        }


def recompute_objective(solution, inst: Instance) -> int:
    """Leg-weighted block usage, recomputed from the indicators alone."""
    x = solution.x if hasattr(solution, "x") else np.asarray(solution)
    total = 0
    for t_idx, (i, j) in enumerate(inst.transports):
        total += (j - i) * int(x[:, t_idx].sum())
    return total


def _check_shape(x: np.ndarray, inst: Instance, vessel: VesselProfile):
    expected = (vessel.n_blocks, len(inst.transports))
    if x.shape != expected:
        raise AuditError(f"solution shape {x.shape} does not match {expected}")


def _common_checks(rep, x, inst, vessel, params, strict):
    """Families shared by both models: one POD per block per load port,
    optional one POD per block per leg, crane makespan structure is
    model specific and handled by the callers."""
    n = inst.n_ports
    K = vessel.n_blocks
    for p in range(n - 1):
        loads = transport_sets(p, n).load
        t_index = inst.transport_index()
        for k in range(K):
            lhs = sum(x[k, t_index[t]] for t in loads)
            rep.record("pod_once", (p, k), lhs, "<=", 1.0)
    if strict:
        for p in range(n):
            onboard = transport_sets(p, n).onboard
            if len(onboard) < 2:
                continue
            t_index = inst.transport_index()
            for k in range(K):
                lhs = sum(x[k, t_index[t]] for t in onboard)
                rep.record("pod_leg", (p, k), lhs, "<=", 1.0)


def check_allocation_feasibility(
    plan: StowagePlan,
    inst: Instance,
    vessel: VesselProfile,
    params: DerivedParams,
    *,
    strict_pod_per_leg: bool = False,
    on_off_capacities: bool = True,
) -> FeasibilityReport:
    """Audit a StowagePlan against every allocation constraint family."""
    _check_shape(plan.x, inst, vessel)
    n = inst.n_ports
    K = vessel.n_blocks
    t_index = inst.transport_index()
    teu = np.array([TEU_PER_CONTAINER[lg] for lg in LENGTH_CLASSES])
    rep = FeasibilityReport(skipped_families=list(params.skipped_families))
    _common_checks(rep, plan.x, inst, vessel, params, strict_pod_per_leg)

    for k in range(K):
        for t_idx, (i, j) in enumerate(inst.transports):
            count = float(plan.y[k, :, t_idx].sum() + plan.z[k, :, t_idx].sum())
            big_m = _transport_big_m(inst, vessel, k, t_idx)
            rep.record("link", (k, i, j), count - big_m * plan.x[k, t_idx], "<=", 0.0)

    for li, length in enumerate(LENGTH_CLASSES):
        for t_idx, (i, j) in enumerate(inst.transports):
            total = float(inst.demand_reg[t_idx, li] + inst.demand_reefer[t_idx, li])
            rep.record(
                "demand",
                (length, i, j),
                float(plan.y[:, li, t_idx].sum() + plan.z[:, li, t_idx].sum()),
                "=",
                total,
            )
            rep.record(
                "reefer_demand",
                (length, i, j),
                float(plan.z[:, li, t_idx].sum()),
                "=",
                float(inst.demand_reefer[t_idx, li]),
            )

    for p in range(n):
        onboard = transport_sets(p, n).onboard
        if not onboard:
            continue
        ob_idx = [t_index[t] for t in onboard]
        for k in range(K):
            blk = vessel.blocks[k]
            used = float(plan.x[k, ob_idx].sum())
            counts = plan.y[k][:, ob_idx] + plan.z[k][:, ob_idx]
            teu_lhs = float((teu[:, None] * counts).sum())
            reefer_lhs = float(plan.z[k][:, ob_idx].sum())
            weight_lhs = float(
                (inst.avg_weight_t[ob_idx][None, :] * counts).sum()
            )
            for fam, lhs, cap in (
                ("cap_teu", teu_lhs, blk.cap_teu),
                ("cap_reefer", reefer_lhs, blk.cap_reefer),
                ("cap_weight", weight_lhs, blk.cap_weight_t),
            ):
                rhs = cap * used if on_off_capacities else cap
                rep.record(fam, (p, k), lhs, "<=", rhs)

    for p in range(1, n):
        bound = params.y_bar[p]
        if math.isinf(bound):
            continue
        moves = transport_sets(p, n).moves
        if not moves:
            continue
        mv_idx = [t_index[t] for t in moves]
        for (a, b) in vessel.adjacent_bay_pairs():
            lhs = 0.0
            for bay_pos in (a, b):
                for k in vessel.blocks_in_bay(bay_pos):
                    lhs += float(
                        plan.y[k][:, mv_idx].sum() + plan.z[k][:, mv_idx].sum()
                    )
            rep.record("makespan", (p, a, b), lhs, "<=", float(bound))

    for p in params.lp_ports:
        onboard = transport_sets(p, n).onboard
        ob_idx = [t_index[t] for t in onboard]
        moment = 0.0
        for bay_pos, bay in enumerate(vessel.bays):
            for k in vessel.blocks_in_bay(bay_pos):
                counts = plan.y[k][:, ob_idx] + plan.z[k][:, ob_idx]
                w = float((inst.avg_weight_t[ob_idx][None, :] * counts).sum())
                moment += bay.mid_pos_m * w
        lo, hi = params.lcg_lo[p], params.lcg_hi[p]
        if not math.isinf(lo):
            rep.record("lcg_lo", (p,), moment, ">=", lo)
        if not math.isinf(hi):
            rep.record("lcg_hi", (p,), moment, "<=", hi)

    for b in range(vessel.n_bays):
        lo, hi = params.bm_lo[b], params.bm_hi[b]
        if math.isinf(lo) and math.isinf(hi):
            continue
        for p in params.lp_ports:
            onboard = transport_sets(p, n).onboard
            ob_idx = [t_index[t] for t in onboard]
            lhs = 0.0
            for fore in range(b + 1):
                ld = vessel.long_distance(b, fore)
                bay_weight = 0.0
                for k in vessel.blocks_in_bay(fore):
                    counts = plan.y[k][:, ob_idx] + plan.z[k][:, ob_idx]
                    bay_weight += float(
                        (inst.avg_weight_t[ob_idx][None, :] * counts).sum()
                    )
                lhs += ld * (bay_weight - params.z[p][fore])
            if not math.isinf(lo):
                rep.record("bending_lo", (b, p), lhs, ">=", lo)
            if not math.isinf(hi):
                rep.record("bending_hi", (b, p), lhs, "<=", hi)

    rep.objective = recompute_objective(plan, inst)
    return rep


def check_template_feasibility(
    tmpl: BlockTemplate,
    inst: Instance,
    vessel: VesselProfile,
    params: DerivedParams,
    *,
    strict_pod_per_leg: bool = False,
) -> FeasibilityReport:
    """Audit a BlockTemplate against every template constraint family."""
    _check_shape(tmpl.x, inst, vessel)
    n = inst.n_ports
    K = vessel.n_blocks
    t_index = inst.transport_index()
    rep = FeasibilityReport(skipped_families=list(params.skipped_families))
    _common_checks(rep, tmpl.x, inst, vessel, params, strict_pod_per_leg)

    for t_idx, (i, j) in enumerate(inst.transports):
        need = inst.teu_demand(t_idx)
        if need <= 0:
            continue
        assigned = float(tmpl.x[:, t_idx].sum())
        rep.record("link", (i, j), need * assigned, ">=", need)
        cap_sum = float(
            sum(vessel.blocks[k].cap_teu * tmpl.x[k, t_idx] for k in range(K))
        )
        rep.record("teu_transport", (i, j), cap_sum, ">=", need)

    for p in range(n):
        onboard = transport_sets(p, n).onboard
        if not onboard:
            continue
        ob_idx = [t_index[t] for t in onboard]
        teu_need = sum(inst.teu_demand(ti) for ti in ob_idx)
        reefer_need = float(sum(inst.demand_reefer[ti].sum() for ti in ob_idx))
        weight_need = float(
            sum(inst.avg_weight_t[ti] * inst.total_containers(ti) for ti in ob_idx)
        )
        for fam, need, cap_of in (
            ("cap_teu_port", teu_need, lambda blk: blk.cap_teu),
            ("cap_reefer_port", reefer_need, lambda blk: blk.cap_reefer),
            ("cap_weight_port", weight_need, lambda blk: blk.cap_weight_t),
        ):
            lhs = 0.0
            for k in range(K):
                lhs += cap_of(vessel.blocks[k]) * float(tmpl.x[k, ob_idx].sum())
            rep.record(fam, (p,), lhs, ">=", need)

    for p in range(1, n):
        bound = params.y_bar[p]
        if math.isinf(bound):
            continue
        moves = transport_sets(p, n).moves
        if not moves:
            continue
        mv_idx = [t_index[t] for t in moves]
        for (a, b) in vessel.adjacent_bay_pairs():
            lhs = 0.0
            for bay_pos in (a, b):
                for k in vessel.blocks_in_bay(bay_pos):
                    lhs += params.o_hat[k] * float(tmpl.x[k, mv_idx].sum())
            rep.record("makespan", (p, a, b), lhs, "<=", float(bound))

    for p in params.lp_ports:
        onboard = transport_sets(p, n).onboard
        ob_idx = [t_index[t] for t in onboard]
        moment = 0.0
        for bay_pos, bay in enumerate(vessel.bays):
            for k in vessel.blocks_in_bay(bay_pos):
                cap = vessel.blocks[k].cap_teu
                for ti in ob_idx:
                    moment += (
                        bay.mid_pos_m
                        * float(inst.avg_weight_t[ti])
                        * cap
                        * float(tmpl.x[k, ti])
                    )
        lo, hi = params.lcg_lo[p], params.lcg_hi[p]
        if not math.isinf(lo):
            rep.record("lcg_lo", (p,), moment, ">=", lo)
        if not math.isinf(hi):
            rep.record("lcg_hi", (p,), moment, "<=", hi)

    for b in range(vessel.n_bays):
        lo, hi = params.bm_lo[b], params.bm_hi[b]
        if math.isinf(lo) and math.isinf(hi):
            continue
        for p in params.lp_ports:
            onboard = transport_sets(p, n).onboard
            ob_idx = [t_index[t] for t in onboard]
            lhs = 0.0
            for fore in range(b + 1):
                ld = vessel.long_distance(b, fore)
                bay_weight = 0.0
                for k in vessel.blocks_in_bay(fore):
                    cap = vessel.blocks[k].cap_teu
                    for ti in ob_idx:
                        bay_weight += (
                            float(inst.avg_weight_t[ti]) * cap * float(tmpl.x[k, ti])
                        )
                lhs += ld * (bay_weight - params.z[p][fore])
            if not math.isinf(lo):
                rep.record("bending_lo", (b, p), lhs, ">=", lo)
            if not math.isinf(hi):
                rep.record("bending_hi", (b, p), lhs, "<=", hi)

    rep.objective = recompute_objective(tmpl, inst)
    return rep


def check_paired_block_semantics(
    solution, inst: Instance, vessel: VesselProfile, *, strict: bool = False
) -> FeasibilityReport:
    """Confirm the single-destination-per-block encoding on any solution.

    Default mode checks one discharge port per block per load port; in
    strict mode a block may serve only one onboard transport per leg.
    """
    x = solution.x if hasattr(solution, "x") else np.asarray(solution)
    _check_shape(x, inst, vessel)
    rep = FeasibilityReport()
    _common_checks(rep, x, inst, vessel, None, strict)
    rep.objective = recompute_objective(x, inst)
    return rep
