"""Template planning model: pick a discharge-port pattern per block.

Only the binary block indicators survive; capacity sufficiency is
enforced in aggregate per departure port and per transport, and crane
moves and block weights are approximated by assuming used blocks are
fully loaded (a block of capacity C takes about C / 1.5 moves and
carries weight W_avg * C).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._model_common import (
    DECODE_TOL,
    DecodeError,
    MissingParamsError,
    decode_value,
    fingerprint,
    x_name,
)
from .domain import Instance, VesselProfile, transport_sets
from .hydro import DerivedParams
from .mip import MipModel, VarType
from .solver import SolveOutcome


@dataclass(frozen=True)
class BlockTemplate:
    """Decoded template: binary pattern indicators, shape (n_blocks, n_transports)."""

    x: np.ndarray

    @property
    def n_blocks(self) -> int:
        return self.x.shape[0]

    @property
    def n_transports(self) -> int:
        return self.x.shape[1]


def build_template_model(
    inst: Instance,
    vessel: VesselProfile,
    params: DerivedParams,
    *,
    strict_pod_per_leg: bool = False,
) -> MipModel:
    """Assemble the template 0-1 integer program.

    Besides the per-port aggregate capacity constraints, the model
    carries a per-transport TEU sufficiency family: the blocks a
    transport is assigned to must jointly have room for that transport's
    demand. Any physically realizable stowage satisfies it, and the
    per-port aggregates are exactly its sums over onboard transports,
    so it tightens the pattern space without excluding real plans. It is
    also what makes two-destination splits come out balanced, which the
    partition reduction relies on.
    """
    if params is None:
        raise MissingParamsError("derived parameters are required to build the model")

    n = inst.n_ports
    transports = inst.transports
    t_index = inst.transport_index()
    K = vessel.n_blocks
    m = MipModel(kind="template", fingerprint=fingerprint(inst, vessel))
    m.meta["n_ports"] = n
    m.meta["n_blocks"] = K

    for k in range(K):
        for (i, j) in transports:
            m.add_variable(x_name(k, i, j), vtype=VarType.BINARY)

    obj = {}
    for (i, j) in transports:
        for k in range(K):
            obj[x_name(k, i, j)] = float(j - i)
    m.set_objective(obj)

    # One discharge port per block at each load port.
    for p in range(n - 1):
        for k in range(K):
            coeffs = {x_name(k, p, j): 1.0 for j in range(p + 1, n)}
            m.add_constraint(f"pod_once[{p},{k}]", coeffs, "<=", 1.0)

    # Positive demand needs at least one block (big-M = the demand itself).
    for (i, j) in transports:
        teu = inst.teu_demand(t_index[(i, j)])
        if teu <= 0:
            continue
        coeffs = {x_name(k, i, j): teu for k in range(K)}
        m.add_constraint(f"link[{i},{j}]", coeffs, ">=", teu)

    # The blocks assigned to a transport must fit that transport's demand.
    for (i, j) in transports:
        teu = inst.teu_demand(t_index[(i, j)])
        if teu <= 0:
            continue
        coeffs = {x_name(k, i, j): vessel.blocks[k].cap_teu for k in range(K)}
        m.add_constraint(f"teu_transport[{i},{j}]", coeffs, ">=", teu)

    # Aggregate capacity sufficiency per departure port.
    for p in range(n):
        onboard = transport_sets(p, n).onboard
        if not onboard:
            continue
        teu_need = sum(inst.teu_demand(t_index[t]) for t in onboard)
        reefer_need = float(
            sum(inst.demand_reefer[t_index[t]].sum() for t in onboard)
        )
        weight_need = float(
            sum(
                inst.avg_weight_t[t_index[t]] * inst.total_containers(t_index[t])
                for t in onboard
            )
        )
        for fam, need, cap_of in (
            ("cap_teu_port", teu_need, lambda blk: blk.cap_teu),
            ("cap_reefer_port", reefer_need, lambda blk: blk.cap_reefer),
            ("cap_weight_port", weight_need, lambda blk: blk.cap_weight_t),
        ):
            coeffs = {}
            for k in range(K):
                cap = cap_of(vessel.blocks[k])
                if cap == 0.0:
                    continue
                for (i, j) in onboard:
                    coeffs[x_name(k, i, j)] = cap
            m.add_constraint(f"{fam}[{p}]", coeffs, ">=", need)

    # Crane makespan over adjacent bay pairs with estimated moves per block.
    for p in range(1, n):
        bound = params.y_bar[p]
        if math.isinf(bound):
            continue
        moves = transport_sets(p, n).moves
        if not moves:
            continue
        for (a, b) in vessel.adjacent_bay_pairs():
            coeffs = {}
            for bay_pos in (a, b):
                for k in vessel.blocks_in_bay(bay_pos):
                    for (i, j) in moves:
                        coeffs[x_name(k, i, j)] = params.o_hat[k]
            m.add_constraint(f"makespan[{p},{a},{b}]", coeffs, "<=", float(bound))

    # Trim window on the moment of approximated block weights.
    for p in params.lp_ports:
        onboard = transport_sets(p, n).onboard
        coeffs = {}
        for bay_pos, bay in enumerate(vessel.bays):
            for k in vessel.blocks_in_bay(bay_pos):
                cap = vessel.blocks[k].cap_teu
                for (i, j) in onboard:
                    t_idx = t_index[(i, j)]
                    coeffs[x_name(k, i, j)] = (
                        bay.mid_pos_m * float(inst.avg_weight_t[t_idx]) * cap
                    )
        lo, hi = params.lcg_lo[p], params.lcg_hi[p]
        if not math.isinf(lo):
            m.add_constraint(f"lcg_lo[{p}]", coeffs, ">=", lo)
        if not math.isinf(hi):
            m.add_constraint(f"lcg_hi[{p}]", coeffs, "<=", hi)

    # Bending windows, buoyancy constants folded into the rhs.
    for b in range(vessel.n_bays):
        lo, hi = params.bm_lo[b], params.bm_hi[b]
        if math.isinf(lo) and math.isinf(hi):
            continue
        for p in params.lp_ports:
            onboard = transport_sets(p, n).onboard
            coeffs = {}
            z_shift = 0.0
            for fore in range(b + 1):
                ld = vessel.long_distance(b, fore)
                z_shift += ld * params.z[p][fore]
                for k in vessel.blocks_in_bay(fore):
                    cap = vessel.blocks[k].cap_teu
                    for (i, j) in onboard:
                        t_idx = t_index[(i, j)]
                        coeffs[x_name(k, i, j)] = coeffs.get(x_name(k, i, j), 0.0) + (
                            ld * float(inst.avg_weight_t[t_idx]) * cap
                        )
            if not math.isinf(lo):
                m.add_constraint(f"bending_lo[{b},{p}]", coeffs, ">=", lo + z_shift)
            if not math.isinf(hi):
                m.add_constraint(f"bending_hi[{b},{p}]", coeffs, "<=", hi + z_shift)

    if strict_pod_per_leg:
        for p in range(n):
            onboard = transport_sets(p, n).onboard
            if len(onboard) < 2:
                continue
            for k in range(K):
                coeffs = {x_name(k, i, j): 1.0 for (i, j) in onboard}
                m.add_constraint(f"pod_leg[{p},{k}]", coeffs, "<=", 1.0)

    return m


def decode_template(
    outcome: SolveOutcome, model: MipModel, tol: float = DECODE_TOL
) -> BlockTemplate:
    """Turn a feasible solver outcome into a binary BlockTemplate."""
    if not outcome.feasible:
        raise DecodeError(f"cannot decode outcome with status {outcome.status!r}")
    n = model.meta["n_ports"]
    K = model.meta["n_blocks"]
    from .domain import enumerate_transports

    transports = enumerate_transports(n)
    x = np.zeros((K, len(transports)), dtype=np.int64)
    for k in range(K):
        for t_idx, (i, j) in enumerate(transports):
            x[k, t_idx] = decode_value(
                outcome.values[x_name(k, i, j)], x_name(k, i, j), tol
            )
    if ((x < 0) | (x > 1)).any():
        raise DecodeError("decoded template indicators are not binary")
    return BlockTemplate(x=x)
