"""Allocation planning model: count containers per (transport, block).

Variables: a binary block-use indicator per (block, transport), plus
integer non-reefer and reefer container counts per (block, length,
transport). Demand must be met exactly; capacities, crane makespan, and
the trim/bending windows bound where the counts may go.
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
    y_name,
    z_name,
)
from .domain import (
    LENGTH_CLASSES,
    TEU_PER_CONTAINER,
    Instance,
    VesselProfile,
    transport_sets,
)
from .hydro import DerivedParams
from .mip import MipModel, VarType
from .solver import SolveOutcome


@dataclass(frozen=True)
class StowagePlan:
    """Decoded allocation solution.

    ``x`` has shape (n_blocks, n_transports); ``y``/``z`` have shape
    (n_blocks, 2, n_transports) with the length axis ordered 20', 40'.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @property
    def n_blocks(self) -> int:
        return self.x.shape[0]

    @property
    def n_transports(self) -> int:
        return self.x.shape[1]


def _transport_big_m(inst: Instance, vessel: VesselProfile, k: int, t_idx: int) -> float:
    """Tightest valid link coefficient: a block cannot hold more containers
    than its TEU capacity, nor more than the transport even has."""
    return min(vessel.blocks[k].cap_teu, inst.total_containers(t_idx))


def build_allocation_model(
    inst: Instance,
    vessel: VesselProfile,
    params: DerivedParams,
    *,
    strict_pod_per_leg: bool = False,
    on_off_capacities: bool = True,
) -> MipModel:
    """Assemble the allocation integer program.

    ``on_off_capacities`` scales each block's capacity right-hand side by
    the number of onboard transports using the block, which tightens the
    relaxation in practice; with ``False`` the plain constant capacity is
    used. ``strict_pod_per_leg`` additionally forbids a block from
    serving two onboard transports at once.
    """
    if params is None:
        raise MissingParamsError("derived parameters are required to build the model")

    n = inst.n_ports
    transports = inst.transports
    t_index = inst.transport_index()
    K = vessel.n_blocks
    m = MipModel(kind="allocation", fingerprint=fingerprint(inst, vessel))
    m.meta["n_ports"] = n
    m.meta["n_blocks"] = K

    for k in range(K):
        for (i, j) in transports:
            m.add_variable(x_name(k, i, j), vtype=VarType.BINARY)
    # Demand equalities imply per-block counts never exceed the
    # transport's own class demand, giving finite integer domains.
    for namer, demand in ((y_name, inst.demand_reg), (z_name, inst.demand_reefer)):
        for k in range(K):
            for li, length in enumerate(LENGTH_CLASSES):
                for (i, j) in transports:
                    cap = float(demand[t_index[(i, j)], li])
                    m.add_variable(namer(k, length, i, j), 0.0, cap, VarType.INTEGER)

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

    # Counts only flow into blocks whose indicator is on.
    for k in range(K):
        for (i, j) in transports:
            t_idx = t_index[(i, j)]
            big_m = _transport_big_m(inst, vessel, k, t_idx)
            coeffs = {x_name(k, i, j): -big_m}
            for length in LENGTH_CLASSES:
                coeffs[y_name(k, length, i, j)] = 1.0
                coeffs[z_name(k, length, i, j)] = 1.0
            m.add_constraint(f"link[{k},{i},{j}]", coeffs, "<=", 0.0)

    # All demand is loaded; reefer demand is loaded as reefers.
    for li, length in enumerate(LENGTH_CLASSES):
        for (i, j) in transports:
            t_idx = t_index[(i, j)]
            total = float(inst.demand_reg[t_idx, li] + inst.demand_reefer[t_idx, li])
            coeffs = {}
            for k in range(K):
                coeffs[y_name(k, length, i, j)] = 1.0
                coeffs[z_name(k, length, i, j)] = 1.0
            m.add_constraint(f"demand[{length},{i},{j}]", coeffs, "=", total)
            zc = {z_name(k, length, i, j): 1.0 for k in range(K)}
            m.add_constraint(
                f"reefer_demand[{length},{i},{j}]",
                zc,
                "=",
                float(inst.demand_reefer[t_idx, li]),
            )

    # Block capacities per departure port (TEU, reefer plugs, weight).
    for p in range(n):
        onboard = transport_sets(p, n).onboard
        if not onboard:
            continue
        for k in range(K):
            blk = vessel.blocks[k]
            for fam, cap, coef_of in (
                ("cap_teu", blk.cap_teu, lambda lg, t: TEU_PER_CONTAINER[lg]),
                ("cap_reefer", blk.cap_reefer, None),
                ("cap_weight", blk.cap_weight_t, lambda lg, t: float(inst.avg_weight_t[t])),
            ):
                coeffs = {}
                for (i, j) in onboard:
                    t_idx = t_index[(i, j)]
                    for length in LENGTH_CLASSES:
                        if fam == "cap_reefer":
                            coeffs[z_name(k, length, i, j)] = 1.0
                        else:
                            w = coef_of(length, t_idx)
                            coeffs[y_name(k, length, i, j)] = w
                            coeffs[z_name(k, length, i, j)] = w
                if on_off_capacities:
                    for (i, j) in onboard:
                        coeffs[x_name(k, i, j)] = coeffs.get(x_name(k, i, j), 0.0) - cap
                    rhs = 0.0
                else:
                    rhs = cap
                m.add_constraint(f"{fam}[{p},{k}]", coeffs, "<=", rhs)

    # Crane makespan over adjacent bay pairs; moves counted in containers.
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
                        for length in LENGTH_CLASSES:
                            coeffs[y_name(k, length, i, j)] = 1.0
                            coeffs[z_name(k, length, i, j)] = 1.0
            m.add_constraint(f"makespan[{p},{a},{b}]", coeffs, "<=", float(bound))

    # Cargo moment window (trim) at load ports.
    for p in params.lp_ports:
        onboard = transport_sets(p, n).onboard
        coeffs = {}
        for bay_pos, bay in enumerate(vessel.bays):
            for k in vessel.blocks_in_bay(bay_pos):
                for (i, j) in onboard:
                    t_idx = t_index[(i, j)]
                    w = bay.mid_pos_m * float(inst.avg_weight_t[t_idx])
                    for length in LENGTH_CLASSES:
                        coeffs[y_name(k, length, i, j)] = w
                        coeffs[z_name(k, length, i, j)] = w
        lo, hi = params.lcg_lo[p], params.lcg_hi[p]
        if not math.isinf(lo):
            m.add_constraint(f"lcg_lo[{p}]", coeffs, ">=", lo)
        if not math.isinf(hi):
            m.add_constraint(f"lcg_hi[{p}]", coeffs, "<=", hi)

    # Bending moment per bay at load ports: moments of cargo weight minus
    # buoyancy over fore bays; the constant buoyancy part moves to the rhs.
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
                    for (i, j) in onboard:
                        t_idx = t_index[(i, j)]
                        w = ld * float(inst.avg_weight_t[t_idx])
                        for length in LENGTH_CLASSES:
                            coeffs[y_name(k, length, i, j)] = coeffs.get(
                                y_name(k, length, i, j), 0.0
                            ) + w
                            coeffs[z_name(k, length, i, j)] = coeffs.get(
                                z_name(k, length, i, j), 0.0
                            ) + w
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


def decode_allocation(
    outcome: SolveOutcome, model: MipModel, tol: float = DECODE_TOL
) -> StowagePlan:
    """Turn a feasible solver outcome into an integral StowagePlan."""
    if not outcome.feasible:
        raise DecodeError(f"cannot decode outcome with status {outcome.status!r}")
    n = model.meta["n_ports"]
    K = model.meta["n_blocks"]
    from .domain import enumerate_transports

    transports = enumerate_transports(n)
    T = len(transports)
    x = np.zeros((K, T), dtype=np.int64)
    y = np.zeros((K, len(LENGTH_CLASSES), T), dtype=np.int64)
    z = np.zeros_like(y)
    vals = outcome.values
    for k in range(K):
        for t_idx, (i, j) in enumerate(transports):
            x[k, t_idx] = decode_value(vals[x_name(k, i, j)], x_name(k, i, j), tol)
            for li, length in enumerate(LENGTH_CLASSES):
                y[k, li, t_idx] = decode_value(
                    vals[y_name(k, length, i, j)], y_name(k, length, i, j), tol
                )
                z[k, li, t_idx] = decode_value(
                    vals[z_name(k, length, i, j)], z_name(k, length, i, j), tol
                )
    if (x < 0).any() or (x > 1).any() or (y < 0).any() or (z < 0).any():
        raise DecodeError("decoded counts violate variable domains")
    carried = y.sum(axis=1) + z.sum(axis=1)
    if ((carried > 0) & (x == 0)).any():
        raise DecodeError("containers assigned to a block whose indicator is off")
    return StowagePlan(x=x, y=y, z=z)
