"""Derived hydrostatic and crane parameters consumed by both planning models.

Everything here is computable from vessel data and demand alone: because
every container on the load list must be stowed, the displacement at each
port departure is fixed before any stowage decision is made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Instance, VesselProfile, transport_sets

#: Expected container moves per TEU of block capacity, assuming an equal
#: mix of 20' and 40' cargo (one move handles 1.5 TEU on average).
TEU_PER_MOVE = 1.5


class ExtrapolationError(ValueError):
    """Query displacement outside the covered table range."""


class SingularTrimFactorError(ZeroDivisionError):
    """Trim factor interpolated to zero; trim correction undefined."""


def displacement(inst: Instance, vessel: VesselProfile, p: int) -> float:
    """Vessel displacement in tonnes at departure from port ``p``.

    Sum of lightship and (half-full) tank weights plus the weight of all
    onboard cargo.
    """
    base = float(sum(vessel.lightship_t) + sum(vessel.tank_t))
    t_index = inst.transport_index()
    onboard = transport_sets(p, inst.n_ports).onboard
    cargo = sum(
        inst.avg_weight_t[t_index[t]] * inst.total_containers(t_index[t]) for t in onboard
    )
    return base + float(cargo)


def _interp_column(knots, values, d: float) -> float:
    if d < knots[0] - 1e-9 or d > knots[-1] + 1e-9:
        raise ExtrapolationError(
            f"displacement {d} outside table range [{knots[0]}, {knots[-1]}]"
        )
    return float(np.interp(d, knots, values))


def interp_hydro(table, d: float) -> tuple[float, float]:
    """Interpolate (lcb, trim factor) at displacement ``d``.

    Piecewise linear, exact at knots; refuses to extrapolate.
    """
    lcb = _interp_column(table.displacement_t, table.lcb_m, d)
    trf = _interp_column(table.displacement_t, table.trim_factor, d)
    return lcb, trf


def buoyancy(vessel: VesselProfile, inst: Instance, p: int, bay_pos: int) -> float:
    """Buoyancy force in bay ``bay_pos`` at departure from port ``p``.

    Interpolated per bay from the Bonjean table at displacement d_p.
    """
    d = displacement(inst, vessel, p)
    bt = vessel.bonjean_table
    column = [row[bay_pos] for row in bt.z]
    return _interp_column(bt.displacement_t, column, d)


def lcg_bounds(inst: Instance, vessel: VesselProfile, p: int) -> tuple[float, float]:
    """Cargo-moment window enforcing the vessel's trim limits at port ``p``.

    The upper trim limit produces the lower moment bound and vice versa.
    An infinite trim window yields infinite bounds without touching the
    hydrostatics table.
    """
    t_lo, t_hi = inst.trim_lo_m, inst.trim_hi_m
    fixed_moment = sum(
        bay.mid_pos_m * (vessel.tank_t[i] + vessel.lightship_t[i])
        for i, bay in enumerate(vessel.bays)
    )
    if math.isinf(t_lo) and math.isinf(t_hi):
        return -math.inf, math.inf

    d = displacement(inst, vessel, p)
    lcb, trf = interp_hydro(vessel.hydro_table, d)
    if trf == 0.0:
        raise SingularTrimFactorError(f"trim factor is zero at displacement {d}")
    lo = -math.inf if math.isinf(t_hi) else d * (lcb - t_hi / trf) - fixed_moment
    hi = math.inf if math.isinf(t_lo) else d * (lcb - t_lo / trf) - fixed_moment
    return lo, hi


def bm_bounds(vessel: VesselProfile, bay_pos: int) -> tuple[float, float]:
    """Bending-moment window for one bay, corrected for fixed weights.

    The raw data bounds are shifted by the moment that lightship and tank
    weights of all bays fore of (and including) ``bay_pos`` exert about
    its fore endpoint. Infinite raw bounds pass through untouched.
    """
    correction = 0.0
    for fore in range(bay_pos + 1):
        ld = vessel.long_distance(bay_pos, fore)
        correction += ld * (vessel.tank_t[fore] + vessel.lightship_t[fore])
    raw_lo = vessel.bm_lower[bay_pos]
    raw_hi = vessel.bm_upper[bay_pos]
    lo = raw_lo if math.isinf(raw_lo) else raw_lo - correction
    hi = raw_hi if math.isinf(raw_hi) else raw_hi - correction
    return lo, hi


def crane_params(
    inst: Instance, vessel: VesselProfile
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Estimated moves per block and makespan bounds per port.

    Returns ``(moves_per_block, expected_long_crane, makespan_bound)``.
    A fully used block of capacity C takes about C / 1.5 moves; the
    makespan bound is the larger of the data-supplied crane limit and the
    expected moves of the largest block, so that the estimate never makes
    a port trivially infeasible.
    """
    o_hat = np.array([blk.cap_teu / TEU_PER_MOVE for blk in vessel.blocks])
    biggest = float(o_hat.max()) if len(o_hat) else 0.0
    y_hat = np.full(inst.n_ports, biggest)
    y_bar = np.maximum(np.asarray(inst.crane_limit, dtype=float), y_hat)
    return o_hat, y_hat, y_bar


def load_ports(inst: Instance) -> list[int]:
    """Ports in 1..n-1 with positive load demand (the LP quantifier set)."""
    t_index = inst.transport_index()
    ports = []
    for p in range(1, inst.n_ports):
        loads = transport_sets(p, inst.n_ports).load
        if any(inst.total_containers(t_index[t]) > 0 for t in loads):
            ports.append(p)
    return ports


@dataclass(frozen=True)
class DerivedParams:
    """Everything the model builders need beyond the raw vessel/instance.

    ``lcg_lo``/``lcg_hi`` and ``z`` are keyed by port and populated only
    for ports in ``lp_ports``; ``skipped_families`` records constraint
    families left out because a bound is infinite.
    """

    d_p: tuple[float, ...]
    lp_ports: tuple[int, ...]
    lcg_lo: dict
    lcg_hi: dict
    bm_lo: tuple[float, ...]
    bm_hi: tuple[float, ...]
    z: dict
    o_hat: tuple[float, ...]
    y_hat: tuple[float, ...]
    y_bar: tuple[float, ...]
    skipped_families: tuple[str, ...]


def derive_params(inst: Instance, vessel: VesselProfile) -> DerivedParams:
    """Compute all derived parameters for one (instance, vessel) pair."""
    n = inst.n_ports
    d_p = tuple(displacement(inst, vessel, p) for p in range(n))
    lp = load_ports(inst)

    lcg_lo, lcg_hi = {}, {}
    for p in lp:
        lo, hi = lcg_bounds(inst, vessel, p)
        lcg_lo[p], lcg_hi[p] = lo, hi

    bm_lo, bm_hi = [], []
    for b in range(vessel.n_bays):
        lo, hi = bm_bounds(vessel, b)
        bm_lo.append(lo)
        bm_hi.append(hi)

    bending_needed = any(
        not (math.isinf(lo) and math.isinf(hi)) for lo, hi in zip(bm_lo, bm_hi)
    )
    z = {}
    if bending_needed:
        for p in lp:
            z[p] = tuple(buoyancy(vessel, inst, p, b) for b in range(vessel.n_bays))

    o_hat, y_hat, y_bar = crane_params(inst, vessel)

    skipped = []
    if all(math.isinf(v) for v in y_bar):
        skipped.append("makespan")
    if all(math.isinf(lcg_lo.get(p, -math.inf)) and math.isinf(lcg_hi.get(p, math.inf)) for p in lp):
        skipped.append("lcg")
    if not bending_needed:
        skipped.append("bending")

    return DerivedParams(
        d_p=d_p,
        lp_ports=tuple(lp),
        lcg_lo=lcg_lo,
        lcg_hi=lcg_hi,
        bm_lo=tuple(bm_lo),
        bm_hi=tuple(bm_hi),
        z=z,
        o_hat=tuple(float(v) for v in o_hat),
        y_hat=tuple(float(v) for v in y_hat),
        y_bar=tuple(float(v) for v in y_bar),
        skipped_families=tuple(skipped),
    )
