"""Vessel, voyage, and index-set semantics shared by the planning models.

Ports are 0-based. Port 0 carries the arrival condition: cargo already
onboard at the start of the voyage is modelled as demand loaded at port 0.
A voyage with ``n`` ports has ``n - 1`` legs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Cargo length classes in feet, in canonical order.
LENGTH_CLASSES = (20, 40)

#: TEU volume of one container per length class.
TEU_PER_CONTAINER = {20: 1.0, 40: 2.0}


class VoyageError(ValueError):
    """Structurally invalid voyage definition (e.g. fewer than two ports)."""


def blocks_per_bay(hatch_covers: int) -> int:
    """Number of storage blocks formed by a bay's hatch-cover structure.

    Three hatch covers give two blocks (a centre block and the wing pair),
    four give three. Single-hatch feeder bays still provide one usable
    block, hence the floor at 1.
    """
    if hatch_covers < 1:
        raise ValueError(f"hatch cover count must be >= 1, got {hatch_covers}")
    return max(1, hatch_covers - 1)


def enumerate_transports(n_ports: int) -> list[tuple[int, int]]:
    """All transport pairs (i, j) with 0 <= i < j <= n_ports - 1.

    Returned in lexicographic order so downstream model builds are
    byte-stable.
    """
    if n_ports < 2:
        raise VoyageError(f"a voyage needs at least 2 ports, got {n_ports}")
    return [(i, j) for i in range(n_ports) for j in range(i + 1, n_ports)]


@dataclass(frozen=True)
class TransportSets:
    """Transport partition relative to one port call.

    ``onboard`` are transports on the vessel when departing from ``port``;
    ``discharge``/``load`` are the moves performed at ``port``; ``moves``
    is their union.
    """

    port: int
    onboard: tuple[tuple[int, int], ...]
    discharge: tuple[tuple[int, int], ...]
    load: tuple[tuple[int, int], ...]
    moves: tuple[tuple[int, int], ...]


def transport_sets(p: int, n_ports: int) -> TransportSets:
    """Onboard/discharge/load/move transport sets at port ``p``."""
    if not 0 <= p < n_ports:
        raise VoyageError(f"port {p} outside voyage with {n_ports} ports")
    transports = enumerate_transports(n_ports)
    onboard = tuple(t for t in transports if t[0] <= p < t[1])
    discharge = tuple(t for t in transports if t[1] == p)
    load = tuple(t for t in transports if t[0] == p)
    moves = tuple(sorted(set(load) | set(discharge)))
    return TransportSets(p, onboard, discharge, load, moves)


@dataclass(frozen=True)
class BayGeometry:
    """Longitudinal geometry of one bay.

    Positions are metres along the ship axis, increasing fore to aft, so
    the fore endpoint of the first bay is the smallest coordinate.
    """

    bay_id: int
    hatch_covers: int
    mid_pos_m: float
    fore_pos_m: float


@dataclass(frozen=True)
class BlockCapacity:
    """Capacity triple of one block (centre block or wing pair)."""

    bay_id: int
    cap_teu: float
    cap_reefer: float
    cap_weight_t: float


@dataclass(frozen=True)
class HydroTable:
    """Hydrostatics rows: displacement -> (centre of buoyancy, trim factor).

    Rows must be sorted strictly increasing in displacement; queries are
    answered by piecewise-linear interpolation and refused outside the
    covered range.
    """

    displacement_t: tuple[float, ...]
    lcb_m: tuple[float, ...]
    trim_factor: tuple[float, ...]


@dataclass(frozen=True)
class BonjeanTable:
    """Per-bay buoyancy force versus displacement.

    ``z`` holds one row per displacement knot, each row covering every bay
    in vessel bay order.
    """

    displacement_t: tuple[float, ...]
    z: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class VesselProfile:
    """Physical vessel: bays, blocks, weights, hydrostatics, stress limits.

    Per-bay sequences (``lightship_t``, ``tank_t``, ``bm_lower``,
    ``bm_upper``) are indexed by position in ``bays``. ``bm_lower`` and
    ``bm_upper`` are the raw bending-moment bounds supplied with the
    vessel data; ``math.inf`` marks an unbounded side. Tank weights assume
    half-full ballast throughout the voyage.
    """

    name: str
    bays: tuple[BayGeometry, ...]
    blocks: tuple[BlockCapacity, ...]
    lightship_t: tuple[float, ...]
    tank_t: tuple[float, ...]
    bm_lower: tuple[float, ...]
    bm_upper: tuple[float, ...]
    hydro_table: HydroTable
    bonjean_table: BonjeanTable

    @property
    def n_bays(self) -> int:
        return len(self.bays)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def total_teu(self) -> float:
        return sum(b.cap_teu for b in self.blocks)

    def bay_index(self, bay_id: int) -> int:
        for idx, bay in enumerate(self.bays):
            if bay.bay_id == bay_id:
                return idx
        raise KeyError(f"unknown bay id {bay_id}")

    def blocks_in_bay(self, bay_pos: int) -> list[int]:
        """Global indices of the blocks belonging to the bay at ``bay_pos``."""
        bay_id = self.bays[bay_pos].bay_id
        return [k for k, blk in enumerate(self.blocks) if blk.bay_id == bay_id]

    def long_distance(self, bay_pos: int, fore_bay_pos: int) -> float:
        """Distance from the fore endpoint of one bay to another bay's midpoint."""
        return abs(self.bays[bay_pos].fore_pos_m - self.bays[fore_bay_pos].mid_pos_m)

    def adjacent_bay_pairs(self) -> list[tuple[int, int]]:
        """Consecutive bay position pairs (0,1), (1,2), ..."""
        return [(b, b + 1) for b in range(self.n_bays - 1)]


@dataclass(frozen=True)
class Instance:
    """One voyage: demand per transport, weights, crane limits, trim window.

    ``demand_reg`` and ``demand_reefer`` have shape ``(n_transports, 2)``
    with columns for 20' and 40' containers, rows in the lexicographic
    transport order of :func:`enumerate_transports`. Reefer demand is
    additional to regular demand, so the total container count of a
    transport is the sum of both arrays over its row.

    ``crane_limit`` is the maximum long-crane moves per port from data
    (``math.inf`` when unconstrained). The trim window is in metres.
    """

    name: str
    n_ports: int
    demand_reg: np.ndarray
    demand_reefer: np.ndarray
    avg_weight_t: np.ndarray
    crane_limit: np.ndarray
    trim_lo_m: float
    trim_hi_m: float

    def __post_init__(self):
        for attr in ("demand_reg", "demand_reefer", "avg_weight_t", "crane_limit"):
            arr = np.asarray(getattr(self, attr), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, attr, arr)

    @property
    def transports(self) -> list[tuple[int, int]]:
        return enumerate_transports(self.n_ports)

    def transport_index(self) -> dict[tuple[int, int], int]:
        return {t: idx for idx, t in enumerate(self.transports)}

    def containers(self, t_idx: int, length: int) -> float:
        """Total containers (regular + reefer) of one transport and length."""
        li = LENGTH_CLASSES.index(length)
        return float(self.demand_reg[t_idx, li] + self.demand_reefer[t_idx, li])

    def total_containers(self, t_idx: int) -> float:
        return float(self.demand_reg[t_idx].sum() + self.demand_reefer[t_idx].sum())

    def teu_demand(self, t_idx: int) -> float:
        """TEU volume of one transport's full demand (regular + reefer)."""
        total = 0.0
        for li, length in enumerate(LENGTH_CLASSES):
            total += TEU_PER_CONTAINER[length] * (
                self.demand_reg[t_idx, li] + self.demand_reefer[t_idx, li]
            )
        return float(total)


@dataclass
class ValidationIssue:
    code: str
    message: str


@dataclass
class ValidationReport:
    """Outcome of a structural validation pass; empty issue list means valid."""

    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, code: str, message: str) -> None:
        self.issues.append(ValidationIssue(code, message))

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}


def validate_vessel(vessel: VesselProfile) -> ValidationReport:
    """Check every VesselProfile invariant; returns a report, never raises."""
    rep = ValidationReport()
    known_bays = set()
    for pos, bay in enumerate(vessel.bays):
        if bay.hatch_covers < 1:
            rep.add("hatch_count", f"bay {bay.bay_id}: hatch cover count {bay.hatch_covers} < 1")
        if bay.bay_id in known_bays:
            rep.add("duplicate_bay", f"bay id {bay.bay_id} appears twice")
        known_bays.add(bay.bay_id)
        if pos > 0 and not vessel.bays[pos - 1].fore_pos_m < bay.fore_pos_m:
            rep.add("bay_order", f"bay {bay.bay_id}: fore positions not strictly increasing")

    for blk in vessel.blocks:
        if blk.bay_id not in known_bays:
            rep.add("orphan_block", f"block references unknown bay {blk.bay_id}")
        for fieldname in ("cap_teu", "cap_reefer", "cap_weight_t"):
            if getattr(blk, fieldname) < 0:
                rep.add("negative_capacity", f"bay {blk.bay_id}: {fieldname} < 0")

    for pos, bay in enumerate(vessel.bays):
        expected = blocks_per_bay(bay.hatch_covers)
        actual = len(vessel.blocks_in_bay(pos))
        if actual != expected:
            rep.add(
                "block_count",
                f"bay {bay.bay_id}: {actual} blocks, expected {expected} for "
                f"{bay.hatch_covers} hatch covers",
            )

    for label, seq in (
        ("lightship_t", vessel.lightship_t),
        ("tank_t", vessel.tank_t),
        ("bm_lower", vessel.bm_lower),
        ("bm_upper", vessel.bm_upper),
    ):
        if len(seq) != vessel.n_bays:
            rep.add("bay_array_length", f"{label} has {len(seq)} entries for {vessel.n_bays} bays")
    for w in vessel.lightship_t:
        if w < 0:
            rep.add("negative_weight", "lightship weight < 0")
    for w in vessel.tank_t:
        if w < 0:
            rep.add("negative_weight", "tank weight < 0")
    for lo, hi in zip(vessel.bm_lower, vessel.bm_upper):
        if lo > hi:
            rep.add("bm_bounds", f"bending bounds inverted: {lo} > {hi}")

    ht = vessel.hydro_table
    if len(ht.displacement_t) < 2:
        rep.add("hydro_rows", "hydrostatics table needs at least 2 rows")
    if any(nxt <= prev for prev, nxt in zip(ht.displacement_t[:-1], ht.displacement_t[1:])):
        rep.add("hydro_order", "hydrostatics displacements not strictly increasing")
    if len(ht.lcb_m) != len(ht.displacement_t) or len(ht.trim_factor) != len(ht.displacement_t):
        rep.add("hydro_rows", "hydrostatics columns have mismatched lengths")
    if any(t <= 0 for t in ht.trim_factor):
        rep.add("trim_factor", "trim factor must be positive on every row")

    bt = vessel.bonjean_table
    if len(bt.displacement_t) < 2:
        rep.add("bonjean_rows", "bonjean table needs at least 2 rows")
    if any(nxt <= prev for prev, nxt in zip(bt.displacement_t[:-1], bt.displacement_t[1:])):
        rep.add("bonjean_order", "bonjean displacements not strictly increasing")
    for row in bt.z:
        if len(row) != vessel.n_bays:
            rep.add("bonjean_width", "bonjean row does not cover every bay")

    return rep


def validate_instance(inst: Instance, vessel: VesselProfile) -> ValidationReport:
    """Check Instance invariants plus an aggregate capacity sanity bound.

    The per-leg TEU bound is a necessary condition only: demand that fits
    in aggregate can still be infeasible once block structure, cranes, and
    hydrostatics enter.
    """
    rep = ValidationReport()
    if inst.n_ports < 2:
        rep.add("n_ports", f"voyage needs >= 2 ports, got {inst.n_ports}")
        return rep

    n_tr = len(inst.transports)
    for label, arr in (("demand_reg", inst.demand_reg), ("demand_reefer", inst.demand_reefer)):
        if arr.shape != (n_tr, len(LENGTH_CLASSES)):
            rep.add("demand_shape", f"{label} shape {arr.shape}, expected ({n_tr}, 2)")
            return rep
        if (arr < 0).any():
            rep.add("negative_demand", f"{label} has negative entries")
        if not np.allclose(arr, np.round(arr)):
            rep.add("fractional_demand", f"{label} has non-integral entries")

    if inst.avg_weight_t.shape != (n_tr,):
        rep.add("weight_shape", f"avg_weight_t shape {inst.avg_weight_t.shape}")
    else:
        for t_idx, w in enumerate(inst.avg_weight_t):
            # Zero marks deliberately weightless cargo (used by generated
            # complexity instances); real containers weigh 4 to 30 tonnes.
            if w != 0.0 and not 4.0 <= w <= 30.0:
                rep.add("weight_range", f"transport {inst.transports[t_idx]}: weight {w} t")

    if inst.crane_limit.shape != (inst.n_ports,):
        rep.add("crane_shape", f"crane_limit shape {inst.crane_limit.shape}")
    elif (inst.crane_limit < 0).any():
        rep.add("negative_crane", "crane limit < 0")

    if inst.trim_lo_m > inst.trim_hi_m:
        rep.add("trim_window", f"trim window inverted: {inst.trim_lo_m} > {inst.trim_hi_m}")

    if not rep.issues or rep.codes() <= {"weight_range"}:
        total_teu = vessel.total_teu
        for p in range(inst.n_ports):
            ob = transport_sets(p, inst.n_ports).onboard
            t_index = inst.transport_index()
            onboard_teu = sum(inst.teu_demand(t_index[t]) for t in ob)
            if onboard_teu > total_teu + 1e-9:
                rep.add(
                    "capacity_necessary",
                    f"leg departing port {p}: onboard {onboard_teu:.1f} TEU exceeds "
                    f"vessel capacity {total_teu:.1f} TEU",
                )
    return rep
