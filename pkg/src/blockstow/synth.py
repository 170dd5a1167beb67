"""Seeded synthetic vessels and voyages matching published class statistics.

The proprietary benchmark suite is not redistributable, so experiments
run on synthetic stand-ins: four size classes whose vessel totals (TEU,
reefer plugs, weight capacity, bays, hatch covers) and voyage aggregates
(ports, cargo TEU, reefer TEU, arrival-condition TEU) track the
published class averages. Identical spec and seed give identical
objects, byte for byte once saved.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .domain import (
    BayGeometry,
    BlockCapacity,
    BonjeanTable,
    HydroTable,
    Instance,
    TEU_PER_CONTAINER,
    VesselProfile,
    enumerate_transports,
    transport_sets,
)

#: Per-class targets: vessel totals and voyage aggregates (TEU).
CLASS_TARGETS = {
    "Small": {
        "teu": 1040, "reefer": 251, "weight_t": 22005, "bays": 8, "hatch": 1,
        "ports": 8, "cargo_teu": 1716, "reefer_teu": 59, "ac_teu": 654,
        "trim_m": 2.5,
    },
    "Medium": {
        "teu": 6532, "reefer": 1160, "weight_t": 162834, "bays": 18, "hatch": 3,
        "ports": 6, "cargo_teu": 5768, "reefer_teu": 155, "ac_teu": 4890,
        "trim_m": 2.0,
    },
    "Large": {
        "teu": 13482, "reefer": 940, "weight_t": 274298, "bays": 22, "hatch": 4,
        "ports": 3, "cargo_teu": 7153, "reefer_teu": 211, "ac_teu": 6785,
        "trim_m": 2.0,
    },
    "XL": {
        "teu": 18854, "reefer": 956, "weight_t": 342760, "bays": 24, "hatch": 4,
        "ports": 5, "cargo_teu": 17461, "reefer_teu": 248, "ac_teu": 11222,
        "trim_m": 2.0,
    },
}

BAY_LENGTH_M = 14.0

#: Highest fraction of vessel TEU a single leg's onboard cargo may use.
LEG_FILL_CAP = 0.82


class GenerationError(ValueError):
    """Spec whose targets cannot fit the vessel at all."""


@dataclass(frozen=True)
class SyntheticSpec:
    size_class: str
    seed: int = 0

    def targets(self) -> dict:
        if self.size_class not in CLASS_TARGETS:
            raise GenerationError(
                f"unknown size class {self.size_class!r}; pick one of {sorted(CLASS_TARGETS)}"
            )
        return CLASS_TARGETS[self.size_class]


def _integral_split(total: int, weights: np.ndarray) -> np.ndarray:
    """Split ``total`` into integers proportional to ``weights`` (exact sum)."""
    weights = np.maximum(np.asarray(weights, dtype=float), 1e-9)
    raw = total * weights / weights.sum()
    out = np.floor(raw).astype(int)
    remainder = int(total - out.sum())
    order = np.argsort(-(raw - out), kind="stable")
    for idx in order[:remainder]:
        out[idx] += 1
    return out


def _teu_demand_row(reg: np.ndarray, reefer: np.ndarray) -> float:
    return float(reg[0] + reefer[0] + 2 * (reg[1] + reefer[1]))


def _block_shares(n_blocks: int) -> np.ndarray:
    # Wing pair (last slot) is the largest storage area of a bay.
    if n_blocks == 1:
        return np.array([1.0])
    if n_blocks == 2:
        return np.array([0.45, 0.55])
    centres = np.full(n_blocks - 1, 0.45 / (n_blocks - 1))
    return np.append(centres, 0.55)


def gen_synthetic(spec: SyntheticSpec) -> tuple[VesselProfile, Instance]:
    """Deterministically generate one (vessel, instance) pair for a class."""
    tg = spec.targets()
    # Process-independent seeding: Python's hash() is salted per run.
    digest = hashlib.md5(f"{spec.size_class}:{spec.seed}".encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))

    n_bays = tg["bays"]
    n_ports = tg["ports"]
    hatch = tg["hatch"]
    blocks_in_bay = max(1, hatch - 1)

    # Bay capacity profile: midship bulge with mild noise.
    shape = 0.55 + 0.6 * np.sin(np.pi * (np.arange(n_bays) + 0.5) / n_bays)
    shape *= rng.uniform(0.92, 1.08, n_bays)
    bay_teu = _integral_split(tg["teu"], shape)
    bay_reefer = _integral_split(tg["reefer"], shape)

    bays, blocks = [], []
    lightship_total = 4.6 * tg["teu"]
    tank_total = 0.06 * lightship_total
    lightship = lightship_total * shape / shape.sum()
    tank = tank_total * shape / shape.sum()
    for b in range(n_bays):
        fore = b * BAY_LENGTH_M
        bays.append(
            BayGeometry(
                bay_id=b + 1,
                hatch_covers=hatch,
                mid_pos_m=fore + BAY_LENGTH_M / 2,
                fore_pos_m=fore,
            )
        )
        shares = _block_shares(blocks_in_bay)
        block_teu = _integral_split(int(bay_teu[b]), shares)
        block_reefer = _integral_split(int(bay_reefer[b]), shares)
        weight_per_teu = tg["weight_t"] / tg["teu"]
        for s in range(blocks_in_bay):
            blocks.append(
                BlockCapacity(
                    bay_id=b + 1,
                    cap_teu=float(block_teu[s]),
                    cap_reefer=float(block_reefer[s]),
                    cap_weight_t=round(weight_per_teu * float(block_teu[s]), 3),
                )
            )

    # -- demand ---------------------------------------------------------
    transports = enumerate_transports(n_ports)
    t_index = {t: i for i, t in enumerate(transports)}
    teu_per_transport = np.zeros(len(transports))

    ac_ids = [t_index[(0, j)] for j in range(1, n_ports)]
    ac_w = np.exp(-0.45 * np.arange(1, n_ports)) * rng.uniform(0.6, 1.4, n_ports - 1)
    teu_per_transport[ac_ids] = tg["ac_teu"] * ac_w / ac_w.sum()

    cargo_ids = [t_index[(i, j)] for (i, j) in transports if i >= 1]
    if not cargo_ids:
        raise GenerationError(f"{n_ports} ports leave no load transports for cargo")
    cargo_w = np.array(
        [math.exp(-0.7 * (j - i)) for (i, j) in transports if i >= 1]
    ) * rng.uniform(0.5, 1.5, len(cargo_ids))
    teu_per_transport[cargo_ids] = tg["cargo_teu"] * cargo_w / cargo_w.sum()

    # Keep every leg's onboard TEU under the fill cap (necessary for
    # feasibility; also roughly matches how liner voyages are planned).
    for _ in range(6):
        worst = 0.0
        for p in range(n_ports):
            onboard = transport_sets(p, n_ports).onboard
            load = sum(teu_per_transport[t_index[t]] for t in onboard)
            worst = max(worst, load)
        limit = LEG_FILL_CAP * tg["teu"]
        if worst <= limit:
            break
        teu_per_transport *= limit / worst
    else:
        raise GenerationError("could not fit demand under the leg fill cap")

    demand_reg = np.zeros((len(transports), 2))
    demand_reefer = np.zeros((len(transports), 2))
    reefer_share = tg["reefer_teu"] / max(tg["cargo_teu"] + tg["ac_teu"], 1)
    for t_idx in range(len(transports)):
        teu = teu_per_transport[t_idx]
        if teu <= 0:
            continue
        r_teu = reefer_share * teu
        forty_share = rng.uniform(0.5, 0.7)
        n40 = int(round(teu * forty_share / TEU_PER_CONTAINER[40]))
        n20 = max(0, int(round(teu - TEU_PER_CONTAINER[40] * n40)))
        r40 = int(round(r_teu * 0.6 / TEU_PER_CONTAINER[40]))
        r20 = max(0, int(round(r_teu - TEU_PER_CONTAINER[40] * r40)))
        n40 = max(0, n40 - r40)
        n20 = max(0, n20 - r20)
        demand_reg[t_idx] = (n20, n40)
        demand_reefer[t_idx] = (r20, r40)

    weights = np.round(rng.uniform(8.0, 16.0, len(transports)), 3)

    # -- crane limits -----------------------------------------------------
    # The pattern model charges a full block of moves (capacity / 1.5)
    # per destination label a block carries at a port, so the data limit
    # must leave room for the expected number of labels per block.
    pair_teu = [
        bay_teu[a] + bay_teu[b] for (a, b) in zip(range(n_bays - 1), range(1, n_bays))
    ]
    max_pair_moves = max(pair_teu) / 1.5 if pair_teu else 0.0
    median_block = float(np.median([blk.cap_teu for blk in blocks]))
    total_labels = sum(
        max(1, math.ceil(_teu_demand_row(demand_reg[t], demand_reefer[t]) / max(median_block, 1.0)))
        for t in range(len(transports))
        if _teu_demand_row(demand_reg[t], demand_reefer[t]) > 0
    )
    labels_per_block = max(2, math.ceil(total_labels / max(len(blocks), 1)))
    crane = np.round(np.full(n_ports, 1.2 * labels_per_block * max_pair_moves), 1)

    inst = Instance(
        name=f"{spec.size_class.lower()}-{spec.seed}",
        n_ports=n_ports,
        demand_reg=demand_reg,
        demand_reefer=demand_reefer,
        avg_weight_t=weights,
        crane_limit=crane,
        trim_lo_m=-tg["trim_m"],
        trim_hi_m=tg["trim_m"],
    )

    # -- hydrostatics calibrated to the generated voyage -----------------
    base = float(lightship.sum() + tank.sum())
    fixed_moment = float(
        sum(bay.mid_pos_m * (lightship[i] + tank[i]) for i, bay in enumerate(bays))
    )
    cap_weights = np.array([blk.cap_weight_t for blk in blocks])
    span = n_bays * BAY_LENGTH_M
    d_max = base + float(cap_weights.sum())
    knots = np.linspace(base * 0.999, d_max * 1.05, 8)
    mid = span / 2

    def _onboard_idx(p):
        return [t_index[t] for t in transport_sets(p, n_ports).onboard]

    def _cargo_weight(t_idx):
        return weights[t_idx] * (demand_reg[t_idx].sum() + demand_reefer[t_idx].sum())

    def _teu_of(t_idx):
        return float(
            demand_reg[t_idx, 0]
            + demand_reefer[t_idx, 0]
            + 2 * (demand_reg[t_idx, 1] + demand_reefer[t_idx, 1])
        )

    cargo_weight_p = [sum(_cargo_weight(ti) for ti in _onboard_idx(p)) for p in range(n_ports)]
    worst_cargo = max(cargo_weight_p)
    d_heaviest = base + worst_cargo

    # A used block is priced at its full capacity weight by the pattern
    # model, so its moments overstate true cargo moments by the TEU per
    # container (~1.6x) plus one block of granularity per transport. Size
    # the trim window per port so nominal, roughly centred stowages of
    # either weight scale fit.
    max_block_teu = max(blk.cap_teu for blk in blocks)
    overestimate_p = [
        sum(
            weights[ti] * (_teu_of(ti) + max_block_teu)
            for ti in _onboard_idx(p)
            if _teu_of(ti) > 0
        )
        for p in range(n_ports)
    ]
    lcb = (fixed_moment + (knots - base) * mid) / knots
    trf_ratio = math.inf
    for p in range(n_ports):
        half_needed = mid * max(
            1.3 * overestimate_p[p] - cargo_weight_p[p], 0.6 * cargo_weight_p[p]
        )
        if half_needed > 0:
            trf_ratio = min(trf_ratio, (base + cargo_weight_p[p]) / half_needed)
    trf_const = tg["trim_m"] * (trf_ratio if math.isfinite(trf_ratio) else 1.0)
    hydro = HydroTable(
        displacement_t=tuple(float(v) for v in knots),
        lcb_m=tuple(float(v) for v in lcb),
        trim_factor=tuple(float(trf_const) for _ in knots),
    )

    buoy_share = shape / shape.sum()
    bonjean = BonjeanTable(
        displacement_t=tuple(float(v) for v in knots),
        z=tuple(tuple(float(d * sh) for sh in buoy_share) for d in knots),
    )

    # Raw bending bounds: envelope of the nominal capacity-proportional
    # stowage at true weights and at the pattern model's overestimated
    # weights, widened so near-nominal plans of either model fit.
    bay_cargo_nominal = worst_cargo * bay_teu / bay_teu.sum()
    over_scale = max(overestimate_p) / max(worst_cargo, 1e-9) if worst_cargo else 1.0
    over_scale = max(1.8, 1.3 * over_scale)
    bm_lo, bm_hi = [], []
    for b in range(n_bays):
        nominals = []
        magnitude = 0.0
        for scale in (1.0, over_scale):
            nominal = 0.0
            for fore in range(b + 1):
                ld = abs(bays[b].fore_pos_m - bays[fore].mid_pos_m)
                cargo = scale * bay_cargo_nominal[fore]
                # Buoyancy is interpolated at the true displacement even
                # when the model overstates block weights.
                net = cargo + lightship[fore] + tank[fore] - d_heaviest * buoy_share[fore]
                nominal += ld * net
                magnitude += ld * (cargo + lightship[fore] + tank[fore])
            nominals.append(nominal)
        slack = 0.6 * magnitude + 1.0
        bm_lo.append(round(min(nominals) - slack, 3))
        bm_hi.append(round(max(nominals) + slack, 3))

    vessel = VesselProfile(
        name=f"{spec.size_class.lower()}-vessel-{spec.seed}",
        bays=tuple(bays),
        blocks=tuple(blocks),
        lightship_t=tuple(round(float(v), 3) for v in lightship),
        tank_t=tuple(round(float(v), 3) for v in tank),
        bm_lower=tuple(bm_lo),
        bm_upper=tuple(bm_hi),
        hydro_table=hydro,
        bonjean_table=bonjean,
    )
    return vessel, inst
