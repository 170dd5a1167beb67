"""Set-partitioning bridge: encode a partition question as template planning.

A multiset of positive integers becomes a vessel with one single-block
bay per element (block TEU capacity = element value) on a three-port
voyage: all cargo loads at port 0 as weightless one-TEU containers, half
discharging at port 1 and half at port 2. Crane, trim, and bending
limits are unbounded, so only the destination-pattern and TEU capacity
structure remains. The template model is then feasible exactly when the
multiset splits into two halves of equal sum, and a feasible template
reads back as such a split.
"""

from __future__ import annotations

import math

import numpy as np

from .domain import (
    BayGeometry,
    BlockCapacity,
    BonjeanTable,
    HydroTable,
    Instance,
    VesselProfile,
)
from .model_template import BlockTemplate


class ReductionRefused(ValueError):
    """Odd element sum: no instance exists and the answer is already no."""


class LiftError(ValueError):
    """Template does not encode a valid equal-sum split."""


class SizeCapExceeded(ValueError):
    """Multiset too large for exhaustive subset enumeration."""


def reduce_set_partition(elements) -> tuple[VesselProfile, Instance]:
    """Build the (vessel, instance) pair encoding one partition question.

    Requires an even element sum; callers answer odd sums with "no"
    directly. Elements must be positive integers.
    """
    s = [int(v) for v in elements]
    if any(v < 1 for v in s):
        raise ValueError("elements must be positive integers")
    total = sum(s)
    if total % 2 != 0:
        raise ReductionRefused(f"element sum {total} is odd; no equal split exists")

    bay_len = 10.0
    bays = tuple(
        BayGeometry(
            bay_id=idx + 1,
            hatch_covers=2,
            mid_pos_m=idx * bay_len + bay_len / 2,
            fore_pos_m=idx * bay_len,
        )
        for idx in range(len(s))
    )
    blocks = tuple(
        BlockCapacity(bay_id=idx + 1, cap_teu=float(v), cap_reefer=0.0, cap_weight_t=0.0)
        for idx, v in enumerate(s)
    )
    n_bays = len(s)
    hydro = HydroTable(
        displacement_t=(0.0, max(1.0, float(total))),
        lcb_m=(0.0, 0.0),
        trim_factor=(1.0, 1.0),
    )
    bonjean = BonjeanTable(
        displacement_t=(0.0, max(1.0, float(total))),
        z=((0.0,) * n_bays, (0.0,) * n_bays),
    )
    vessel = VesselProfile(
        name=f"partition-{'-'.join(str(v) for v in s)}",
        bays=bays,
        blocks=blocks,
        lightship_t=(0.0,) * n_bays,
        tank_t=(0.0,) * n_bays,
        bm_lower=(-math.inf,) * n_bays,
        bm_upper=(math.inf,) * n_bays,
        hydro_table=hydro,
        bonjean_table=bonjean,
    )

    half = total // 2
    # Transports (0,1), (0,2), (1,2) in lexicographic order.
    demand_reg = np.array([[half, 0], [half, 0], [0, 0]], dtype=float)
    demand_reefer = np.zeros_like(demand_reg)
    inst = Instance(
        name=vessel.name,
        n_ports=3,
        demand_reg=demand_reg,
        demand_reefer=demand_reefer,
        avg_weight_t=np.zeros(3),
        crane_limit=np.array([math.inf] * 3),
        trim_lo_m=-math.inf,
        trim_hi_m=math.inf,
    )
    return vessel, inst


def lift_partition(tmpl: BlockTemplate, elements) -> tuple[list[int], list[int]]:
    """Read an equal-sum split out of a feasible template.

    Blocks assigned to the port-1 discharge go to the first subset, the
    port-2 discharge to the second; their capacity sums must agree.
    """
    s = [int(v) for v in elements]
    if tmpl.n_blocks != len(s) or tmpl.n_transports != 3:
        raise LiftError(
            f"template shape ({tmpl.n_blocks}, {tmpl.n_transports}) does not match "
            f"a {len(s)}-element reduction"
        )
    # Transport columns: 0 -> (0,1), 1 -> (0,2), 2 -> (1,2).
    for k in range(len(s)):
        if tmpl.x[k, 0] + tmpl.x[k, 1] != 1:
            raise LiftError(f"block {k} is not assigned exactly one destination at port 0")
    s1 = [s[k] for k in range(len(s)) if tmpl.x[k, 0] == 1]
    s2 = [s[k] for k in range(len(s)) if tmpl.x[k, 1] == 1]
    if sum(s1) != sum(s2):
        raise LiftError(f"subset sums differ: {sum(s1)} vs {sum(s2)}")
    return s1, s2


def brute_force_partition(elements, size_cap: int = 25) -> bool:
    """Exact equal-split answer by subset enumeration.

    Depth-first over include/exclude decisions with partial-sum pruning;
    still exponential, hence the size cap.
    """
    s = [int(v) for v in elements]
    if len(s) > size_cap:
        raise SizeCapExceeded(f"{len(s)} elements exceed enumeration cap {size_cap}")
    total = sum(s)
    if total % 2 != 0:
        return False
    target = total // 2
    s_sorted = sorted(s, reverse=True)
    suffix = [0] * (len(s_sorted) + 1)
    for idx in range(len(s_sorted) - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] + s_sorted[idx]

    def search(idx: int, acc: int) -> bool:
        if acc == target:
            return True
        if idx == len(s_sorted) or acc > target or acc + suffix[idx] < target:
            return False
        return search(idx + 1, acc + s_sorted[idx]) or search(idx + 1, acc)

    return search(0, 0)
