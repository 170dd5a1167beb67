"""JSON persistence for vessels, instances, solutions, and reports.

Field names carry units (``cap_teu``, ``avg_weight_tonnes``). Unbounded
quantities (crane limits, trim window edges, raw bending bounds) are
stored as JSON ``null``; the sign of the missing bound is implied by the
field. Files are written canonically (sorted keys, two-space indent), so
saving the same object twice produces identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .domain import (
    BayGeometry,
    BlockCapacity,
    BonjeanTable,
    HydroTable,
    Instance,
    VesselProfile,
    enumerate_transports,
)
from .model_alloc import StowagePlan
from .model_template import BlockTemplate


class ParseError(ValueError):
    """Schema violation; the message names the offending field."""


def _num_or_null(x: float):
    return None if math.isinf(x) else float(x)


def _null_to(value, sign: float, field: str) -> float:
    if value is None:
        return sign * math.inf
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError(f"{field}: expected number or null, got {value!r}")
    return float(value)


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ParseError(f"{where}: missing field {key!r}")
    return mapping[key]


def _dump(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def vessel_to_dict(vessel: VesselProfile) -> dict:
    return {
        "name": vessel.name,
        "bays": [
            {
                "bay_id": bay.bay_id,
                "hatch_covers": bay.hatch_covers,
                "mid_pos_m": bay.mid_pos_m,
                "fore_pos_m": bay.fore_pos_m,
                "lightship_tonnes": vessel.lightship_t[i],
                "tank_tonnes": vessel.tank_t[i],
                "bm_lower_nm": _num_or_null(vessel.bm_lower[i]),
                "bm_upper_nm": _num_or_null(vessel.bm_upper[i]),
            }
            for i, bay in enumerate(vessel.bays)
        ],
        "blocks": [
            {
                "bay_id": blk.bay_id,
                "cap_teu": blk.cap_teu,
                "cap_reefer": blk.cap_reefer,
                "cap_weight_tonnes": blk.cap_weight_t,
            }
            for blk in vessel.blocks
        ],
        "hydro_table": {
            "displacement_tonnes": list(vessel.hydro_table.displacement_t),
            "lcb_m": list(vessel.hydro_table.lcb_m),
            "trim_factor": list(vessel.hydro_table.trim_factor),
        },
        "bonjean_table": {
            "displacement_tonnes": list(vessel.bonjean_table.displacement_t),
            "z_per_bay": [list(row) for row in vessel.bonjean_table.z],
        },
    }


def vessel_from_dict(data: dict) -> VesselProfile:
    bays_raw = _require(data, "bays", "vessel")
    bays, lightship, tank, bm_lo, bm_hi = [], [], [], [], []
    for idx, entry in enumerate(bays_raw):
        where = f"vessel.bays[{idx}]"
        bays.append(
            BayGeometry(
                bay_id=int(_require(entry, "bay_id", where)),
                hatch_covers=int(_require(entry, "hatch_covers", where)),
                mid_pos_m=float(_require(entry, "mid_pos_m", where)),
                fore_pos_m=float(_require(entry, "fore_pos_m", where)),
            )
        )
        lightship.append(float(_require(entry, "lightship_tonnes", where)))
        tank.append(float(_require(entry, "tank_tonnes", where)))
        bm_lo.append(_null_to(_require(entry, "bm_lower_nm", where), -1.0, where))
        bm_hi.append(_null_to(_require(entry, "bm_upper_nm", where), +1.0, where))

    blocks = []
    for idx, entry in enumerate(_require(data, "blocks", "vessel")):
        where = f"vessel.blocks[{idx}]"
        blocks.append(
            BlockCapacity(
                bay_id=int(_require(entry, "bay_id", where)),
                cap_teu=float(_require(entry, "cap_teu", where)),
                cap_reefer=float(_require(entry, "cap_reefer", where)),
                cap_weight_t=float(_require(entry, "cap_weight_tonnes", where)),
            )
        )

    ht = _require(data, "hydro_table", "vessel")
    hydro = HydroTable(
        displacement_t=tuple(float(v) for v in _require(ht, "displacement_tonnes", "vessel.hydro_table")),
        lcb_m=tuple(float(v) for v in _require(ht, "lcb_m", "vessel.hydro_table")),
        trim_factor=tuple(float(v) for v in _require(ht, "trim_factor", "vessel.hydro_table")),
    )
    bt = _require(data, "bonjean_table", "vessel")
    bonjean = BonjeanTable(
        displacement_t=tuple(float(v) for v in _require(bt, "displacement_tonnes", "vessel.bonjean_table")),
        z=tuple(tuple(float(v) for v in row) for row in _require(bt, "z_per_bay", "vessel.bonjean_table")),
    )
    return VesselProfile(
        name=str(data.get("name", "")),
        bays=tuple(bays),
        blocks=tuple(blocks),
        lightship_t=tuple(lightship),
        tank_t=tuple(tank),
        bm_lower=tuple(bm_lo),
        bm_upper=tuple(bm_hi),
        hydro_table=hydro,
        bonjean_table=bonjean,
    )


def save_vessel(vessel: VesselProfile, path) -> None:
    _dump(vessel_to_dict(vessel), path)


def load_vessel(path) -> VesselProfile:
    return vessel_from_dict(_read_json(path))


def instance_to_dict(inst: Instance) -> dict:
    transports = inst.transports
    rows = []
    for t_idx, (i, j) in enumerate(transports):
        rows.append(
            {
                "pol": i,
                "pod": j,
                "regular_20": int(inst.demand_reg[t_idx, 0]),
                "regular_40": int(inst.demand_reg[t_idx, 1]),
                "reefer_20": int(inst.demand_reefer[t_idx, 0]),
                "reefer_40": int(inst.demand_reefer[t_idx, 1]),
                "avg_weight_tonnes": float(inst.avg_weight_t[t_idx]),
            }
        )
    return {
        "name": inst.name,
        "n_ports": inst.n_ports,
        "trim_m": [_num_or_null(inst.trim_lo_m), _num_or_null(inst.trim_hi_m)],
        "crane_limit_moves": [_num_or_null(v) for v in inst.crane_limit],
        "transports": rows,
    }


def instance_from_dict(data: dict) -> Instance:
    n_ports = int(_require(data, "n_ports", "instance"))
    if n_ports < 2:
        raise ParseError(f"instance.n_ports: need >= 2 ports, got {n_ports}")
    transports = enumerate_transports(n_ports)
    t_index = {t: idx for idx, t in enumerate(transports)}
    demand_reg = np.zeros((len(transports), 2))
    demand_reefer = np.zeros((len(transports), 2))
    weights = np.zeros(len(transports))
    for idx, entry in enumerate(_require(data, "transports", "instance")):
        where = f"instance.transports[{idx}]"
        i = int(_require(entry, "pol", where))
        j = int(_require(entry, "pod", where))
        if (i, j) not in t_index:
            raise ParseError(f"{where}: ({i},{j}) is not a transport of a {n_ports}-port voyage")
        t_idx = t_index[(i, j)]
        demand_reg[t_idx, 0] = float(_require(entry, "regular_20", where))
        demand_reg[t_idx, 1] = float(_require(entry, "regular_40", where))
        demand_reefer[t_idx, 0] = float(_require(entry, "reefer_20", where))
        demand_reefer[t_idx, 1] = float(_require(entry, "reefer_40", where))
        weights[t_idx] = float(_require(entry, "avg_weight_tonnes", where))

    trim = _require(data, "trim_m", "instance")
    if not isinstance(trim, list) or len(trim) != 2:
        raise ParseError("instance.trim_m: expected [lower, upper]")
    crane_raw = _require(data, "crane_limit_moves", "instance")
    if len(crane_raw) != n_ports:
        raise ParseError(
            f"instance.crane_limit_moves: {len(crane_raw)} entries for {n_ports} ports"
        )
    return Instance(
        name=str(data.get("name", "")),
        n_ports=n_ports,
        demand_reg=demand_reg,
        demand_reefer=demand_reefer,
        avg_weight_t=weights,
        crane_limit=np.array(
            [_null_to(v, +1.0, f"instance.crane_limit_moves[{p}]") for p, v in enumerate(crane_raw)]
        ),
        trim_lo_m=_null_to(trim[0], -1.0, "instance.trim_m[0]"),
        trim_hi_m=_null_to(trim[1], +1.0, "instance.trim_m[1]"),
    )


def save_instance(inst: Instance, path) -> None:
    _dump(instance_to_dict(inst), path)


def load_instance(path) -> Instance:
    return instance_from_dict(_read_json(path))


def solution_to_dict(solution, status: str, objective) -> dict:
    out = {
        "status": status,
        "objective": objective,
        "x": solution.x.tolist(),
    }
    if isinstance(solution, StowagePlan):
        out["kind"] = "allocation"
        out["y"] = solution.y.tolist()
        out["z"] = solution.z.tolist()
    else:
        out["kind"] = "template"
    return out


def save_solution(solution, status: str, objective, path) -> None:
    _dump(solution_to_dict(solution, status, objective), path)


def load_solution(path):
    data = _read_json(path)
    kind = _require(data, "kind", "solution")
    x = np.array(_require(data, "x", "solution"), dtype=np.int64)
    if kind == "allocation":
        y = np.array(_require(data, "y", "solution"), dtype=np.int64)
        z = np.array(_require(data, "z", "solution"), dtype=np.int64)
        return kind, StowagePlan(x=x, y=y, z=z)
    if kind == "template":
        return kind, BlockTemplate(x=x)
    raise ParseError(f"solution.kind: unknown kind {kind!r}")


def save_report(report: dict, path) -> None:
    _dump(report, path)


def _read_json(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"file not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: invalid JSON ({exc})") from exc
