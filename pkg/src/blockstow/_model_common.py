"""Shared naming, fingerprinting, and decode plumbing for the model builders."""

from __future__ import annotations

import hashlib

from .domain import Instance, VesselProfile

#: Absolute distance from an integer beyond which a solver value refuses
#: to decode. Standard MIP integrality feasibility level.
DECODE_TOL = 1e-5


class DecodeError(ValueError):
    """Solver value too far from integral, or solution shape mismatch."""


class MissingParamsError(ValueError):
    """Model build requested without the derived parameters."""


def x_name(k: int, i: int, j: int) -> str:
    return f"x[{k},{i},{j}]"


def y_name(k: int, length: int, i: int, j: int) -> str:
    return f"y[{k},{length},{i},{j}]"


def z_name(k: int, length: int, i: int, j: int) -> str:
    return f"z[{k},{length},{i},{j}]"


def fingerprint(inst: Instance, vessel: VesselProfile) -> str:
    """Stable digest of the (instance, vessel) pair for model metadata."""
    h = hashlib.md5()
    h.update(repr((vessel.name, vessel.bays, vessel.blocks)).encode())
    h.update(repr((vessel.lightship_t, vessel.tank_t, vessel.bm_lower, vessel.bm_upper)).encode())
    h.update(repr(vessel.hydro_table).encode())
    h.update(repr(vessel.bonjean_table).encode())
    h.update(
        repr(
            (
                inst.name,
                inst.n_ports,
                inst.demand_reg.tolist(),
                inst.demand_reefer.tolist(),
                inst.avg_weight_t.tolist(),
                inst.crane_limit.tolist(),
                inst.trim_lo_m,
                inst.trim_hi_m,
            )
        ).encode()
    )
    return h.hexdigest()


def decode_value(raw: float, name: str, tol: float = DECODE_TOL) -> int:
    rounded = round(raw)
    if abs(raw - rounded) > tol:
        raise DecodeError(f"{name} = {raw} is not integral within {tol}")
    return int(rounded)
