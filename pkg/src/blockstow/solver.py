"""Branch-and-bound engine for the planning models plus an external bridge.

The engine is a classic LP-based branch and bound: node relaxations are
solved with scipy's HiGHS linear programming backend, node selection is
best-bound, and branching picks the most fractional integer variable
with lowest declaration index as tie-break. The search is single
threaded and fully deterministic for a given model.

Intended for desk-scale instances and oracle duty in tests; anything
bigger should go through :func:`solve_with_adapter` to an external MIP
solver speaking the documented file protocol.
"""

from __future__ import annotations

import heapq
import math
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .mip import MipModel, VarType

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
TIME_LIMIT = "time-limit"
UNBOUNDED = "unbounded"


class EngineError(RuntimeError):
    """Numerical failure or protocol violation inside a solve."""


class EngineSizeError(ValueError):
    """Model exceeds the configured cap of the exact engine."""


class EngineLimitError(RuntimeError):
    """An exact solve was cut off by a node or time limit before proving."""


@dataclass
class SolverConfig:
    """Knobs of one solve.

    ``rel_gap_target`` is the proven relative duality gap at which a
    solution is accepted as optimal; ``first_feasible`` stops at the
    first incumbent, which is all a feasibility question needs. The seed
    is accepted for interface stability; the engine contains no random
    choices, so outcomes are identical for every seed.
    """

    time_limit_s: float = 3600.0
    rel_gap_target: float = 0.01
    node_limit: int | None = None
    deterministic_seed: int = 0
    first_feasible: bool = False
    enable_dive: bool = True
    int_tol: float = 1e-6
    feasibility_tol: float = 1e-6

    def __post_init__(self):
        if self.time_limit_s <= 0:
            raise ValueError("time_limit_s must be positive")
        if not 0.0 <= self.rel_gap_target < 1.0:
            raise ValueError("rel_gap_target must be in [0, 1)")


@dataclass
class SolveOutcome:
    """Result of one solve: status, incumbent, bound, gap, timing."""

    status: str
    values: dict | None
    objective: float | None
    bound: float
    gap: float
    wall_time_s: float
    n_nodes: int = 0

    @property
    def feasible(self) -> bool:
        return self.values is not None


class _Compiled:
    """MipModel lowered to arrays for repeated LP solves."""

    def __init__(self, model: MipModel):
        self.names = [v.name for v in model.variables]
        index = {n: i for i, n in enumerate(self.names)}
        n = len(self.names)
        self.lb = np.array([v.lb for v in model.variables], dtype=float)
        self.ub = np.array([v.ub for v in model.variables], dtype=float)
        self.int_mask = np.array(
            [v.vtype in (VarType.BINARY, VarType.INTEGER) for v in model.variables]
        )
        self.c = np.zeros(n)
        for name, coef in model.objective.items():
            self.c[index[name]] = coef

        ub_trip, ub_rhs = ([], [], []), []
        eq_trip, eq_rhs = ([], [], []), []
        self.constant_infeasible = False
        for con in model.constraints:
            if not con.coeffs:
                # Constant constraint: decide it now instead of shipping
                # a zero row to the LP.
                if con.violation({}) > 1e-9:
                    self.constant_infeasible = True
                continue
            flip = -1.0 if con.sense == ">=" else 1.0
            trip, rhs = (eq_trip, eq_rhs) if con.sense == "=" else (ub_trip, ub_rhs)
            row_idx = len(rhs)
            for name, coef in con.coeffs.items():
                trip[0].append(row_idx)
                trip[1].append(index[name])
                trip[2].append(flip * coef)
            rhs.append(flip * con.rhs)

        def assemble(trip, rhs):
            if not rhs:
                return None, None
            mat = sparse.csr_matrix(
                (trip[2], (trip[0], trip[1])), shape=(len(rhs), n)
            )
            return mat, np.array(rhs)

        self.A_ub, self.b_ub = assemble(ub_trip, ub_rhs)
        self.A_eq, self.b_eq = assemble(eq_trip, eq_rhs)

        # Integral objective (all coefficients integral and attached to
        # integer variables) permits ceiling the LP bound at every node.
        self.obj_integral = all(
            float(coef).is_integer() and self.int_mask[index[name]]
            for name, coef in model.objective.items()
        )

    @property
    def n(self) -> int:
        return len(self.names)

    def lp(self, lb: np.ndarray, ub: np.ndarray):
        """Solve the relaxation with the given bounds.

        Returns (code, x, fun) with code 0 ok, 2 infeasible, 3 unbounded.
        """
        res = linprog(
            self.c,
            A_ub=self.A_ub,
            b_ub=self.b_ub,
            A_eq=self.A_eq,
            b_eq=self.b_eq,
            bounds=np.column_stack([lb, ub]),
            method="highs",
        )
        if res.status in (0, 2, 3):
            return res.status, res.x, res.fun
        raise EngineError(f"LP backend failed with status {res.status}: {res.message}")


def _fractionality(x: np.ndarray, int_mask: np.ndarray, tol: float) -> np.ndarray:
    frac = np.abs(x - np.round(x))
    frac[~int_mask] = 0.0
    frac[frac <= tol] = 0.0
    return frac


def _feasibility_pump(
    comp: _Compiled, lb, ub, x0, tol: float, seed: int, max_iters: int = 60
):
    """Classic feasibility pump over the binary variables.

    Alternates between an LP point and its rounding, each LP minimising
    the L1 distance to the current rounding; cycles are broken by
    seed-deterministic flips of the most fractional components. General
    integer variables ride along in the LP and are finished off with the
    rounding dive by the caller.
    """
    binary = comp.int_mask & (comp.lb == 0.0) & (comp.ub == 1.0)
    if not binary.any():
        return None
    rng = np.random.default_rng(seed)
    x = x0
    x_round = np.clip(np.round(x), lb, ub)
    last_rounds = []
    for _ in range(max_iters):
        c_dist = np.zeros(comp.n)
        c_dist[binary & (x_round <= 0.5)] = 1.0
        c_dist[binary & (x_round > 0.5)] = -1.0
        res = linprog(
            c_dist,
            A_ub=comp.A_ub,
            b_ub=comp.b_ub,
            A_eq=comp.A_eq,
            b_eq=comp.b_eq,
            bounds=np.column_stack([lb, ub]),
            method="highs",
        )
        if res.status != 0:
            return None
        x = res.x
        frac = _fractionality(x, binary, tol)
        if frac.max(initial=0.0) == 0.0:
            return x
        # Randomised threshold rounding spreads symmetric fractional mass
        # onto one block instead of oscillating around 0.5.
        theta = 0.5 if not last_rounds else float(rng.uniform(0.3, 0.7))
        new_round = np.where(binary, (x >= theta).astype(float), np.round(x))
        new_round = np.clip(new_round, lb, ub)
        key = new_round[binary].tobytes()
        if key in last_rounds:
            flips = np.flatnonzero(binary)[np.argsort(-frac[binary], kind="stable")]
            n_flip = min(len(flips), int(rng.integers(4, 16)))
            chosen = flips[:n_flip]
            new_round[chosen] = 1.0 - new_round[chosen]
        last_rounds.append(key)
        if len(last_rounds) > 6:
            last_rounds.pop(0)
        x_round = new_round
    return None


def _dfs_feasible(comp: _Compiled, lb, ub, tol: float, max_lps: int = 250):
    """Depth-first search for any integral point, nearest rounding first.

    Branches on the most fractional variable but explores the child on
    the rounding side before the other, which drives straight toward an
    integral leaf; the stack keeps the siblings for backtracking.
    """
    stack = [(lb, ub)]
    lps = 0
    while stack and lps < max_lps:
        lb, ub = stack.pop()
        code, x, _ = comp.lp(lb, ub)
        lps += 1
        if code != 0:
            continue
        frac = _fractionality(x, comp.int_mask, tol)
        if frac.max(initial=0.0) == 0.0:
            return x
        i = int(np.argmax(frac))
        v = x[i]
        down = (lb, _with(ub, i, math.floor(v)))
        up = (_with(lb, i, math.ceil(v)), ub)
        nearest_first = (down, up) if v - math.floor(v) <= 0.5 else (up, down)
        stack.append(nearest_first[1])
        stack.append(nearest_first[0])
    return None


def _dive(comp: _Compiled, lb, ub, x, tol: float, max_lps: int = 60):
    """Rounding dive: repeatedly fix a batch of near-integral variables
    and re-solve; back off to single-variable fixing when a batch makes
    the relaxation infeasible.

    Cheap incumbent source, bounded by ``max_lps`` extra LP solves.
    """
    lb, ub = lb.copy(), ub.copy()
    lps = 0
    while lps < max_lps:
        frac = _fractionality(x, comp.int_mask, tol)
        open_idx = np.flatnonzero(frac > 0)
        if len(open_idx) == 0:
            return x
        by_frac = open_idx[np.argsort(frac[open_idx], kind="stable")]
        batch = by_frac[: max(1, len(by_frac) // 4)]
        saved = lb[batch].copy(), ub[batch].copy()
        for i in batch:
            v = float(np.clip(np.round(x[i]), lb[i], ub[i]))
            lb[i] = ub[i] = v
        code, nx, _ = comp.lp(lb, ub)
        lps += 1
        if code == 0:
            x = nx
            continue
        if len(batch) == 1:
            return None
        # Batch was too greedy; retry with just the most decided variable.
        lb[batch], ub[batch] = saved
        i = batch[0]
        v = float(np.clip(np.round(x[i]), lb[i], ub[i]))
        lb[i] = ub[i] = v
        code, nx, _ = comp.lp(lb, ub)
        lps += 1
        if code != 0:
            return None
        x = nx
    return None


def solve(model: MipModel, cfg: SolverConfig | None = None) -> SolveOutcome:
    """Branch-and-bound solve of ``model`` under ``cfg``.

    Status semantics: ``optimal`` means the relative gap was proven at or
    below the target; ``infeasible`` is proven, never a timeout in
    disguise; ``time-limit`` carries the best incumbent found, if any.
    """
    cfg = cfg or SolverConfig()
    t0 = time.monotonic()
    comp = _Compiled(model)

    def done(status, inc_x, inc_obj, bound, nodes):
        wall = time.monotonic() - t0
        if inc_x is None:
            gap = math.inf
            values = None
            objective = None
        else:
            values = {name: float(v) for name, v in zip(comp.names, inc_x)}
            objective = float(inc_obj)
            if inc_obj == bound:
                gap = 0.0
            else:
                gap = max(0.0, (inc_obj - bound) / max(abs(inc_obj), 1e-12))
        return SolveOutcome(status, values, objective, float(bound), gap, wall, nodes)

    if comp.constant_infeasible:
        return done(INFEASIBLE, None, None, math.inf, 0)
    if comp.n == 0:
        return done(OPTIMAL, np.zeros(0), 0.0, 0.0, 0)
    if (comp.lb > comp.ub).any():
        return done(INFEASIBLE, None, None, math.inf, 0)

    code, x, fun = comp.lp(comp.lb, comp.ub)
    if code == 2:
        return done(INFEASIBLE, None, None, math.inf, 0)
    if code == 3:
        return done(UNBOUNDED, None, None, -math.inf, 0)

    def node_bound(fun):
        return math.ceil(fun - 1e-6) if comp.obj_integral else fun

    inc_x, inc_obj = None, math.inf

    def try_incumbent(x, obj):
        nonlocal inc_x, inc_obj
        if obj < inc_obj - 1e-9:
            inc_x = np.clip(np.where(comp.int_mask, np.round(x), x), comp.lb, comp.ub)
            inc_obj = obj

    binary_mask = comp.int_mask & (comp.lb == 0.0) & (comp.ub == 1.0)

    def hunt_incumbent(lb, ub, x, attempt, pump_iters=40, dfs_lps=120):
        """Layered primal heuristics: rounding dive, feasibility pump over
        the binaries with an integer finish, then a bounded depth-first
        hunt for any integral point."""
        dived = _dive(comp, lb, ub, x, cfg.int_tol)
        if dived is not None:
            try_incumbent(dived, float(comp.c @ dived))
            return
        pumped = _feasibility_pump(
            comp, lb, ub, x, cfg.int_tol, cfg.deterministic_seed + attempt, pump_iters
        )
        if pumped is not None:
            if _fractionality(pumped, comp.int_mask, cfg.int_tol).max(initial=0.0) == 0.0:
                try_incumbent(pumped, float(comp.c @ pumped))
                return
            fixed_lb, fixed_ub = lb.copy(), ub.copy()
            rounded = np.round(pumped)
            fixed_lb[binary_mask] = rounded[binary_mask]
            fixed_ub[binary_mask] = rounded[binary_mask]
            code, x2, _ = comp.lp(fixed_lb, fixed_ub)
            if code == 0:
                if _fractionality(x2, comp.int_mask, cfg.int_tol).max(initial=0.0) == 0.0:
                    try_incumbent(x2, float(comp.c @ x2))
                    return
                finished = _dive(comp, fixed_lb, fixed_ub, x2, cfg.int_tol)
                if finished is None:
                    finished = _dfs_feasible(comp, fixed_lb, fixed_ub, cfg.int_tol, dfs_lps)
                if finished is not None:
                    try_incumbent(finished, float(comp.c @ finished))
                    return
        found = _dfs_feasible(comp, lb, ub, cfg.int_tol, dfs_lps)
        if found is not None:
            try_incumbent(found, float(comp.c @ found))

    frac = _fractionality(x, comp.int_mask, cfg.int_tol)
    heap = []
    seq = 0
    root_bound = node_bound(fun)
    if frac.max(initial=0.0) == 0.0:
        try_incumbent(x, fun)
    else:
        heapq.heappush(heap, (root_bound, seq, comp.lb.copy(), comp.ub.copy(), x))
        seq += 1
        if cfg.enable_dive:
            hunt_incumbent(comp.lb, comp.ub, x, attempt=0, pump_iters=60)

    nodes = 0
    status = None
    global_lb = root_bound

    while True:
        # Lower bound of the whole tree: the smallest open-node bound, or
        # the incumbent once the tree is exhausted.
        if heap:
            global_lb = heap[0][0]
        elif inc_x is not None:
            global_lb = inc_obj

        if inc_x is not None:
            gap = 0.0 if inc_obj == global_lb else max(
                0.0, (inc_obj - global_lb) / max(abs(inc_obj), 1e-12)
            )
            if gap <= cfg.rel_gap_target + 1e-12:
                status = OPTIMAL
                break
            if cfg.first_feasible:
                status = FEASIBLE
                break
        if not heap:
            status = OPTIMAL if inc_x is not None else INFEASIBLE
            if inc_x is None:
                global_lb = math.inf
            break
        if time.monotonic() - t0 > cfg.time_limit_s:
            status = TIME_LIMIT
            break
        if cfg.node_limit is not None and nodes >= cfg.node_limit:
            status = TIME_LIMIT
            break

        bound, _, lb, ub, x = heapq.heappop(heap)
        if bound >= inc_obj - 1e-9:
            # Fathomed: nothing below this node can improve the incumbent.
            continue

        nodes += 1
        frac = _fractionality(x, comp.int_mask, cfg.int_tol)
        branch_var = int(np.argmax(frac))
        xv = x[branch_var]

        for child_lb, child_ub in (
            (lb, _with(ub, branch_var, math.floor(xv))),
            (_with(lb, branch_var, math.ceil(xv)), ub),
        ):
            if child_lb[branch_var] > child_ub[branch_var]:
                continue
            code, cx, cfun = comp.lp(child_lb, child_ub)
            if code != 0:
                continue
            cbound = max(node_bound(cfun), bound)
            if cbound >= inc_obj - 1e-9:
                continue
            cfrac = _fractionality(cx, comp.int_mask, cfg.int_tol)
            if cfrac.max(initial=0.0) == 0.0:
                try_incumbent(cx, cfun)
            else:
                heapq.heappush(heap, (cbound, seq, child_lb, child_ub, cx))
                seq += 1

        if cfg.enable_dive and nodes % 16 == 0 and inc_x is None:
            hunt_incumbent(lb, ub, x, attempt=nodes, pump_iters=25)

    return done(status, inc_x, inc_obj, global_lb, nodes)


def _with(arr: np.ndarray, i: int, value: float) -> np.ndarray:
    out = arr.copy()
    out[i] = value
    return out


def branch_and_bound_exact(
    model: MipModel,
    *,
    node_limit: int | None = None,
    max_discrete_vars: int = 64,
) -> SolveOutcome:
    """Proven-optimal (or proven-infeasible) solve for small pure-integer models.

    Refuses models with continuous variables, unbounded integer domains,
    or more than ``max_discrete_vars`` discrete variables; such models
    belong to an external solver via the adapter.
    """
    n_discrete = 0
    for var in model.variables:
        if var.vtype is VarType.CONTINUOUS:
            raise EngineSizeError(f"exact engine is pure-integer; {var.name!r} is continuous")
        if math.isinf(var.lb) or math.isinf(var.ub):
            raise EngineSizeError(f"exact engine needs finite bounds; {var.name!r} is unbounded")
        n_discrete += 1
    if n_discrete > max_discrete_vars:
        raise EngineSizeError(
            f"{n_discrete} discrete variables exceed the exact-engine cap of "
            f"{max_discrete_vars}; use an external solver adapter"
        )
    cfg = SolverConfig(time_limit_s=1e12, rel_gap_target=0.0, node_limit=node_limit)
    outcome = solve(model, cfg)
    if outcome.status not in (OPTIMAL, INFEASIBLE):
        raise EngineLimitError(f"exact solve stopped early with status {outcome.status}")
    return outcome


# -- external solver bridge -------------------------------------------


def solve_with_adapter(
    model: MipModel, command: list[str], workdir: str | None = None
) -> SolveOutcome:
    """Drive an external MIP solver through the file protocol.

    The model is written in canonical text form to ``model.lp`` inside a
    working directory, then ``command`` is invoked with that path
    appended. The process must print on stdout::

        status <optimal|feasible|infeasible|time-limit|unbounded>
        bound <float>
        time <seconds>
        <variable name> <value>      (one line per nonzero, others default 0)

    The objective is recomputed from the returned values, never trusted.
    """
    t0 = time.monotonic()
    with tempfile.TemporaryDirectory() as tmp:
        base = Path(workdir) if workdir else Path(tmp)
        base.mkdir(parents=True, exist_ok=True)
        lp_path = base / "model.lp"
        lp_path.write_text(model.to_lp_text())
        proc = subprocess.run(
            list(command) + [str(lp_path)], capture_output=True, text=True
        )
    if proc.returncode != 0:
        raise EngineError(
            f"external solver exited with code {proc.returncode}: {proc.stderr.strip()}"
        )
    status, bound, solver_time = None, math.inf, None
    values = {v.name: 0.0 for v in model.variables}
    seen_solution = False
    for line in proc.stdout.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "status":
            status = rest.strip()
        elif key == "bound":
            bound = float(rest)
        elif key == "time":
            solver_time = float(rest)
        else:
            if key not in values:
                raise EngineError(f"external solver returned unknown variable {key!r}")
            values[key] = float(rest)
            seen_solution = True
    if status not in (OPTIMAL, FEASIBLE, INFEASIBLE, TIME_LIMIT, UNBOUNDED):
        raise EngineError(f"external solver returned unknown status {status!r}")
    wall = solver_time if solver_time is not None else time.monotonic() - t0
    if status in (INFEASIBLE, UNBOUNDED) or not seen_solution and status == TIME_LIMIT:
        return SolveOutcome(status, None, None, bound, math.inf, wall)
    objective = model.objective_value(values)
    if objective == bound:
        gap = 0.0
    else:
        gap = max(0.0, (objective - bound) / max(abs(objective), 1e-12))
    return SolveOutcome(status, values, objective, bound, gap, wall)
