"""Solver-agnostic integer linear program container with text export.

The canonical text layout (documented in the README) is an LP-style
format restricted to what the planning models need: a minimisation
objective, linear constraints with sense <=, =, or >=, explicit bounds
for non-binary variables, and Binaries/Generals sections. Names may
contain brackets and commas; tokens are whitespace-separated. A model
written with :meth:`MipModel.to_lp_text` and read back with
:meth:`MipModel.from_lp_text` compares equal.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class ModelBuildError(ValueError):
    """Duplicate names, unknown variable references, malformed input."""


class VarType(str, enum.Enum):
    BINARY = "binary"
    INTEGER = "integer"
    CONTINUOUS = "continuous"


SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float
    ub: float
    vtype: VarType


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: dict
    sense: str
    rhs: float

    def activity(self, values: dict) -> float:
        return sum(c * values[v] for v, c in self.coeffs.items())

    def violation(self, values: dict) -> float:
        """Nonnegative violation magnitude of this constraint at ``values``."""
        act = self.activity(values)
        if self.sense == "<=":
            return max(0.0, act - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - act)
        return abs(act - self.rhs)


@dataclass(frozen=True)
class ModelStats:
    n_vars: int
    n_binary: int
    n_integer: int
    n_constraints: int


class MipModel:
    """Pure-data integer program: variables, constraints, min objective.

    Construction is single-writer; iteration order is insertion order,
    which the builders keep deterministic. Zero coefficients are dropped
    at insert so constraint storage stays sparse.
    """

    def __init__(self, kind: str = "", fingerprint: str = ""):
        self.kind = kind
        self.fingerprint = fingerprint
        #: small integer annotations (voyage/vessel shape) for decoders
        self.meta: dict[str, int] = {}
        self._vars: dict[str, Variable] = {}
        self._cons: dict[str, Constraint] = {}
        self._objective: dict[str, float] = {}

    # -- builder trio -------------------------------------------------

    def add_variable(
        self,
        name: str,
        lb: float = 0.0,
        ub: float = math.inf,
        vtype: VarType = VarType.CONTINUOUS,
    ) -> str:
        if name in self._vars:
            raise ModelBuildError(f"duplicate variable name {name!r}")
        if any(ch.isspace() for ch in name):
            raise ModelBuildError(f"variable name {name!r} contains whitespace")
        vtype = VarType(vtype)
        if vtype is VarType.BINARY:
            lb, ub = 0.0, 1.0
        if lb > ub:
            raise ModelBuildError(f"variable {name!r} has lb {lb} > ub {ub}")
        self._vars[name] = Variable(name, float(lb), float(ub), vtype)
        return name

    def add_constraint(self, name: str, coeffs: dict, sense: str, rhs: float) -> str:
        if name in self._cons:
            raise ModelBuildError(f"duplicate constraint name {name!r}")
        if any(ch.isspace() for ch in name):
            raise ModelBuildError(f"constraint name {name!r} contains whitespace")
        if sense not in SENSES:
            raise ModelBuildError(f"unknown sense {sense!r}")
        clean = {}
        for var, coef in coeffs.items():
            if var not in self._vars:
                raise ModelBuildError(f"constraint {name!r} references unknown variable {var!r}")
            if coef != 0.0:
                clean[var] = float(coef)
        self._cons[name] = Constraint(name, clean, sense, float(rhs))
        return name

    def set_objective(self, coeffs: dict) -> None:
        """Minimisation objective; unknown variables are rejected."""
        clean = {}
        for var, coef in coeffs.items():
            if var not in self._vars:
                raise ModelBuildError(f"objective references unknown variable {var!r}")
            if coef != 0.0:
                clean[var] = float(coef)
        self._objective = clean

    # -- inspection ---------------------------------------------------

    @property
    def variables(self) -> list[Variable]:
        return list(self._vars.values())

    @property
    def constraints(self) -> list[Constraint]:
        return list(self._cons.values())

    @property
    def objective(self) -> dict[str, float]:
        return dict(self._objective)

    def variable(self, name: str) -> Variable:
        return self._vars[name]

    def has_variable(self, name: str) -> bool:
        return name in self._vars

    def stats(self) -> ModelStats:
        n_bin = sum(1 for v in self._vars.values() if v.vtype is VarType.BINARY)
        n_int = sum(1 for v in self._vars.values() if v.vtype is VarType.INTEGER)
        return ModelStats(len(self._vars), n_bin, n_int, len(self._cons))

    def objective_value(self, values: dict) -> float:
        return sum(c * values[v] for v, c in self._objective.items())

    def evaluate(self, values: dict, tol: float = 1e-6) -> list[tuple[str, float]]:
        """All constraints violated beyond ``tol`` at ``values``.

        Generic reference evaluation used to cross-check solver
        incumbents and the dedicated validator.
        """
        out = []
        for con in self._cons.values():
            v = con.violation(values)
            if v > tol:
                out.append((con.name, v))
        for var in self._vars.values():
            x = values[var.name]
            if x < var.lb - tol or x > var.ub + tol:
                out.append((f"bound:{var.name}", max(var.lb - x, x - var.ub)))
            if var.vtype in (VarType.BINARY, VarType.INTEGER):
                drift = abs(x - round(x))
                if drift > tol:
                    out.append((f"integrality:{var.name}", drift))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MipModel):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.fingerprint == other.fingerprint
            and self.meta == other.meta
            and list(self._vars) == list(other._vars)
            and self._vars == other._vars
            and list(self._cons) == list(other._cons)
            and self._cons == other._cons
            and self._objective == other._objective
        )

    # -- canonical text -----------------------------------------------

    def to_lp_text(self) -> str:
        """Canonical text form; every variable gets a Bounds line so the
        declaration order survives a round-trip."""
        lines = [f"\\ kind: {self.kind}", f"\\ fingerprint: {self.fingerprint}"]
        for key in self.meta:
            lines.append(f"\\ meta {key}: {self.meta[key]}")
        lines.append("Minimize")
        lines.append(" obj: " + _format_terms(self._objective))
        lines.append("Subject To")
        for con in self._cons.values():
            lines.append(
                f" {con.name}: {_format_terms(con.coeffs)} {con.sense} {_format_num(con.rhs)}"
            )
        lines.append("Bounds")
        for var in self._vars.values():
            lines.append(f" {_format_num(var.lb)} <= {var.name} <= {_format_num(var.ub)}")
        lines.append("Binaries")
        for var in self._vars.values():
            if var.vtype is VarType.BINARY:
                lines.append(f" {var.name}")
        lines.append("Generals")
        for var in self._vars.values():
            if var.vtype is VarType.INTEGER:
                lines.append(f" {var.name}")
        lines.append("End")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_lp_text(cls, text: str) -> "MipModel":
        kind = fingerprint = ""
        meta_entries: dict[str, int] = {}
        section = None
        objective: dict[str, float] = {}
        cons: list[tuple[str, dict, str, float]] = []
        bounds: dict[str, tuple[float, float]] = {}
        order: list[str] = []
        binaries: set[str] = set()
        generals: set[str] = set()

        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("\\"):
                comment = line[1:].strip()
                if comment.startswith("kind:"):
                    kind = comment[len("kind:"):].strip()
                elif comment.startswith("fingerprint:"):
                    fingerprint = comment[len("fingerprint:"):].strip()
                elif comment.startswith("meta "):
                    key, _, value = comment[len("meta "):].partition(":")
                    meta_entries[key.strip()] = int(value)
                continue
            lowered = line.lower()
            if lowered in ("minimize", "subject to", "bounds", "binaries", "generals", "end"):
                section = lowered
                continue
            if section == "minimize":
                if not line.startswith("obj:"):
                    raise ModelBuildError(f"malformed objective line {line!r}")
                objective = _parse_terms(line[len("obj:"):].split())
            elif section == "subject to":
                name, _, rest = line.partition(":")
                if not rest:
                    raise ModelBuildError(f"malformed constraint line {line!r}")
                tokens = rest.split()
                sense_pos = next(
                    (i for i, tok in enumerate(tokens) if tok in SENSES), None
                )
                if sense_pos is None or sense_pos != len(tokens) - 2:
                    raise ModelBuildError(f"constraint {name!r} missing sense/rhs")
                coeffs = _parse_terms(tokens[:sense_pos])
                cons.append((name.strip(), coeffs, tokens[sense_pos], float(tokens[-1])))
            elif section == "bounds":
                tokens = line.split()
                if len(tokens) != 5 or tokens[1] != "<=" or tokens[3] != "<=":
                    raise ModelBuildError(f"malformed bounds line {line!r}")
                name = tokens[2]
                bounds[name] = (float(tokens[0]), float(tokens[4]))
                order.append(name)
            elif section == "binaries":
                binaries.add(line)
            elif section == "generals":
                generals.add(line)

        model = cls(kind=kind, fingerprint=fingerprint)
        model.meta.update(meta_entries)
        for name in order:
            lb, ub = bounds[name]
            if name in binaries:
                model.add_variable(name, vtype=VarType.BINARY)
            elif name in generals:
                model.add_variable(name, lb, ub, VarType.INTEGER)
            else:
                model.add_variable(name, lb, ub, VarType.CONTINUOUS)
        for name, coeffs, sense, rhs in cons:
            model.add_constraint(name, coeffs, sense, rhs)
        model.set_objective(objective)
        return model


def _format_num(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return repr(float(x))


def _format_terms(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    parts = []
    for i, (name, coef) in enumerate(coeffs.items()):
        if i == 0:
            sign = "-" if coef < 0 else ""
        else:
            sign = "- " if coef < 0 else "+ "
        parts.append(f"{sign}{_format_num(abs(coef))} {name}")
    return " ".join(parts)


def _parse_terms(tokens: list[str]) -> dict:
    coeffs: dict[str, float] = {}
    if tokens == ["0"]:
        return coeffs
    sign = 1.0
    pending: float | None = None
    for tok in tokens:
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -1.0
        elif pending is None:
            if tok.startswith("-"):
                sign = -sign
                tok = tok[1:]
            pending = float(tok)
        else:
            coeffs[tok] = sign * pending
            sign, pending = 1.0, None
    if pending is not None:
        raise ModelBuildError(f"dangling coefficient in term list {tokens!r}")
    return coeffs
