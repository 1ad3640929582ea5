"""Registers, abstract gates and circuits.

A gate acts on its ``targets`` with a unitary that may depend on the values
of its ``controls``; ``conditions`` restrict it to listed values of further
registers. Gate semantics are fixed by ``kind`` and ``params`` together with
the basis labels of the registers involved (see ``actions``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from ..partitions import IrrepLabel, format_label, format_partition

BOT = "bot"
UNCOUNTED = frozenset({"schur", "schur_dag", "measure"})


@dataclass(frozen=True)
class Register:
    name: str
    dim: int
    labels: tuple = ()
    kind: str = "path"
    init: int = 0

    def index(self, label: Any) -> int:
        return self.labels.index(label)


@dataclass
class Gate:
    kind: str
    targets: tuple[str, ...]
    controls: tuple[str, ...] = ()
    conditions: tuple[tuple[str, tuple[int, ...]], ...] = ()
    params: dict = field(default_factory=dict)

    def registers(self) -> tuple[str, ...]:
        return self.targets + self.controls + tuple(r for r, _ in self.conditions)

    def with_conditions(self, extra: Sequence[tuple[str, tuple[int, ...]]]) -> "Gate":
        return Gate(self.kind, self.targets, self.controls, self.conditions + tuple(extra), self.params)


@dataclass
class Circuit:
    registers: dict[str, Register] = field(default_factory=dict)
    gates: list[Gate] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, reg: Register) -> Register:
        if reg.name in self.registers:
            raise ValueError(f"duplicate register {reg.name}")
        self.registers[reg.name] = reg
        return reg

    def append(self, gate: Gate) -> None:
        for name in gate.registers():
            if name not in self.registers:
                raise ValueError(f"gate {gate.kind} uses unknown register {name}")
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def to_json(self) -> str:
        data = {
            "meta": _encode(self.meta),
            "registers": [
                {"name": r.name, "dim": r.dim, "kind": r.kind, "init": r.init,
                 "labels": [_label(x) for x in r.labels]}
                for r in self.registers.values()
            ],
            "gates": [
                {"kind": g.kind, "targets": list(g.targets), "controls": list(g.controls),
                 "conditions": [[r, list(v)] for r, v in g.conditions], "params": _encode(g.params)}
                for g in self.gates
            ],
        }
        return json.dumps(data, indent=1, sort_keys=True)


def _label(x: Any) -> Any:
    if isinstance(x, IrrepLabel):
        return format_label(x)
    if isinstance(x, tuple):
        return format_partition(x)
    return x


def _encode(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(_label(k)) if not isinstance(k, str) else k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        if isinstance(obj, tuple) and all(isinstance(x, int) for x in obj):
            return format_partition(obj)
        return [_encode(x) for x in obj]
    if isinstance(obj, (np.floating, float)):
        return float(repr(float(obj))) if np.isfinite(obj) else str(obj)
    return obj


def invert(gates: Sequence[Gate]) -> list[Gate]:
    """Reverse a gate sequence, toggling the dagger flag of each gate."""
    out = []
    for g in reversed(gates):
        params = dict(g.params)
        params["dagger"] = not params.get("dagger", False)
        out.append(Gate(g.kind, g.targets, g.controls, g.conditions, params))
    return out


def gate_counts(circuit: Circuit) -> dict[str, int]:
    counts: dict[str, int] = {}
    for g in circuit.gates:
        if g.kind not in UNCOUNTED:
            counts[g.kind] = counts.get(g.kind, 0) + 1
    return dict(sorted(counts.items()))


def depth(circuit: Circuit) -> int:
    """ASAP layer count; gates sharing a register of dimension > 1 cannot overlap."""
    last: dict[str, int] = {}
    best = 0
    for g in circuit.gates:
        if g.kind in UNCOUNTED:
            continue
        regs = [r for r in g.registers() if circuit.registers[r].dim > 1]
        layer = 1 + max((last.get(r, 0) for r in regs), default=0)
        for r in regs:
            last[r] = layer
        best = max(best, layer)
    return best


def fit_exponent(ns: Sequence[int], values: Sequence[float]) -> float:
    """Least-squares slope of log(value) against log(n)."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


__all__ = ["BOT", "Circuit", "Gate", "Register", "depth", "fit_exponent", "gate_counts", "invert"]
