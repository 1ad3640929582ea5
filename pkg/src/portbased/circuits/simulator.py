"""Deterministic statevector simulation with lazily allocated registers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .actions import compile_gate, control_values
from .core import Circuit, Gate
from .schur import SchurMap, schur_map


@dataclass
class SimResult:
    names: list[str]
    state: np.ndarray
    probabilities: dict[str, np.ndarray] = field(default_factory=dict)

    def axis(self, name: str) -> int:
        return self.names.index(name)

    def marginal(self, name: str) -> np.ndarray:
        ax = self.axis(name)
        probs = np.abs(self.state) ** 2
        return probs.sum(axis=tuple(i for i in range(probs.ndim) if i != ax))

    def branch(self, fixed: dict[str, int]) -> tuple[list[str], np.ndarray]:
        """Unnormalised state with the given registers projected onto values."""
        idx = tuple(fixed.get(n, slice(None)) for n in self.names)
        return [n for n in self.names if n not in fixed], self.state[idx]


class Simulator:
    def __init__(self, circuit: Circuit):
        self.circuit = circuit
        self._cache: dict[int, list] = {}
        self._schur: Optional[SchurMap] = None

    def _action(self, gate: Gate) -> list:
        key = id(gate)
        if key not in self._cache:
            self._cache[key] = compile_gate(gate, self.circuit)
        return self._cache[key]

    def _allocate(self, names: list[str], state: np.ndarray, regs: Sequence[str]) -> np.ndarray:
        for r in regs:
            if r in names:
                continue
            reg = self.circuit.registers[r]
            vec = np.zeros(reg.dim, dtype=state.dtype)
            vec[reg.init] = 1.0
            state = np.multiply.outer(state, vec)
            names.append(r)
        return state

    def run(self, initial: np.ndarray, initial_regs: Sequence[str]) -> SimResult:
        names = list(initial_regs)
        dims = [self.circuit.registers[r].dim for r in names]
        state = np.asarray(initial, dtype=complex).reshape(dims)
        probabilities = {}
        for gate in self.circuit.gates:
            if gate.kind == "measure":
                res = SimResult(names, state)
                probabilities[gate.targets[0]] = res.marginal(gate.targets[0])
                continue
            if gate.kind in ("schur", "schur_dag"):
                state, names = self._apply_schur(gate, state, names)
                continue
            state = self._allocate(names, state, gate.registers())
            state = self._apply(gate, state, names)
        return SimResult(names, state, probabilities)

    def _apply(self, gate: Gate, state: np.ndarray, names: list[str]) -> np.ndarray:
        action = self._action(gate)
        if not action:
            return state
        tax = [names.index(t) for t in gate.targets]
        tdims = [state.shape[a] for a in tax]
        tdim = int(np.prod(tdims))
        for cond in control_values(gate, self.circuit):
            for cvals, mat in action:
                idx: list = [slice(None)] * state.ndim
                for c, v in zip(gate.controls, cvals):
                    idx[names.index(c)] = v
                for c, v in cond.items():
                    if idx[names.index(c)] != slice(None) and idx[names.index(c)] != v:
                        break
                    idx[names.index(c)] = v
                else:
                    self._apply_at(state, tuple(idx), tax, tdims, tdim, mat)
        return state

    @staticmethod
    def _apply_at(state, idx, tax, tdims, tdim, mat) -> None:
        fixed = [i for i, x in enumerate(idx) if not isinstance(x, slice)]
        sub = state[idx]
        sub_axes = [a - sum(1 for f in fixed if f < a) for a in tax]
        moved = np.moveaxis(sub, sub_axes, list(range(len(sub_axes))))
        shape = moved.shape
        new = (mat @ moved.reshape(tdim, -1)).reshape(shape)
        state[idx] = np.moveaxis(new, list(range(len(sub_axes))), sub_axes)

    def _apply_schur(self, gate: Gate, state: np.ndarray, names: list[str]):
        if self._schur is None:
            self._schur = schur_map(self.circuit)
        sm = self._schur
        if gate.kind == "schur":
            ax = names.index(sm.source)
            moved = np.moveaxis(state, ax, 0)
            rest = moved.shape[1:]
            flat = sm.matrix @ moved.reshape(moved.shape[0], -1)
            out = np.zeros((int(np.prod(sm.out_dims)), flat.shape[1]), dtype=complex)
            out[sm.rows] = flat
            new_names = [n for n in names if n != sm.source] + list(sm.outputs)
            out = out.reshape(tuple(sm.out_dims) + rest)
            out = np.moveaxis(out, list(range(len(sm.out_dims))), list(range(len(rest), len(rest) + len(sm.out_dims))))
            return out, new_names
        state = self._allocate(names, state, sm.outputs)
        axes = [names.index(o) for o in sm.outputs]
        moved = np.moveaxis(state, axes, list(range(len(axes))))
        rest = moved.shape[len(axes):]
        flat = moved.reshape(-1, int(np.prod(rest)) if rest else 1)
        back = sm.matrix.conj().T @ flat[sm.rows]
        new_names = [n for n in names if n not in sm.outputs] + [sm.source]
        back = back.reshape((back.shape[0],) + rest)
        return np.moveaxis(back, 0, -1), new_names
