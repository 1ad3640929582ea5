"""The mixed Schur transform as an isometry from the input register to path registers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import solve_intertwiner
from ..bratteli import yamanouchi_rows
from .core import Circuit


@dataclass
class SchurMap:
    source: str
    outputs: tuple[str, ...]
    out_dims: tuple[int, ...]
    rows: np.ndarray
    matrix: np.ndarray


def path_values(circuit: Circuit, leaf, path, j: int) -> tuple[int, ...]:
    """Register values encoding (path, multiplicity index) in the circuit's encoding."""
    meta = circuit.meta
    n, regs = meta["n"], circuit.registers
    if meta["encoding"] == "standard":
        vals = [regs[f"T{k}"].index(path[k]) for k in range(n + 1)]
    else:
        word = yamanouchi_rows(path)
        vals = [regs[f"y{k}"].index(word[k - 1]) for k in range(1, n + 1)]
    return tuple(vals) + (regs["L"].index(leaf), j)


def output_registers(circuit: Circuit) -> tuple[str, ...]:
    n = circuit.meta["n"]
    prefix = "T" if circuit.meta["encoding"] == "standard" else "y"
    first = 0 if prefix == "T" else 1
    return tuple(f"{prefix}{k}" for k in range(first, n + 1)) + ("L", "M")


def schur_map(circuit: Circuit) -> SchurMap:
    n, d = circuit.meta["n"], circuit.meta["d"]
    tw = solve_intertwiner(n, d)
    outputs = output_registers(circuit)
    dims = tuple(circuit.registers[r].dim for r in outputs)
    rows = np.zeros(tw.basis.shape[1], dtype=int)
    for leaf in tw.diagram.leaves:
        m = tw.diagram.mult(leaf)
        for p, path in enumerate(tw.diagram.paths_to(leaf)):
            for j in range(m):
                col = tw.offset[leaf] + p * m + j
                rows[col] = np.ravel_multi_index(path_values(circuit, leaf, path, j), dims)
    return SchurMap("X", outputs, dims, rows, tw.basis.T)
