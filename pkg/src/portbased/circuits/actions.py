"""Semantics of each gate kind as unitaries indexed by control values."""

from __future__ import annotations

import cmath
from itertools import product
from math import sqrt
from typing import Callable, Optional

import numpy as np

from ..bratteli import build_diagram
from ..partitions import Partition, add_to_row, cell_between
from .core import BOT, Circuit, Gate, Register

Action = list[tuple[tuple[int, ...], np.ndarray]]
_BUILDERS: dict[str, Callable[[Gate, Circuit], Action]] = {}


def builder(kind: str):
    def wrap(fn):
        _BUILDERS[kind] = fn
        return fn
    return wrap


def compile_gate(gate: Gate, circuit: Circuit) -> Action:
    """List of (control values, target unitary); absent control values act as identity."""
    try:
        fn = _BUILDERS[gate.kind]
    except KeyError:
        raise ValueError(f"no semantics for gate kind {gate.kind}") from None
    action = fn(gate, circuit)
    if gate.params.get("dagger"):
        action = [(c, m.conj().T) for c, m in action]
    return action


def _regs(gate: Gate, circuit: Circuit, names) -> list[Register]:
    return [circuit.registers[n] for n in names]


def _row(lam: Partition, i: int) -> int:
    return lam[i - 1] if i <= len(lam) else 0


def _two_level(dim: int, i: Optional[int], j: Optional[int], block: np.ndarray) -> np.ndarray:
    """Identity except ``block`` on basis states (i, j); a missing state keeps its diagonal."""
    out = np.eye(dim, dtype=block.dtype)
    idx = [(0, i), (1, j)]
    for a, p in idx:
        for b, q in idx:
            if p is not None and q is not None:
                out[p, q] = block[a, b]
    return out


def _axial_block(r: int) -> np.ndarray:
    s = sqrt(1.0 - 1.0 / r**2)
    return np.array([[1.0 / r, s], [s, -1.0 / r]])


def _skew_rows(mu: Partition, nu: Partition) -> Optional[tuple[int, int]]:
    """Rows of the two cells of nu / mu if they lie in different rows."""
    if not isinstance(nu, tuple) or sum(nu) != sum(mu) + 2:
        return None
    rows = []
    for i in range(1, max(len(mu), len(nu)) + 1):
        diff = _row(nu, i) - _row(mu, i)
        if diff < 0:
            return None
        rows.extend([i] * diff)
    if len(rows) != 2 or rows[0] == rows[1]:
        return None
    return rows[0], rows[1]


@builder("R_jk")
def _r_jk(gate: Gate, circuit: Circuit) -> Action:
    """Transposition on T^i controlled on (T^{i-1}, T^{i+1}), rows j < k."""
    (tgt,) = _regs(gate, circuit, gate.targets)
    lo, hi = _regs(gate, circuit, gate.controls)
    j, k = gate.params["j"], gate.params["k"]
    out = []
    for a, mu in enumerate(lo.labels):
        for b, nu in enumerate(hi.labels):
            if _skew_rows(mu, nu) != (j, k):
                continue
            r = _row(mu, j) - _row(mu, k) + k - j
            alpha, beta = add_to_row(mu, k), add_to_row(mu, j)
            ia = tgt.labels.index(alpha) if alpha in tgt.labels else None
            ib = tgt.labels.index(beta)
            if ia is None and abs(r) != 1:
                raise AssertionError("missing partner state with |r| != 1")
            out.append(((a, b), _two_level(tgt.dim, ia, ib, _axial_block(r))))
    return out


@builder("R_jk_y")
def _r_jk_y(gate: Gate, circuit: Circuit) -> Action:
    """Transposition on the word pair (y_i, y_{i+1}) controlled on W = T^{i-1}.

    Word pairs whose partitions leave the dilated diagram are unreachable and
    left alone; so are W values not at level i-1.
    """
    y1, y2 = _regs(gate, circuit, gate.targets)
    (work,) = _regs(gate, circuit, gate.controls)
    j, k, level = gate.params["j"], gate.params["k"], gate.params["level"]
    allowed = set(build_diagram(circuit.meta["n"], circuit.meta["d"], dilated=True).levels[level + 1])
    out = []
    for w, mu in enumerate(work.labels):
        if not isinstance(mu, tuple) or sum(mu) != level - 1:
            continue
        r = _row(mu, j) - _row(mu, k) + k - j

        def pair(first, second):
            mid = add_to_row(mu, first)
            top = add_to_row(mid, second) if mid is not None else None
            if top not in allowed or first not in y1.labels or second not in y2.labels:
                return None
            return y1.labels.index(first) * y2.dim + y2.labels.index(second)

        ia, ib = pair(k, j), pair(j, k)
        if ib is None:
            continue
        if ia is None and abs(r) != 1:
            raise AssertionError("missing partner state with |r| != 1")
        out.append(((w,), _two_level(y1.dim * y2.dim, ia, ib, _axial_block(r))))
    return out


@builder("rec")
def _rec(gate: Gate, circuit: Circuit) -> Action:
    """W <- W + cell in row y; completed to a permutation of the work register."""
    (work,) = _regs(gate, circuit, gate.targets)
    (word,) = _regs(gate, circuit, gate.controls)
    out = []
    for y, row in enumerate(word.labels):
        if not isinstance(row, int):
            continue
        mapping = {}
        for s, mu in enumerate(work.labels):
            if isinstance(mu, tuple):
                nu = add_to_row(mu, row)
                if nu is not None and nu in work.labels:
                    mapping[s] = work.labels.index(nu)
        free_src = [s for s in range(work.dim) if s not in mapping]
        free_dst = [t for t in range(work.dim) if t not in set(mapping.values())]
        mapping.update(zip(free_src, free_dst))
        mat = np.zeros((work.dim, work.dim))
        for s, t in mapping.items():
            mat[t, s] = 1.0
        out.append(((y,), mat))
    return out


def _rotation_chain(weights: dict, rows: list[int]) -> dict[int, tuple[float, float]]:
    """Stick-breaking angles (cos, sin) per row for the given squared amplitudes.

    When the weights sum to one the last row takes everything left, so no
    rounding residue stays behind on the starting state.
    """
    complete = abs(sum(float(weights[r]) for r in rows) - 1.0) < 1e-9
    total = 1.0
    out = {}
    for pos, row in enumerate(rows):
        eta = float(weights[row])
        if total <= 1e-15:
            out[row] = (1.0, 0.0)
            continue
        rest = 0.0 if complete and pos == len(rows) - 1 else max(total - eta, 0.0)
        out[row] = (sqrt(rest / total), sqrt(1.0 - rest / total))
        total = rest
    return out


def _target_state(tgt: Register, lam: Partition, row: int) -> Optional[int]:
    label = row if tgt.kind == "word" else add_to_row(lam, row)
    return tgt.labels.index(label) if label in tgt.labels else None


@builder("R_i")
def _r_i(gate: Gate, circuit: Circuit) -> Action:
    """Row-i rotation of W_lam on (bot, lam + a_i), controlled on (T^{n-1} or W, leaf)."""
    (tgt,) = _regs(gate, circuit, gate.targets)
    prev, leaf_reg = _regs(gate, circuit, gate.controls)
    row = gate.params["row"]
    table = gate.params["weights"]
    bot = tgt.labels.index(BOT)
    out = []
    for li, leaf in enumerate(leaf_reg.labels):
        if leaf.right or leaf.left not in table:
            continue
        lam = leaf.left
        weights = table[lam]
        if row not in weights:
            continue
        c, s = _rotation_chain(weights, sorted(weights))[row]
        idx = _target_state(tgt, lam, row)
        if idx is None:
            raise AssertionError(f"row {row} state missing for {lam}")
        p = prev.labels.index(lam)
        out.append(((p, li), _two_level(tgt.dim, bot, idx, np.array([[c, -s], [s, c]]))))
    return out


@builder("phase")
def _phase(gate: Gate, circuit: Circuit) -> Action:
    """omega^{k i} on bot, for ancilla value i, when T^{n-1} (or W) = lam and leaf = (lam, empty)."""
    (tgt,) = _regs(gate, circuit, gate.targets)
    prev, leaf_reg, anc = _regs(gate, circuit, gate.controls)
    k = gate.params["k"]
    bot = tgt.labels.index(BOT)
    out = []
    for li, leaf in enumerate(leaf_reg.labels):
        if leaf.right or leaf.left not in prev.labels:
            continue
        p = prev.labels.index(leaf.left)
        for i in range(1, anc.dim):
            mat = np.eye(tgt.dim, dtype=complex)
            mat[bot, bot] = cmath.exp(2j * cmath.pi * k * i / anc.dim)
            out.append(((p, li, i), mat))
    return out


@builder("qft")
def _qft(gate: Gate, circuit: Circuit) -> Action:
    (anc,) = _regs(gate, circuit, gate.targets)
    n = anc.dim
    x = np.arange(n)
    return [((), np.exp(2j * np.pi * np.outer(x, x) / n) / sqrt(n))]


@builder("U_la")
def _u_la(gate: Gate, circuit: Circuit) -> Action:
    """[[sqrt G, -sqrt(1-G)], [sqrt(1-G), sqrt G]] on the qubit, G read from (T^n or W, leaf)."""
    top_reg, leaf_reg = _regs(gate, circuit, gate.controls)
    table = gate.params["G"]
    out = []
    for li, leaf in enumerate(leaf_reg.labels):
        if leaf.right:
            continue
        lam = leaf.left
        for t, nu in enumerate(top_reg.labels):
            if not isinstance(nu, tuple) or sum(nu) != sum(lam) + 1:
                continue
            try:
                row = cell_between(lam, nu).row
            except ValueError:
                continue
            g = float(table.get(lam, {}).get(row, 0))
            s, c = sqrt(g), sqrt(max(1.0 - g, 0.0))
            out.append(((t, li), np.array([[s, -c], [c, s]])))
    return out


@builder("F")
def _f(gate: Gate, circuit: Circuit) -> Action:
    """Prepares sum_a amp(nu, a) |nu + a> from bot on T^i, controlled on T^{i-1} = nu."""
    (tgt,) = _regs(gate, circuit, gate.targets)
    (prev,) = _regs(gate, circuit, gate.controls)
    table = gate.params["amplitudes"]
    bot = tgt.labels.index(BOT)
    out = []
    for p, nu in enumerate(prev.labels):
        if nu not in table:
            continue
        weights = table[nu]
        mat = np.eye(tgt.dim)
        for row, (c, s) in _rotation_chain(weights, sorted(weights)).items():
            idx = tgt.labels.index(add_to_row(nu, row))
            mat = _two_level(tgt.dim, bot, idx, np.array([[c, -s], [s, c]])) @ mat
        out.append(((p,), mat))
    return out


@builder("copy")
def _copy(gate: Gate, circuit: Circuit) -> Action:
    """Swaps bot and the control's value on the mirror register."""
    (tgt,) = _regs(gate, circuit, gate.targets)
    (src,) = _regs(gate, circuit, gate.controls)
    bot = tgt.labels.index(BOT)
    out = []
    for s, lab in enumerate(src.labels):
        if lab == BOT:
            continue
        t = tgt.labels.index(lab)
        mat = np.eye(tgt.dim)
        mat[[bot, t]] = mat[[t, bot]]
        out.append(((s,), mat))
    return out


def control_values(gate: Gate, circuit: Circuit) -> list[dict[str, int]]:
    """All assignments of the condition registers allowed by the gate."""
    names = [r for r, _ in gate.conditions]
    choices = [vals for _, vals in gate.conditions]
    return [dict(zip(names, combo)) for combo in product(*choices)]


