"""Circuit synthesis for both path encodings.

Standard encoding: one register ``T{i}`` per level holding a vertex of the
dilated diagram (``Tn`` also has a ``bot`` state used by W). Yamanouchi
encoding: registers ``y{i}`` holding the row added at step i, plus a work
register ``W`` that records partitions on demand. Both share the leaf
register ``L``, multiplicity ``M``, phase-estimation ancilla ``anc`` and, for
deformed measurements, the dilation qubit ``q``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from ..bratteli import build_diagram
from ..measurements import GDiag
from ..partitions import Partition, addable_cells, branch_ratio
from .core import BOT, Circuit, Gate, Register, invert

STANDARD = "standard"
YAMANOUCHI = "yamanouchi"
ENCODINGS = (STANDARD, YAMANOUCHI)


def _check(n: int, d: int, encoding: str = STANDARD) -> None:
    if n < 2:
        raise ValueError("circuits need n >= 2")
    if d < 2:
        raise ValueError("d must be at least 2")
    if encoding not in ENCODINGS:
        raise ValueError(f"unknown encoding {encoding}")


def new_circuit(n: int, d: int, encoding: str, *, leaf: bool = True, work: bool = True) -> Circuit:
    _check(n, d, encoding)
    dil = build_diagram(n, d, dilated=True)
    circ = Circuit(meta={"n": n, "d": d, "encoding": encoding})
    circ.add(Register("X", d ** (n + 1), tuple(range(d ** (n + 1))), "input"))
    if encoding == STANDARD:
        for k in range(n + 1):
            labels = dil.levels[k] + ((BOT,) if k == n else ())
            circ.add(Register(f"T{k}", len(labels), labels, "path"))
    else:
        circ.add(Register("y1", 1, (1,), "word"))
        rows = tuple(range(1, d + 2))
        for k in range(2, n + 1):
            labels = rows + ((BOT,) if k == n else ())
            circ.add(Register(f"y{k}", len(labels), labels, "word"))
        if work:
            verts = tuple(v for level in dil.levels for v in level)
            circ.add(Register("W", len(verts), verts, "work", init=verts.index(())))
    if leaf:
        circ.add(Register("L", len(dil.leaves), dil.leaves, "leaf"))
        mult = max(dil.mult(x) for x in dil.leaves)
        circ.add(Register("M", mult, tuple(range(mult)), "mult"))
    return circ


# building blocks

def sigma_gates(i: int, d: int, encoding: str) -> list[Gate]:
    pairs = [(j, k) for j in range(1, d + 2) for k in range(j + 1, d + 2)]
    if encoding == STANDARD:
        return [Gate("R_jk", (f"T{i}",), (f"T{i - 1}", f"T{i + 1}"), params={"j": j, "k": k}) for j, k in pairs]
    return [Gate("R_jk_y", (f"y{i}", f"y{i + 1}"), ("W",), params={"j": j, "k": k, "level": i}) for j, k in pairs]


def rec_gates(upto: int) -> list[Gate]:
    """Record T^upto into W from y_1..y_upto."""
    return [Gate("rec", ("W",), (f"y{k}",)) for k in range(1, upto + 1)]


def recorded(upto: int, body: Sequence[Gate]) -> list[Gate]:
    rec = rec_gates(upto)
    return rec + list(body) + invert(rec)


def pi_dag_gates(n: int, d: int, encoding: str) -> list[Gate]:
    """pi^dagger = sigma_{n-1} ... sigma_1 (sigma_1 applied first)."""
    if encoding == STANDARD:
        return [g for i in range(1, n) for g in sigma_gates(i, d, STANDARD)]
    out = list(sigma_gates(1, d, YAMANOUCHI))
    for i in range(2, n):
        out.append(Gate("rec", ("W",), (f"y{i - 1}",)))
        out.extend(sigma_gates(i, d, YAMANOUCHI))
    return out + invert(rec_gates(n - 2))


def weights_table(n: int, d: int, mode: str, g: Optional[GDiag] = None) -> dict[Partition, dict[int, Fraction]]:
    """Squared amplitudes of W per lam and row: dilated, normalised, or G-weighted."""
    table = {}
    for leaf in build_diagram(n, d).leaves:
        if leaf.right:
            continue
        lam = leaf.left
        cells = addable_cells(lam, None if mode == "dilated" else d)
        raw = {}
        for a in cells:
            w = branch_ratio(lam, a)
            if mode == "G":
                gv = g.values.get((lam, a), 0)
                w = w * (gv if isinstance(gv, Fraction) else Fraction(gv).limit_denominator(10**12))
            raw[a.row] = w
        total = sum(raw.values())
        if total == 0:
            continue
        table[lam] = {row: w / total for row, w in raw.items() if w}
    return table


def w_gates(n: int, encoding: str, table: dict, variant: str) -> list[Gate]:
    d_rows = max((max(v) for v in table.values()), default=0)
    tgt, prev = (f"T{n}", f"T{n - 1}") if encoding == STANDARD else (f"y{n}", "W")
    return [Gate("R_i", (tgt,), (prev, "L"), params={"row": i, "variant": variant, "weights": table})
            for i in range(1, d_rows + 1)]


def phase_gate(n: int, k: int, encoding: str, conditions=()) -> Gate:
    tgt, prev = (f"T{n}", f"T{n - 1}") if encoding == STANDARD else (f"y{n}", "W")
    return Gate("phase", (tgt,), (prev, "L", "anc"), tuple(conditions), {"k": k})


def u_gates(n: int, encoding: str, g_table: dict) -> list[Gate]:
    if encoding == STANDARD:
        return [Gate("U_la", ("q",), (f"T{n}", "L"), params={"G": g_table})]
    return recorded(n, [Gate("U_la", ("q",), ("W", "L"), params={"G": g_table})])


def _w_block(n: int, encoding: str, body: list[Gate]) -> list[Gate]:
    return body if encoding == STANDARD else recorded(n - 1, body)


def _conditioned(gates: Sequence[Gate], reg: str, values: Sequence[int]) -> list[Gate]:
    return [g.with_conditions([(reg, tuple(values))]) for g in gates]


# public fragments

def synth_transposition_std(i: int, n: int, d: int) -> Circuit:
    if not 1 <= i <= n - 1:
        raise ValueError(f"transposition index {i} outside 1..{n - 1}")
    circ = new_circuit(n, d, STANDARD)
    circ.extend(sigma_gates(i, d, STANDARD))
    return circ


def synth_cyclic_std(n: int, d: int) -> Circuit:
    circ = new_circuit(n, d, STANDARD)
    circ.extend(pi_dag_gates(n, d, STANDARD))
    return circ


def synth_yamanouchi_transposition(i: int, n: int, d: int) -> Circuit:
    """sigma_i on (y_i, y_{i+1}) with T^{i-1} recorded into W and uncomputed."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"transposition index {i} outside 1..{n - 1}")
    circ = new_circuit(n, d, YAMANOUCHI)
    circ.extend(recorded(i - 1, sigma_gates(i, d, YAMANOUCHI)))
    return circ


def synth_cyclic_yamanouchi(n: int, d: int) -> Circuit:
    circ = new_circuit(n, d, YAMANOUCHI)
    circ.extend(pi_dag_gates(n, d, YAMANOUCHI))
    return circ


def synth_W(n: int, d: int, dilated: bool = True, encoding: str = STANDARD) -> Circuit:
    """lam-controlled preparation of w~_lam (dilated) or the normalised w_lam from bot."""
    circ = new_circuit(n, d, encoding)
    mode = "dilated" if dilated else "normalised"
    circ.extend(_w_block(n, encoding, w_gates(n, encoding, weights_table(n, d, mode), mode)))
    return circ


def g_table(g: GDiag) -> dict[Partition, dict[int, Fraction | float]]:
    if any(float(v) for v in g.box.values()):
        raise ValueError("the measurement circuit needs G = 0 on (mu, box) irreps")
    out: dict = {}
    for (lam, a), v in g.values.items():
        out.setdefault(lam, {})[a.row] = v
    return out


def synth_measurement(n: int, d: int, encoding: str = STANDARD, g: Optional[GDiag] = None,
                      with_corr: bool = False) -> Circuit:
    """Phase-estimation circuit measuring the dilated PVM, deformed by G if given.

    Outcome k is read from ``anc`` at the ``measure`` marker. With ``with_corr``
    the post-measurement state is mapped back to the computational register.
    """
    circ = new_circuit(n, d, encoding)
    circ.add(Register("anc", n + 1, tuple(range(n + 1)), "ancilla"))
    circ.meta.update({"G": g is not None, "with_corr": with_corr})
    cond = ()
    if g is not None:
        circ.add(Register("q", 2, (0, 1), "qubit"))
        table_g = g_table(g)
        cond = (("q", (0,)),)
    circ.append(Gate("schur", ("X",)))
    if g is not None:
        circ.extend(invert(u_gates(n, encoding, table_g)))
    wt = w_gates(n, encoding, weights_table(n, d, "dilated"), "dilated")
    pi_dag = pi_dag_gates(n, d, encoding)
    circ.append(Gate("qft", ("anc",)))
    for k in range(1, n + 1):
        circ.extend(pi_dag)
        circ.extend(_w_block(n, encoding, invert(wt) + [phase_gate(n, k, encoding, cond)] + wt))
    circ.append(Gate("qft", ("anc",), params={"dagger": True}))
    circ.append(Gate("measure", ("anc",)))
    if with_corr:
        ports = range(1, n + 1)
        for j in range(1, n):
            circ.extend(_conditioned(pi_dag, "anc", range(j, n)))
        mode = "G" if g is not None else "normalised"
        corr = w_gates(n, encoding, weights_table(n, d, mode, g), mode)
        circ.extend(_conditioned(_w_block(n, encoding, invert(wt) + corr), "anc", ports))
        for j in range(1, n):
            circ.extend(_conditioned(invert(pi_dag), "anc", range(j, n)))
        if g is not None:
            circ.extend(_conditioned(u_gates(n, encoding, table_g), "anc", (0,)))
        circ.append(Gate("schur_dag", ("X",)))
    return circ


def synth_resource_prep(n: int, d: int, f: dict[Partition, float]) -> Circuit:
    """F_i gates climbing T^2..T^n, then Copy gates mirroring T^k into the descending half."""
    from ..protocols import path_weights

    _check(n, d)
    weights = path_weights(f, n, d)
    diagram = build_diagram(n, d)
    circ = Circuit(meta={"n": n, "d": d, "encoding": "resource"})
    for k in range(1, n + 1):
        labels = diagram.levels[k] + ((BOT,) if k >= 2 else ())
        circ.add(Register(f"T{k}", len(labels), labels, "path", init=len(labels) - 1 if k >= 2 else 0))
    for k in range(2, n):
        labels = diagram.levels[k] + (BOT,)
        circ.add(Register(f"T{2 * n - k}", len(labels), labels, "path", init=len(labels) - 1))
    for k in range(2, n + 1):
        table = {}
        for nu in diagram.levels[k - 1]:
            if weights[nu] <= 0:
                continue
            amps = {a.row: weights[_add(nu, a)] / weights[nu] for a in addable_cells(nu, d)}
            table[nu] = {row: v for row, v in amps.items() if v > 0}
        circ.append(Gate("F", (f"T{k}",), (f"T{k - 1}",), params={"amplitudes": table}))
    for k in range(n - 1, 1, -1):
        circ.append(Gate("copy", (f"T{2 * n - k}",), (f"T{k}",)))
    return circ


def _add(nu, a):
    from ..partitions import add_cell

    return add_cell(nu, a)


def prep_path_amplitudes(circuit: Circuit, state, names: Sequence[str]) -> dict[tuple, complex]:
    """Nonzero amplitudes of a simulated resource-prep state keyed by T^1..T^{2n-2} labels."""
    import numpy as np

    n = circuit.meta["n"]
    order = [f"T{k}" for k in range(1, 2 * n - 1)]
    arr = np.transpose(state, [list(names).index(r) for r in order])
    regs = [circuit.registers[r] for r in order]
    out = {}
    for idx in zip(*np.nonzero(np.abs(arr) > 1e-14)):
        out[tuple(reg.labels[i] for reg, i in zip(regs, idx))] = complex(arr[idx])
    return out
