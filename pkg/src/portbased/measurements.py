"""Pretty good measurement, its dilated PVM, deformations and two-outcome dilation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Union

import numpy as np

from .algebra import (
    BlockOperator,
    block_cyclic,
    check_guard,
    cyclic_computational,
    sigma_computational,
)
from .bratteli import BratteliDiagram, build_diagram
from .partitions import Cell, IrrepLabel, Partition, addable_cells, branch_ratio, cell_between, content

RANK_TOL = 1e-9

Operator = Union[np.ndarray, BlockOperator]


@dataclass
class Povm:
    """Outcomes ``E_0, ..., E_n``; index 0 is the failure outcome."""

    outcomes: list[Operator]
    diagram: BratteliDiagram | None = None

    @property
    def n(self) -> int:
        return len(self.outcomes) - 1

    def total(self) -> Operator:
        out = self.outcomes[0]
        for e in self.outcomes[1:]:
            out = out + e
        return out

    def completeness_residual(self) -> float:
        tot = self.total()
        if isinstance(tot, BlockOperator):
            return tot.map(lambda _, b: b - np.eye(len(b))).max_abs()
        return float(np.max(np.abs(tot - np.eye(tot.shape[0]))))

    def min_eig(self) -> float:
        vals = []
        for e in self.outcomes:
            if isinstance(e, BlockOperator):
                vals.append(e.min_eig())
            else:
                vals.append(float(np.linalg.eigvalsh((e + e.conj().T) / 2).min()))
        return min(vals)


def _inverse_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    inv = np.array([1.0 / sqrt(v) if v > RANK_TOL else 0.0 for v in vals])
    return (vecs * inv) @ vecs.T


def pgm_bruteforce(n: int, d: int) -> Povm:
    """PGM built directly from the defining operators, in the computational basis."""
    check_guard(d ** (n + 1))
    sig = sigma_computational(n, n, d)
    pi = cyclic_computational(n, d)
    rhos = []
    for k in range(1, n + 1):
        pk = np.linalg.matrix_power(pi, k)
        rhos.append(pk @ sig @ pk.T)
    root = _inverse_sqrt(sum(rhos))
    effects = [root @ r @ root for r in rhos]
    e0 = np.eye(d ** (n + 1)) - sum(effects)
    return Povm([e0] + effects)


def _support_vectors(diagram: BratteliDiagram, leaf: IrrepLabel, normalise: bool) -> np.ndarray:
    """Columns w_S for each prefix S ending at lam; rows are paths."""
    paths = diagram.paths_to(leaf)
    n, lam = diagram.n, leaf.left
    groups: dict[tuple, list[int]] = {}
    for p, path in enumerate(paths):
        if path[n - 1] == lam:
            groups.setdefault(path[: n], []).append(p)
    cols = []
    for prefix in sorted(groups, key=lambda s: groups[s][0]):
        v = np.zeros(len(paths))
        for p in groups[prefix]:
            a = cell_between(lam, paths[p][n])
            v[p] = sqrt(float(branch_ratio(lam, a)))
        if normalise:
            v /= np.linalg.norm(v)
        cols.append(v)
    return np.array(cols).T if cols else np.zeros((len(paths), 0))


def _last_port_block(diagram: BratteliDiagram, leaf: IrrepLabel) -> np.ndarray:
    dim = diagram.dim(leaf)
    if leaf.right:
        return np.zeros((dim, dim))
    w = _support_vectors(diagram, leaf, normalise=False)
    return w @ w.T


def _rotate_ports(diagram: BratteliDiagram, last: BlockOperator, zero_out: BlockOperator) -> list[BlockOperator]:
    out = []
    for k in range(1, diagram.n + 1):
        pk = block_cyclic(diagram, k)
        out.append(pk @ last @ pk.dagger())
    return [zero_out] + out


def pgm_gt(n: int, d: int) -> Povm:
    """PGM as block operators on the undilated diagram."""
    diagram = build_diagram(n, d)
    last = BlockOperator({leaf: _last_port_block(diagram, leaf) for leaf in diagram.leaves})
    effects = _rotate_ports(diagram, last, BlockOperator.zeros(diagram))[1:]
    e0 = BlockOperator.identity(diagram)
    for e in effects:
        e0 = e0 - e
    return Povm([e0] + effects, diagram)


def dilated_pvm(n: int, d: int) -> Povm:
    """Projective measurement on the dilated diagram whose compression is the PGM."""
    diagram = build_diagram(n, d, dilated=True)
    last = BlockOperator({leaf: _last_port_block(diagram, leaf) for leaf in diagram.leaves})
    effects = _rotate_ports(diagram, last, BlockOperator.zeros(diagram))[1:]
    p0 = BlockOperator({
        leaf: (np.eye(diagram.dim(leaf)) if leaf.right else np.zeros((diagram.dim(leaf),) * 2))
        for leaf in diagram.leaves
    })
    return Povm([p0] + effects, diagram)


def compression_indices(dilated: BratteliDiagram, leaf: IrrepLabel) -> list[int]:
    """Positions of undilated paths inside a dilated block."""
    return [i for i, p in enumerate(dilated.paths_to(leaf)) if not any(len(v) > dilated.d for v in p[:-1])]


def compress(op: BlockOperator, dilated: BratteliDiagram) -> BlockOperator:
    out = {}
    for leaf, blk in op.blocks.items():
        idx = compression_indices(dilated, leaf)
        out[leaf] = blk[np.ix_(idx, idx)]
    return BlockOperator(out)


@dataclass
class GDiag:
    """Diagonal deformation commuting with the permutation subalgebra.

    ``values[(lam, a)]`` is the entry on paths ending in (lam, empty) whose
    level-n vertex is lam + a; missing entries are 0. ``box[mu]`` is the
    scalar on (mu, box).
    """

    values: dict[tuple[Partition, Cell], Fraction | float]
    box: dict[Partition, Fraction | float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, v in list(self.values.items()) + list(self.box.items()):
            if not 0 <= v <= 1:
                raise ValueError(f"G entry {v} at {key} outside [0, 1]")

    def entry(self, leaf: IrrepLabel, top: Partition) -> float:
        if leaf.right:
            return float(self.box.get(leaf.left, 0))
        return float(self.values.get((leaf.left, cell_between(leaf.left, top)), 0))

    def block(self, diagram: BratteliDiagram, leaf: IrrepLabel) -> np.ndarray:
        return np.diag([self.entry(leaf, p[diagram.n]) for p in diagram.paths_to(leaf)])

    def blocks(self, diagram: BratteliDiagram) -> BlockOperator:
        return BlockOperator({leaf: self.block(diagram, leaf) for leaf in diagram.leaves})

    def perturbed(self, eps: float) -> "GDiag":
        return GDiag({k: min(1.0, float(v) + eps) for k, v in self.values.items()}, dict(self.box))


def g_epr_ppbt(n: int, d: int) -> GDiag:
    """Deformation (d + cont a)/(d + lam_1) that turns the PGM into the optimal pPBT POVM."""
    diagram = build_diagram(n, d)
    values = {}
    for leaf in diagram.leaves:
        if leaf.right:
            continue
        lam = leaf.left
        top = lam[0] if lam else 0
        for a in addable_cells(lam, d):
            values[(lam, a)] = Fraction(d + content(a), d + top)
    return GDiag(values)


def g_identity(n: int, d: int) -> GDiag:
    diagram = build_diagram(n, d)
    return GDiag({
        (leaf.left, a): Fraction(1)
        for leaf in diagram.leaves if not leaf.right for a in addable_cells(leaf.left, d)
    })


def generic_povm(g: GDiag, n: int, d: int, base: Povm | None = None) -> Povm:
    """sqrt(G) E_k sqrt(G) on (lam, empty); G/n per port on (mu, box); failure I - G."""
    base = base or pgm_gt(n, d)
    diagram = base.diagram
    gb = g.blocks(diagram)
    root = gb.map(lambda _, b: np.sqrt(b))
    effects = []
    for e in base.outcomes[1:]:
        def port(leaf, blk, e=e):
            if leaf.right:
                return gb.blocks[leaf] / n
            r = root.blocks[leaf]
            return r @ e.blocks[leaf] @ r
        effects.append(e.map(port))
    e0 = BlockOperator.identity(diagram) - gb
    return Povm([e0] + effects, diagram)


def _check_projective(pvm: Povm, tol: float = 1e-10) -> None:
    for i, a in enumerate(pvm.outcomes):
        for j, b in enumerate(pvm.outcomes):
            prod = a @ b
            target = a if i == j else BlockOperator.zeros(pvm.diagram)
            if (prod - target).max_abs() > tol:
                raise ValueError(f"outcomes {i} and {j} are not orthogonal projectors")
    if pvm.completeness_residual() > tol:
        raise ValueError("projectors do not sum to the identity")


def naimark_two_outcome(g: GDiag, pvm: Povm) -> Povm:
    """Projective measurement on a qubit times the PVM space realising sqrt(G) Pi sqrt(G).

    Outcome i >= 1 is U (Pi_i + 0) U^T and outcome 0 is U (Pi_0 + I) U^T with
    U = [[sqrt G, -sqrt(1-G)], [sqrt(1-G), sqrt G]]; the qubit is the slow index.
    """
    _check_projective(pvm)
    diagram = pvm.diagram
    gb = g.blocks(diagram)
    rot = {}
    for leaf, blk in gb.blocks.items():
        s, c = np.sqrt(blk), np.sqrt(np.eye(len(blk)) - blk)
        rot[leaf] = np.block([[s, -c], [c, s]])
    out = []
    for k, p in enumerate(pvm.outcomes):
        def lift(leaf, blk, k=k):
            dim = blk.shape[0]
            low = np.eye(dim) if k == 0 else np.zeros((dim, dim))
            u = rot[leaf]
            return u @ np.block([[blk, np.zeros((dim, dim))], [np.zeros((dim, dim)), low]]) @ u.T
        out.append(p.map(lift))
    return Povm(out, diagram)


def naimark_compression(dilation: Povm) -> list[BlockOperator]:
    """Top-left (qubit in |0>) corner of each outcome."""
    return [e.map(lambda _, b: b[: b.shape[0] // 2, : b.shape[0] // 2]) for e in dilation.outcomes]
