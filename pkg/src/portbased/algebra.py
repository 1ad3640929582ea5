"""Operators of the one-wall algebra in the computational and GT bases.

Qudits are numbered 1..n+1 with qudit 1 most significant. The
transposition ``sigma_i`` swaps qudits i and i+1 for i < n, and
``sigma_n`` is the unnormalised projector onto ``sum_k |k,k>`` on the last
two qudits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import sqrt
from typing import Callable, Optional, Sequence

import numpy as np

from .bratteli import BratteliDiagram, Path, build_diagram, swap_path, young_paths
from .partitions import IrrepLabel, Partition, cell_between, content, weyl_dim

DIM_GUARD_ENV = "PORTBASED_MAX_DIM"
DEFAULT_DIM_GUARD = 4096


class GuardExceeded(RuntimeError):
    pass


def dim_guard() -> int:
    return int(os.environ.get(DIM_GUARD_ENV, DEFAULT_DIM_GUARD))


def check_guard(dim: int) -> None:
    if dim > dim_guard():
        raise GuardExceeded(f"dense dimension {dim} exceeds guard {dim_guard()} (set {DIM_GUARD_ENV})")


# computational basis

def permutation_operator(perm: Sequence[int], m: int, d: int) -> np.ndarray:
    """Operator sending qudit j to position perm[j] (0-based, m qudits)."""
    idx = np.arange(d**m).reshape((d,) * m)
    inv = np.argsort(perm)
    moved = np.transpose(idx, axes=inv).reshape(-1)
    out = np.zeros((d**m, d**m))
    out[np.arange(d**m), moved] = 1.0
    return out


def swap_operator(i: int, j: int, m: int, d: int) -> np.ndarray:
    perm = list(range(m))
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return permutation_operator(perm, m, d)


def contraction_operator(i: int, j: int, m: int, d: int) -> np.ndarray:
    """Unnormalised projector onto sum_k |k>_i |k>_j, identity elsewhere."""
    shape = (d,) * m
    out = np.zeros((d**m, d**m))
    for x in np.ndindex(*shape):
        if x[i - 1] != x[j - 1]:
            continue
        row = np.ravel_multi_index(x, shape)
        for k in range(d):
            y = list(x)
            y[i - 1] = y[j - 1] = k
            out[np.ravel_multi_index(tuple(y), shape), row] = 1.0
    return out


def sigma_computational(i: int, n: int, d: int) -> np.ndarray:
    check_guard(d ** (n + 1))
    if not 1 <= i <= n:
        raise ValueError(f"generator index {i} outside 1..{n}")
    if i < n:
        return swap_operator(i, i + 1, n + 1, d)
    return contraction_operator(n, n + 1, n + 1, d)


def cyclic_computational(n: int, d: int) -> np.ndarray:
    """pi = sigma_1 sigma_2 ... sigma_{n-1}."""
    out = np.eye(d ** (n + 1))
    for i in range(1, n):
        out = out @ sigma_computational(i, n, d)
    return out


def jucys_murphy(k: int, n: int, d: int) -> np.ndarray:
    """sum_{j<k} (j k) acting on the first n qudits."""
    out = np.zeros((d ** (n + 1),) * 2)
    for j in range(1, k):
        out += swap_operator(j, k, n + 1, d)
    return out


def rho_computational(n: int, d: int) -> np.ndarray:
    out = np.zeros((d ** (n + 1),) * 2)
    for j in range(1, n + 1):
        out += contraction_operator(j, n + 1, n + 1, d)
    return out


# GT basis

def transposition_matrix(paths: Sequence[Path], index: dict, i: int,
                         diagram: Optional[BratteliDiagram] = None) -> np.ndarray:
    """Young orthogonal form of sigma_i on a list of paths."""
    dim = len(paths)
    out = np.zeros((dim, dim))
    for p, path in enumerate(paths):
        c_i = content(cell_between(path[i - 1], path[i]))
        c_next = content(cell_between(path[i], path[i + 1]))
        r = c_next - c_i
        out[p, p] = 1.0 / r
        other = swap_path(path, i, diagram)
        if other is None:
            if abs(r) != 1:
                raise AssertionError(f"missing partner path for axial distance {r}")
            continue
        out[index[other], p] = sqrt(1.0 - 1.0 / r**2)
    return out


def _check_level(diagram: BratteliDiagram, i: int) -> None:
    if not 1 <= i < diagram.n:
        raise ValueError(f"transposition index {i} outside 1..{diagram.n - 1}")


def gt_transposition(diagram: BratteliDiagram, leaf: IrrepLabel, i: int) -> np.ndarray:
    _check_level(diagram, i)
    return transposition_matrix(diagram.paths_to(leaf), diagram.index(leaf), i, diagram)


def gt_contraction(diagram: BratteliDiagram, leaf: IrrepLabel) -> np.ndarray:
    """sigma_n on an undilated block."""
    paths = diagram.paths_to(leaf)
    out = np.zeros((len(paths),) * 2)
    if leaf.right:
        return out
    lam, d, n = leaf.left, diagram.d, diagram.n
    m_lam = weyl_dim(lam, d)
    for p, tp in enumerate(paths):
        if tp[n - 1] != lam:
            continue
        for q, tq in enumerate(paths):
            if tq[n - 1] == lam and tq[: n - 1] == tp[: n - 1]:
                out[q, p] = sqrt(weyl_dim(tp[n], d) * weyl_dim(tq[n], d)) / m_lam
    return out


def rho_block(diagram: BratteliDiagram, leaf: IrrepLabel) -> np.ndarray:
    """Diagonal d + cont(a) on (lam, empty), zero on (mu, box)."""
    paths = diagram.paths_to(leaf)
    if leaf.right:
        return np.zeros((len(paths),) * 2)
    vals = [diagram.d + content(cell_between(leaf.left, p[diagram.n])) for p in paths]
    return np.diag(np.array(vals, dtype=float))


def cyclic_block(diagram: BratteliDiagram, leaf: IrrepLabel, power: int = 1) -> np.ndarray:
    dim = diagram.dim(leaf)
    pi = np.eye(dim)
    for i in range(1, diagram.n):
        pi = pi @ gt_transposition(diagram, leaf, i)
    power %= diagram.n
    return np.linalg.matrix_power(pi, power)


def sym_transposition(mu: Partition, i: int) -> np.ndarray:
    """sigma_i in the symmetric group irrep ``mu``."""
    paths = young_paths(mu)
    return transposition_matrix(paths, {p: k for k, p in enumerate(paths)}, i)


def jm_eigenvalues(path: Path, d: int) -> tuple[float, ...]:
    """Contents at levels 2..n, then the eigenvalue of rho at the last step."""
    n = len(path) - 2
    conts = tuple(float(content(cell_between(path[k - 1], path[k]))) for k in range(2, n + 1))
    leaf = path[-1]
    last = 0.0 if leaf.right else float(d + content(cell_between(leaf.left, path[n])))
    return conts + (last,)


@dataclass
class BlockOperator:
    """Block-diagonal operator, one matrix per irrep in path coordinates."""

    blocks: dict[IrrepLabel, np.ndarray]

    def map(self, fn: Callable[[IrrepLabel, np.ndarray], np.ndarray]) -> "BlockOperator":
        return BlockOperator({k: fn(k, v) for k, v in self.blocks.items()})

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator({k: v + other.blocks[k] for k, v in self.blocks.items()})

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator({k: v - other.blocks[k] for k, v in self.blocks.items()})

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator({k: v @ other.blocks[k] for k, v in self.blocks.items()})

    def scale(self, c: complex) -> "BlockOperator":
        return BlockOperator({k: c * v for k, v in self.blocks.items()})

    def dagger(self) -> "BlockOperator":
        return BlockOperator({k: v.conj().T for k, v in self.blocks.items()})

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(v))) for v in self.blocks.values() if v.size), default=0.0)

    def min_eig(self) -> float:
        return min((float(np.linalg.eigvalsh((v + v.conj().T) / 2).min()) for v in self.blocks.values() if v.size),
                   default=0.0)

    @staticmethod
    def identity(diagram: BratteliDiagram) -> "BlockOperator":
        return BlockOperator({leaf: np.eye(diagram.dim(leaf)) for leaf in diagram.leaves})

    @staticmethod
    def zeros(diagram: BratteliDiagram) -> "BlockOperator":
        return BlockOperator({leaf: np.zeros((diagram.dim(leaf),) * 2) for leaf in diagram.leaves})


def block_generator(diagram: BratteliDiagram, i: int) -> BlockOperator:
    """sigma_i on every block (contraction for i = n, undilated only)."""
    if i == diagram.n:
        return BlockOperator({leaf: gt_contraction(diagram, leaf) for leaf in diagram.leaves})
    return BlockOperator({leaf: gt_transposition(diagram, leaf, i) for leaf in diagram.leaves})


def block_cyclic(diagram: BratteliDiagram, power: int = 1) -> BlockOperator:
    return BlockOperator({leaf: cyclic_block(diagram, leaf, power) for leaf in diagram.leaves})


def block_rho(diagram: BratteliDiagram) -> BlockOperator:
    return BlockOperator({leaf: rho_block(diagram, leaf) for leaf in diagram.leaves})


@dataclass
class Intertwiner:
    """Orthogonal change of basis from computational to GT coordinates.

    Column ``offset[leaf] + p * m + j`` of ``basis`` is the vector for path
    ``p`` of ``leaf`` and multiplicity index ``j``.
    """

    n: int
    d: int
    diagram: BratteliDiagram
    basis: np.ndarray
    offset: dict[IrrepLabel, int] = field(default_factory=dict)

    def embed(self, op: BlockOperator) -> np.ndarray:
        """Block operator, padded with identity on multiplicities, in the GT basis."""
        size = self.basis.shape[0]
        out = np.zeros((size, size), dtype=np.result_type(*[v.dtype for v in op.blocks.values()]))
        for leaf, blk in op.blocks.items():
            m = self.diagram.mult(leaf)
            o = self.offset[leaf]
            k = blk.shape[0] * m
            out[o:o + k, o:o + k] = np.kron(blk, np.eye(m))
        return out

    def to_dense(self, op: BlockOperator) -> np.ndarray:
        return self.basis @ self.embed(op) @ self.basis.T

    def to_gt(self, dense: np.ndarray) -> np.ndarray:
        return self.basis.T @ dense @ self.basis

    def from_dense(self, dense: np.ndarray) -> BlockOperator:
        """Block part of a dense operator, averaged over multiplicity."""
        gt = self.to_gt(dense)
        out = {}
        for leaf in self.diagram.leaves:
            m, dim = self.diagram.mult(leaf), self.diagram.dim(leaf)
            o = self.offset[leaf]
            sub = gt[o:o + dim * m, o:o + dim * m].reshape(dim, m, dim, m)
            out[leaf] = np.einsum("ajbj->ab", sub) / m
        return BlockOperator(out)

    def residual(self, dense: np.ndarray, op: BlockOperator) -> float:
        return float(np.max(np.abs(self.to_gt(dense) - self.embed(op))))


def _orthonormal_span(proj: np.ndarray, rank: int, tol: float = 1e-8) -> np.ndarray:
    """Deterministic orthonormal basis of range(proj) from its columns in order."""
    vecs: list[np.ndarray] = []
    for col in proj.T:
        v = col.copy()
        for u in vecs:
            v -= (u @ v) * u
        norm = np.linalg.norm(v)
        if norm > tol:
            vecs.append(v / norm)
            if len(vecs) == rank:
                break
    if len(vecs) != rank:
        raise AssertionError("eigenspace rank mismatch")
    return np.array(vecs).T


def solve_intertwiner(n: int, d: int, seed: int = 7) -> Intertwiner:
    """Mixed Schur transform by joint diagonalisation of Jucys-Murphy elements and rho.

    A multiplicity basis is fixed at one reference path per irrep and carried
    to the other paths with the GT action of the generators.
    """
    size = d ** (n + 1)
    check_guard(size)
    diagram = build_diagram(n, d)
    generators = [sigma_computational(i, n, d) for i in range(1, n + 1)]
    ops = [jucys_murphy(k, n, d) for k in range(2, n + 1)] + [rho_computational(n, d)]
    all_paths = [(leaf, p) for leaf in diagram.leaves for p in diagram.paths_to(leaf)]
    rng = np.random.default_rng(seed)
    for _ in range(20):
        coef = rng.uniform(1.0, 2.0, size=len(ops))
        values = {key: float(np.dot(coef, jm_eigenvalues(key[1], d))) for key in all_paths}
        distinct = sorted(set(round(v, 9) for v in values.values()))
        if len(distinct) == len(set(tuple(jm_eigenvalues(p, d)) for _, p in all_paths)) and (
            len(distinct) < 2 or min(np.diff(distinct)) > 1e-3
        ):
            break
    else:
        raise AssertionError("could not separate joint spectrum")
    mix = sum(c * op for c, op in zip(coef, ops))
    evals, evecs = np.linalg.eigh(mix)

    def eigenprojector(path: Path) -> np.ndarray:
        cols = evecs[:, np.abs(evals - values[(path[-1], path)]) < 1e-6]
        return cols @ cols.T

    basis = np.zeros((size, size))
    offset: dict[IrrepLabel, int] = {}
    pos = 0
    for leaf in diagram.leaves:
        offset[leaf] = pos
        paths = diagram.paths_to(leaf)
        index = diagram.index(leaf)
        m = diagram.mult(leaf)
        known: dict[Path, np.ndarray] = {}
        if leaf.right:
            ref = paths[0]
            known[ref] = _orthonormal_span(eigenprojector(ref), m)
            seeds = [ref]
        else:
            lam = leaf.left
            ref = next(p for p in paths if p[n - 1] == lam)
            known[ref] = _orthonormal_span(eigenprojector(ref), m)
            m_lam = weyl_dim(lam, d)
            lifted = generators[n - 1] @ known[ref]
            seeds = []
            for other in paths:
                if other[n - 1] == lam and other[: n - 1] == ref[: n - 1]:
                    coef_ = sqrt(weyl_dim(ref[n], d) * weyl_dim(other[n], d)) / m_lam
                    known[other] = eigenprojector(other) @ lifted / coef_
                    seeds.append(other)
        queue = list(seeds)
        while queue:
            cur = queue.pop(0)
            for i in range(1, n):
                nxt = swap_path(cur, i, diagram)
                if nxt is None or nxt in known:
                    continue
                r = content(cell_between(cur[i], cur[i + 1])) - content(cell_between(cur[i - 1], cur[i]))
                known[nxt] = (generators[i - 1] @ known[cur] - known[cur] / r) / sqrt(1.0 - 1.0 / r**2)
                queue.append(nxt)
        if len(known) != len(paths):
            raise AssertionError(f"transport did not reach all paths of {leaf}")
        for path in paths:
            p = index[path]
            basis[:, pos + p * m: pos + (p + 1) * m] = known[path]
        pos += len(paths) * m
    return Intertwiner(n, d, diagram, basis, offset)


def verify_blocks(tw: Intertwiner) -> dict[str, float]:
    """Residuals of the intertwiner against every generator and rho."""
    out = {"orthogonality": float(np.max(np.abs(tw.basis.T @ tw.basis - np.eye(tw.basis.shape[0]))))}
    for i in range(1, tw.n + 1):
        out[f"sigma_{i}"] = tw.residual(sigma_computational(i, tw.n, tw.d), block_generator(tw.diagram, i))
    out["rho"] = tw.residual(rho_computational(tw.n, tw.d), block_rho(tw.diagram))
    return out
