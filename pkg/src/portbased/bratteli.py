"""Bratteli diagrams of the one-wall algebra and their dilated extension.

A path is a tuple ``(T^0, ..., T^n, leaf)`` of partitions followed by an
``IrrepLabel``. Paths into a leaf are ordered lexicographically by their
Yamanouchi word (row of each added cell).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cache, cached_property
from typing import NamedTuple, Optional

from .partitions import (
    BOX,
    EMPTY,
    Cell,
    IrrepLabel,
    Partition,
    add_cell,
    add_to_row,
    addable_cells,
    cell_between,
    content,
    enumerate_partitions,
    format_label,
    remove_cell,
    removable_cells,
    weyl_dim,
)

Path = tuple


class YamanouchiWord(NamedTuple):
    """Rows ``y_2..y_n`` of added cells, and the removed row at the last step.

    ``terminal`` is None when the path ends in a ``(mu, box)`` leaf.
    """

    rows: tuple[int, ...]
    terminal: Optional[int]


def _vertex_ok(lam: Partition, d: int, dilated: bool) -> bool:
    if len(lam) <= d:
        return True
    return dilated and len(lam) == d + 1 and lam[d] == 1


@dataclass(frozen=True)
class BratteliDiagram:
    n: int
    d: int
    dilated: bool = False
    levels: tuple[tuple[Partition, ...], ...] = field(init=False, repr=False)
    leaves: tuple[IrrepLabel, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.d < 2:
            raise ValueError("d must be at least 2")
        rows = self.d + 1 if self.dilated else self.d
        levels = tuple(
            tuple(p for p in enumerate_partitions(k, rows) if _vertex_ok(p, self.d, self.dilated))
            for k in range(self.n + 1)
        )
        leaves = [IrrepLabel(mu, BOX) for mu in enumerate_partitions(self.n, self.d - 1)]
        leaves += [IrrepLabel(lam, EMPTY) for lam in enumerate_partitions(self.n - 1, self.d)]
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "leaves", tuple(leaves))

    def children(self, lam: Partition) -> list[Partition]:
        k = sum(lam)
        if k >= self.n:
            return []
        nxt = set(self.levels[k + 1])
        return [add_cell(lam, c) for c in addable_cells(lam) if add_cell(lam, c) in nxt]

    def parents(self, lam: Partition) -> list[Partition]:
        prev = set(self.levels[sum(lam) - 1]) if sum(lam) else set()
        return [remove_cell(lam, c) for c in removable_cells(lam) if remove_cell(lam, c) in prev]

    def leaf_parents(self, leaf: IrrepLabel) -> list[Partition]:
        """Level-n vertices joined to ``leaf``."""
        if leaf.right:
            return [leaf.left]
        top = set(self.levels[self.n])
        cells = addable_cells(leaf.left, None if self.dilated else self.d)
        return [add_cell(leaf.left, a) for a in cells if add_cell(leaf.left, a) in top]

    def leaf_children(self, nu: Partition) -> list[IrrepLabel]:
        return [leaf for leaf in self.leaves if nu in self.leaf_parents(leaf)]

    def paths_to(self, target: IrrepLabel | Partition) -> list[Path]:
        return list(_paths(self, target))

    def dim(self, leaf: IrrepLabel) -> int:
        return len(_paths(self, leaf))

    def mult(self, leaf: IrrepLabel) -> int:
        return weyl_dim(leaf, self.d)

    def index(self, leaf: IrrepLabel) -> dict[Path, int]:
        return _index(self, leaf)

    @cached_property
    def vertex_count(self) -> int:
        return sum(len(level) for level in self.levels) + len(self.leaves)

    def edges(self) -> list[tuple[int, object, object]]:
        """Edges as ``(level of source, source, target)``."""
        out = []
        for k in range(self.n):
            for lam in self.levels[k]:
                out.extend((k, lam, nu) for nu in self.children(lam))
        for leaf in self.leaves:
            out.extend((self.n, nu, leaf) for nu in self.leaf_parents(leaf))
        return out

    def is_dilated_vertex(self, lam: Partition) -> bool:
        return len(lam) > self.d


@cache
def _paths(diagram: BratteliDiagram, target) -> tuple[Path, ...]:
    if isinstance(target, IrrepLabel):
        tails = [p + (target,) for nu in diagram.leaf_parents(target) for p in _paths(diagram, nu)]
    else:
        if target == ():
            return (((),),)
        tails = [p + (target,) for mu in diagram.parents(target) for p in _paths(diagram, mu)]
    return tuple(sorted(tails, key=lambda p: yamanouchi_rows(p)))


@cache
def _index(diagram: BratteliDiagram, leaf: IrrepLabel) -> dict:
    return {p: i for i, p in enumerate(_paths(diagram, leaf))}


def build_diagram(n: int, d: int, dilated: bool = False) -> BratteliDiagram:
    return _build(n, d, dilated)


@cache
def _build(n: int, d: int, dilated: bool) -> BratteliDiagram:
    return BratteliDiagram(n, d, dilated)


def yamanouchi_rows(path: Path) -> tuple[int, ...]:
    """Rows ``y_1..y_k`` of the cells added along the partition part of a path."""
    parts = [v for v in path if not isinstance(v, IrrepLabel)]
    return tuple(cell_between(parts[i], parts[i + 1]).row for i in range(len(parts) - 1))


def to_yamanouchi(path: Path) -> YamanouchiWord:
    leaf = path[-1]
    if not isinstance(leaf, IrrepLabel):
        raise ValueError("path does not end in a leaf")
    rows = yamanouchi_rows(path)
    terminal = None if leaf.right else cell_between(leaf.left, path[-2]).row
    return YamanouchiWord(rows[1:], terminal)


def from_yamanouchi(word: YamanouchiWord, diagram: BratteliDiagram) -> Path:
    rows = (1,) + tuple(word.rows)
    if len(rows) != diagram.n:
        raise ValueError(f"word has {len(rows)} rows, expected {diagram.n}")
    verts: list = [()]
    for i, r in enumerate(rows, start=1):
        nxt = add_to_row(verts[-1], r)
        if nxt is None or nxt not in diagram.children(verts[-1]):
            raise ValueError(f"no edge at level {i} for row {r}")
        verts.append(nxt)
    top = verts[-1]
    if word.terminal is None:
        leaf = IrrepLabel(top, BOX)
    else:
        cells = [c for c in removable_cells(top) if c.row == word.terminal]
        if not cells:
            raise ValueError(f"no edge at level {diagram.n + 1} for removed row {word.terminal}")
        leaf = IrrepLabel(remove_cell(top, cells[0]), EMPTY)
    if leaf not in diagram.leaves or top not in diagram.leaf_parents(leaf):
        raise ValueError(f"no edge at level {diagram.n + 1} into {format_label(leaf)}")
    return tuple(verts) + (leaf,)


def dilation_level(path: Path, d: int) -> Optional[int]:
    """Level at which the dilated row ``d+1`` is entered, or None."""
    for i, r in enumerate(yamanouchi_rows(path), start=1):
        if r == d + 1:
            return i
    return None


def contents_and_axial(path: Path, i: int) -> tuple[int, Optional[int]]:
    """Content of the i-th added cell and the axial distance ``r_i`` (None at i = n)."""
    parts = [v for v in path if not isinstance(v, IrrepLabel)]
    n = len(parts) - 1
    if not 1 <= i <= n:
        raise ValueError(f"level {i} outside 1..{n}")
    ci = content(cell_between(parts[i - 1], parts[i]))
    if i == n:
        return ci, None
    return ci, content(cell_between(parts[i], parts[i + 1])) - ci


def swap_path(path: Path, i: int, diagram: Optional[BratteliDiagram] = None) -> Optional[Path]:
    """Path with steps i and i+1 exchanged, or None if that is not a valid path."""
    lo, old, hi = path[i - 1], path[i], path[i + 1]
    c_new = cell_between(old, hi)
    mid = add_to_row(lo, c_new.row)
    if mid is None or mid == old or cell_between(lo, mid) != c_new:
        return None
    if diagram is not None and mid not in diagram.levels[i]:
        return None
    return path[:i] + (mid,) + path[i + 1:]


def young_paths(mu: Partition) -> list[Path]:
    """Standard tableaux of shape ``mu`` as vertex sequences, by Yamanouchi word."""
    return list(_young(mu))


@cache
def _young(mu: Partition) -> tuple[Path, ...]:
    if mu == ():
        return ((),),
    out = [p + (mu,) for c in removable_cells(mu) for p in _young(remove_cell(mu, c))]
    return tuple(sorted(out, key=yamanouchi_rows))


def empty_irrep_paths(n: int, d: int) -> list[tuple[Path, Partition, Path]]:
    """Paths into the trivial-looking (empty, empty) irrep of the n-wall algebra.

    Each path climbs to some ``mu`` at level n and descends again; it is
    returned as (ascending path, mu, ascending path of the descent).
    """
    out = []
    for mu in enumerate_partitions(n, d):
        ps = young_paths(mu)
        out.extend((s, mu, t) for s in ps for t in ps)
    return out


def _vname(level: int, v) -> str:
    if isinstance(v, IrrepLabel):
        left = ".".join(map(str, v.left)) or "e"
        return f"L{level}_{left}_{'box' if v.right else 'e'}"
    return f"L{level}_{'.'.join(map(str, v)) or 'e'}"


def export_dot(diagram: BratteliDiagram) -> str:
    lines = ["digraph bratteli {", "  rankdir=TB;"]
    for k, level in enumerate(diagram.levels):
        for v in level:
            style = ' style=dashed color=red' if diagram.is_dilated_vertex(v) else ""
            lines.append(f'  {_vname(k, v)} [label="{list(v)}"{style}];')
    for leaf in diagram.leaves:
        lines.append(f'  {_vname(diagram.n + 1, leaf)} [label="{format_label(leaf)}" shape=box];')
    for k, src, dst in diagram.edges():
        dashed = diagram.is_dilated_vertex(src) or (
            not isinstance(dst, IrrepLabel) and diagram.is_dilated_vertex(dst)
        )
        style = " [style=dashed color=red]" if dashed else ""
        lines.append(f"  {_vname(k, src)} -> {_vname(k + 1, dst)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(diagram: BratteliDiagram) -> str:
    data = {
        "n": diagram.n,
        "d": diagram.d,
        "dilated": diagram.dilated,
        "levels": [[list(v) for v in level] for level in diagram.levels],
        "leaves": [
            {"label": format_label(leaf), "left": list(leaf.left), "box": bool(leaf.right),
             "paths": diagram.dim(leaf), "multiplicity": diagram.mult(leaf)}
            for leaf in diagram.leaves
        ],
        "edges": [[k, _vname(k, s), _vname(k + 1, t)] for k, s, t in diagram.edges()],
    }
    return json.dumps(data, indent=1, sort_keys=True)
