"""Young diagram primitives: cells, contents, dimensions and branching."""

from __future__ import annotations

from fractions import Fraction
from functools import cache
from math import factorial
from typing import NamedTuple, Optional

Partition = tuple[int, ...]


class Cell(NamedTuple):
    row: int
    col: int


class IrrepLabel(NamedTuple):
    """Irrep of the one-wall algebra: ``(lam, ())`` or ``(mu, (1,))``."""

    left: Partition
    right: Partition


EMPTY: Partition = ()
BOX: Partition = (1,)


def is_partition(lam: tuple[int, ...]) -> bool:
    return all(x > 0 for x in lam) and all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))


def content(cell: Cell | tuple[int, int]) -> int:
    return cell[1] - cell[0]


def add_to_row(lam: Partition, row: int) -> Optional[Partition]:
    """lam with one more cell in ``row``, or None if that is not a partition."""
    if row < 1:
        return None
    rows = list(lam) + [0] * max(0, row - len(lam))
    rows[row - 1] += 1
    if row > 1 and rows[row - 2] < rows[row - 1]:
        return None
    return tuple(x for x in rows if x)


def add_cell(lam: Partition, cell: Cell | tuple[int, int]) -> Partition:
    out = add_to_row(lam, cell[0])
    if out is None:
        raise ValueError(f"cannot add a cell in row {cell[0]} of {lam}")
    return out


def remove_cell(lam: Partition, cell: Cell | tuple[int, int]) -> Partition:
    rows = list(lam)
    rows[cell[0] - 1] -= 1
    return tuple(x for x in rows if x)


def addable_cells(lam: Partition, d: Optional[int] = None) -> list[Cell]:
    """Addable cells in row order; ``d`` caps the number of rows of the result."""
    cells = []
    for i in range(len(lam) + 1):
        row = i + 1
        cur = lam[i] if i < len(lam) else 0
        if i == 0 or lam[i - 1] > cur:
            if d is None or row <= d:
                cells.append(Cell(row, cur + 1))
    return cells


def removable_cells(lam: Partition) -> list[Cell]:
    cells = []
    for i, x in enumerate(lam):
        nxt = lam[i + 1] if i + 1 < len(lam) else 0
        if x > nxt:
            cells.append(Cell(i + 1, x))
    return cells


def cell_between(small: Partition, big: Partition) -> Cell:
    """The unique cell of ``big`` not in ``small``."""
    for i in range(len(big)):
        cur = small[i] if i < len(small) else 0
        if big[i] != cur:
            if big[i] != cur + 1 or sum(big) != sum(small) + 1:
                break
            return Cell(i + 1, big[i])
    raise ValueError(f"{big} does not cover {small}")


def hook_lengths(lam: Partition) -> list[int]:
    conj = conjugate(lam)
    return [lam[i] - j - 1 + conj[j] - i for i in range(len(lam)) for j in range(lam[i])]


def conjugate(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > j) for j in range(lam[0]))


@cache
def sym_dim(lam: Partition) -> int:
    """Dimension of the symmetric group irrep, by the hook length formula."""
    prod = 1
    for h in hook_lengths(lam):
        prod *= h
    return factorial(sum(lam)) // prod


def staircase(label: IrrepLabel | Partition, d: int) -> Optional[tuple[int, ...]]:
    """Highest weight of length ``d``; None if the label needs more rows."""
    if isinstance(label, IrrepLabel):
        left, right = label
    else:
        left, right = label, ()
    if len(left) + len(right) > d:
        return None
    return tuple(left) + (0,) * (d - len(left) - len(right)) + tuple(-x for x in reversed(right))


@cache
def _weyl(weight: tuple[int, ...]) -> Fraction:
    d = len(weight)
    val = Fraction(1)
    for i in range(d):
        for j in range(i + 1, d):
            val *= Fraction(weight[i] - weight[j] + j - i, j - i)
    return val


def weyl_dim(label: IrrepLabel | Partition, d: int) -> int:
    """Dimension of the unitary group irrep; 0 when the label has too many rows."""
    w = staircase(label, d)
    if w is None:
        return 0
    val = _weyl(w)
    assert val.denominator == 1
    return int(val)


def hook_content_dim(lam: Partition, d: int) -> int:
    """Same as ``weyl_dim`` for a partition, via the hook-content product."""
    num, den = 1, 1
    hooks = hook_lengths(lam)
    k = 0
    for i in range(len(lam)):
        for j in range(lam[i]):
            num *= d + j - i
            den *= hooks[k]
            k += 1
    return num // den if num > 0 else 0


def branch_ratio(lam: Partition, a: Cell | tuple[int, int]) -> Fraction:
    """d_{lam+a} / (n d_lam), computed from contents of corner cells."""
    a = Cell(*a)
    if a not in addable_cells(lam):
        raise ValueError(f"{tuple(a)} is not addable to {lam}")
    ca = content(a)
    val = Fraction(1)
    for c in removable_cells(lam):
        val *= ca - content(c)
    for c in addable_cells(lam):
        if c != a:
            val /= ca - content(c)
    return val


@cache
def _partitions(n: int, maxpart: int, rows: int) -> tuple[Partition, ...]:
    if n == 0:
        return ((),)
    if rows == 0:
        return ()
    out = []
    for first in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - first, first, rows - 1):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_partitions(n: int, d: Optional[int] = None) -> list[Partition]:
    """Partitions of ``n`` with at most ``d`` rows, lexicographically descending."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return list(_partitions(n, n, n if d is None else d))


def format_partition(lam: Partition) -> str:
    return "(" + ",".join(map(str, lam)) + ")" if lam else "()"


def format_label(label: IrrepLabel) -> str:
    return f"({format_partition(label.left)},{format_partition(label.right)})"
