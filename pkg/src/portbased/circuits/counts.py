"""Gate-count reports and scaling fits for the measurement circuits."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import depth, fit_exponent, gate_counts
from .synth import synth_measurement


@dataclass
class CountRow:
    encoding: str
    n: int
    d: int
    total: int
    depth: int
    by_kind: dict[str, int]


@dataclass
class ScalingFit:
    encoding: str
    d: int
    ns: tuple[int, ...]
    total_exponent: float
    depth_exponent: float
    total_residual: float
    depth_residual: float


def count_row(n: int, d: int, encoding: str) -> CountRow:
    circ = synth_measurement(n, d, encoding)
    by_kind = gate_counts(circ)
    return CountRow(encoding, n, d, sum(by_kind.values()), depth(circ), by_kind)


def _residual(ns, values, slope) -> float:
    x, y = np.log(np.asarray(ns, float)), np.log(np.asarray(values, float))
    intercept = float(np.mean(y - slope * x))
    return float(np.sqrt(np.mean((y - slope * x - intercept) ** 2)))


def gate_count_report(ns: Sequence[int], ds: Sequence[int], encoding: str) -> tuple[list[CountRow], list[ScalingFit]]:
    """Counts by kind for every (n, d) and log-log exponent fits over n at each d.

    Both the total gate count and the circuit depth are fitted; depth is the
    parallel time, which is where the two encodings differ.
    """
    rows = [count_row(n, d, encoding) for d in ds for n in ns]
    fits = []
    for d in ds:
        sub = [r for r in rows if r.d == d]
        nn = tuple(r.n for r in sub)
        if len(nn) < 2:
            continue
        tot, dep = [r.total for r in sub], [r.depth for r in sub]
        te, de = fit_exponent(nn, tot), fit_exponent(nn, dep)
        fits.append(ScalingFit(encoding, d, nn, te, de, _residual(nn, tot, te), _residual(nn, dep, de)))
    return rows, fits


def report_csv(rows: Sequence[CountRow]) -> str:
    kinds = sorted({k for r in rows for k in r.by_kind})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["encoding", "n", "d", "total", "depth"] + kinds)
    for r in rows:
        w.writerow([r.encoding, r.n, r.d, r.total, r.depth] + [r.by_kind.get(k, 0) for k in kinds])
    return buf.getvalue()
