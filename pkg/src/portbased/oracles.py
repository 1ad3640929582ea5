"""Independent reference computations used to cross-check the main routes.

Each function reaches its answer by a different method than the production
code: counting instead of product formulas, iterative optimisation instead of
an eigenvector.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .partitions import Partition, addable_cells, add_cell, enumerate_partitions, removable_cells, remove_cell


@lru_cache(maxsize=None)
def count_standard_tableaux(lam: Partition) -> int:
    """Number of standard Young tableaux by peeling off removable corners."""
    if not lam:
        return 1
    return sum(count_standard_tableaux(remove_cell(lam, c)) for c in removable_cells(lam))


def count_semistandard_tableaux(lam: Partition, d: int) -> int:
    """Number of semistandard tableaux of shape lam with entries 1..d, by row-by-row enumeration."""
    if len(lam) > d:
        return 0
    if not lam:
        return 1

    def rows(length, lo_bound, above):
        # weakly increasing rows, strictly greater than the row above
        out = []
        for row in product(range(1, d + 1), repeat=length):
            if any(row[i] > row[i + 1] for i in range(length - 1)):
                continue
            if above is not None and any(row[i] <= above[i] for i in range(length)):
                continue
            out.append(row)
        return out

    def fill(i, above):
        if i == len(lam):
            return 1
        return sum(fill(i + 1, r) for r in rows(lam[i], 1, above))

    return fill(0, None)


def simplex_projection(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-and-threshold)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u * k > css - 1)[0][-1]
    tau = (css[rho] - 1) / (rho + 1)
    return np.maximum(v - tau, 0.0)


def _dpbt_terms(n: int, d: int):
    mus = enumerate_partitions(n, d)
    pos = {mu: i for i, mu in enumerate(mus)}
    groups = [[pos[add_cell(lam, a)] for a in addable_cells(lam, d)] for lam in enumerate_partitions(n - 1, d)]
    return mus, groups


def dpbt_objective_vec(f: np.ndarray, groups) -> float:
    r = np.sqrt(np.clip(f, 0.0, None))
    return float(sum(r[g].sum() ** 2 for g in groups))


def projected_gradient_dpbt(n: int, d: int, iters: int = 200000, tol: float = 1e-15) -> tuple[dict[Partition, float], float]:
    """Maximise sum_lam (sum_a sqrt f_{lam+a})^2 over the simplex by projected gradient ascent."""
    mus, groups = _dpbt_terms(n, d)
    f = np.full(len(mus), 1.0 / len(mus))
    val = dpbt_objective_vec(f, groups)
    step = 0.1
    for _ in range(iters):
        r = np.sqrt(np.maximum(f, 1e-16))
        grad = np.zeros_like(f)
        for g in groups:
            grad[g] += r[g].sum() / r[g]
        while step > 1e-18:
            cand = simplex_projection(f + step * grad)
            new = dpbt_objective_vec(cand, groups)
            if new >= val:
                break
            step /= 2
        else:
            break
        gain = new - val
        f, val = cand, new
        step = min(step * 1.5, 10.0)
        if gain < tol:
            break
    return dict(zip(mus, map(float, f))), val


def fidelity_bruteforce(psi_ab: np.ndarray, effects, n: int, d: int) -> tuple[float, float]:
    """Entanglement fidelity and success probability from the full joint state.

    Qudit order is A_1..A_n, C, B_1..B_n, R; the input C is maximally
    entangled with the reference R. Each successful outcome k keeps B_k and R.
    """
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    # psi_ab rows are A, columns B; tensor the input pair and reorder to A C B R
    full = np.kron(psi_ab.reshape(-1), phi).reshape((d,) * n + (d,) * n + (d, d))
    axes = list(range(n)) + [2 * n] + list(range(n, 2 * n)) + [2 * n + 1]
    full = np.transpose(full, axes).reshape(-1)
    rest = d ** (n + 1)
    fid, prob = 0.0, 0.0
    for k, e in enumerate(effects):
        if k == 0:
            continue
        vals, vecs = np.linalg.eigh(e)
        root = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
        out = np.kron(root, np.eye(d ** (n + 1))) @ full
        prob += float(np.vdot(out, out).real)
        t = out.reshape((rest,) + (d,) * n + (d,))
        keep = np.moveaxis(t, [k, n + 1], [-2, -1]).reshape(-1, d * d)
        rho = keep.T @ keep.conj()
        fid += float(np.real(phi.conj() @ rho @ phi))
    return fid, prob


def ppbt_epr_success_exact(n: int, d: int):
    """Success probability of probabilistic PBT with EPR pairs as an exact rational.

    p = d^{-n} sum_{alpha |- n-1} m_alpha^2 min_{mu = alpha + a} d_mu / m_mu.
    """
    from fractions import Fraction

    from .partitions import sym_dim, weyl_dim

    total = Fraction(0)
    for alpha in enumerate_partitions(n - 1, d):
        ratio = min(Fraction(sym_dim(add_cell(alpha, a)), weyl_dim(add_cell(alpha, a), d))
                    for a in addable_cells(alpha, d))
        total += weyl_dim(alpha, d) ** 2 * ratio
    return total / d**n


def dpbt_epr_fidelity(n: int, d: int) -> float:
    """Deterministic PBT fidelity with EPR pairs from the square-root objective."""
    from math import sqrt

    from .partitions import sym_dim, weyl_dim

    total = 0.0
    for lam in enumerate_partitions(n - 1, d):
        s = sum(sqrt(sym_dim(add_cell(lam, a)) * weyl_dim(add_cell(lam, a), d) / d**n) for a in addable_cells(lam, d))
        total += s * s
    return total / d**2
