"""The port-based teleportation channel, its figures of merit and resource states.

A resource state is stored as its amplitude matrix ``psi[a, b]`` with the
A-half as row index, so the state vector is ``psi.reshape(-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from itertools import permutations
from math import factorial, sqrt
from typing import Optional

import numpy as np

from .algebra import check_guard, solve_intertwiner, sym_transposition
from .measurements import Povm, g_epr_ppbt, generic_povm, pgm_bruteforce, pgm_gt
from .partitions import (
    Cell,
    Partition,
    add_cell,
    addable_cells,
    content,
    enumerate_partitions,
    sym_dim,
    weyl_dim,
)

FDistribution = dict[Partition, float]


@dataclass
class ResourceState:
    n: int
    d: int
    psi: np.ndarray
    tag: str = "custom-f"

    @property
    def vector(self) -> np.ndarray:
        return self.psi.reshape(-1)

    def reduced_a(self) -> np.ndarray:
        return self.psi @ self.psi.conj().T


@dataclass
class ChannelResult:
    outputs: list[Optional[np.ndarray]]
    probabilities: list[float]


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def _effects(povm: Povm) -> list[np.ndarray]:
    if any(not isinstance(e, np.ndarray) for e in povm.outcomes):
        raise TypeError("channel evaluation needs dense POVM outcomes")
    return povm.outcomes


def _branch(resource: ResourceState, root: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """sqrt(E) applied to psi_{AB} phi_{C R}, as a tensor (A C, B_1..B_n, R)."""
    n, d = resource.n, resource.d
    joint = np.einsum("ab,xr->axbr", resource.psi, phi).reshape(d ** (n + 1), -1)
    out = root @ joint
    return out.reshape((d ** (n + 1),) + (d,) * n + (phi.shape[1],))


def channel_apply(resource: ResourceState, povm: Povm, rho_in: np.ndarray) -> ChannelResult:
    """Unnormalised output on port B_k for each outcome k >= 1, and outcome probabilities."""
    n, d = resource.n, resource.d
    check_guard(d ** (n + 1))
    vals, vecs = np.linalg.eigh((rho_in + rho_in.conj().T) / 2)
    if vals.min() < -1e-10:
        raise ValueError("input state is not positive semidefinite")
    phi = vecs * np.sqrt(np.clip(vals, 0.0, None))
    effects = _effects(povm)
    outputs: list[Optional[np.ndarray]] = [None]
    probs = []
    for k, e in enumerate(effects):
        t = _branch(resource, _psd_sqrt(e), phi)
        probs.append(float(np.vdot(t, t).real))
        if k == 0:
            continue
        t = np.moveaxis(t, k, 1).reshape(t.shape[0], d, -1)
        outputs.append(np.einsum("aic,ajc->ij", t, t.conj()))
    return ChannelResult(outputs, probs)


def entanglement_fidelity(resource: ResourceState, povm: Povm) -> float:
    """Tr[Phi+ (N x id)(Phi+)] summed over successful outcomes."""
    n, d = resource.n, resource.d
    check_guard(d ** (n + 1))
    phi = np.eye(d) / sqrt(d)
    total = 0.0
    for k, e in enumerate(_effects(povm)):
        if k == 0:
            continue
        t = _branch(resource, _psd_sqrt(e), phi)
        t = np.moveaxis(t, k, -2)
        amp = np.einsum("...jj->...", t) / sqrt(d)
        total += float(np.vdot(amp, amp).real)
    return total


def success_probability(resource: ResourceState, povm: Povm) -> float:
    d = resource.d
    state = np.kron(resource.reduced_a(), np.eye(d) / d)
    return float(sum(np.trace(e @ state).real for e in _effects(povm)[1:]))


def redistribute_failure(povm: Povm) -> Povm:
    """Deterministic variant: E_0 spread evenly over the n ports."""
    e0 = povm.outcomes[0]
    n = povm.n
    return Povm([0 * e0] + [e + e0 / n for e in povm.outcomes[1:]], povm.diagram)


# isotypic projectors

def _cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen, lengths = set(), []
    for s in range(len(perm)):
        if s in seen:
            continue
        length, j = 0, s
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


@cache
def character(mu: Partition, cycle_type: tuple[int, ...]) -> int:
    """Irreducible character as the trace of a product of GT transposition matrices."""
    mat = np.eye(sym_dim(mu))
    start = 1
    for length in cycle_type:
        for i in range(start, start + length - 1):
            mat = mat @ sym_transposition(mu, i)
        start += length
    return int(round(np.trace(mat)))


@cache
def _isotypic(mu: Partition, n: int, d: int) -> np.ndarray:
    size = d**n
    idx = np.arange(size).reshape((d,) * n)
    cols = np.arange(size)
    out = np.zeros((size, size))
    for perm in permutations(range(n)):
        chi = character(mu, _cycle_type(perm))
        if chi:
            out[np.transpose(idx, perm).reshape(-1), cols] += chi
    out *= sym_dim(mu) / factorial(n)
    out.setflags(write=False)
    return out


def isotypic_projector(mu: Partition, d: int) -> np.ndarray:
    n = sum(mu)
    check_guard(d**n)
    return _isotypic(mu, n, d)


def isotypic_weights(resource: ResourceState) -> dict[Partition, float]:
    """Squared norm of (P_mu x I)|psi> for each mu with at most d rows."""
    return {
        mu: float(np.linalg.norm(isotypic_projector(mu, resource.d) @ resource.psi) ** 2)
        for mu in enumerate_partitions(resource.n, resource.d)
    }


# resource states

def epr_f(n: int, d: int) -> dict[Partition, Fraction]:
    return {mu: Fraction(sym_dim(mu) * weyl_dim(mu, d), d**n) for mu in enumerate_partitions(n, d)}


def epr_resource(n: int, d: int) -> ResourceState:
    check_guard(d**n)
    return ResourceState(n, d, np.eye(d**n) / sqrt(d**n), "EPR")


def optimized_resource(n: int, d: int, f: dict[Partition, float], tag: str = "custom-f") -> ResourceState:
    """(X_A x I)|Phi+>^n with X = sum_mu sqrt(f_mu d^n / (d_mu m_mu)) P_mu."""
    if abs(sum(float(v) for v in f.values()) - 1.0) > 1e-12:
        raise ValueError("f does not sum to 1")
    x = np.zeros((d**n, d**n))
    for mu, val in f.items():
        if val < 0:
            raise ValueError(f"negative weight on {mu}")
        if val == 0:
            continue
        m = weyl_dim(mu, d)
        if m == 0 or sum(mu) != n:
            raise ValueError(f"weight on {mu}, which has no irrep for d={d}")
        x += sqrt(float(val) * d**n / (sym_dim(mu) * m)) * isotypic_projector(mu, d)
    return ResourceState(n, d, x / sqrt(d**n), tag)


def ppbt_f_exact(n: int, d: int) -> dict[Partition, Fraction]:
    mus = enumerate_partitions(n, d)
    total = sum(weyl_dim(mu, d) ** 2 for mu in mus)
    return {mu: Fraction(weyl_dim(mu, d) ** 2, total) for mu in mus}


def ppbt_f(n: int, d: int) -> FDistribution:
    return {mu: float(v) for mu, v in ppbt_f_exact(n, d).items()}


def prep_amplitude_sq(nu: Partition, a: Cell | tuple[int, int], d: int) -> Fraction:
    """Squared amplitude of nu -> nu + a in the pPBT resource preparation."""
    a = Cell(*a)
    if a not in addable_cells(nu, d):
        raise ValueError(f"{tuple(a)} is not addable to {nu} within {d} rows")
    k = sum(nu)
    rows = list(nu) + [0] * (d - len(nu))
    r = a.row
    val = Fraction(d + content(a), d * d + k)
    for i in range(1, d + 1):
        if i != r:
            diff = rows[r - 1] - rows[i - 1] + i - r
            val *= Fraction(diff + 1, diff)
    return val


def prep_amplitude(nu: Partition, a: Cell | tuple[int, int], d: int) -> float:
    return sqrt(prep_amplitude_sq(nu, a, d))


def path_weights(f: dict[Partition, float], n: int, d: int) -> dict[Partition, float]:
    """g_nu = f_nu / d_nu at level n, summed over children below; g_empty = 1."""
    g: dict[Partition, float] = {mu: float(f.get(mu, 0.0)) / sym_dim(mu) for mu in enumerate_partitions(n, d)}
    for k in range(n - 1, -1, -1):
        for nu in enumerate_partitions(k, d):
            g[nu] = sum(g[add_cell(nu, a)] for a in addable_cells(nu, d))
    return g


def dpbt_objective(f: dict[Partition, float], n: int, d: int) -> float:
    total = 0.0
    for lam in enumerate_partitions(n - 1, d):
        s = sum(sqrt(float(f.get(add_cell(lam, a), 0.0))) for a in addable_cells(lam, d))
        total += s * s
    return total


def dpbt_matrix(n: int, d: int) -> tuple[list[Partition], np.ndarray]:
    mus = enumerate_partitions(n, d)
    pos = {mu: i for i, mu in enumerate(mus)}
    mat = np.zeros((len(mus), len(mus)))
    for lam in enumerate_partitions(n - 1, d):
        v = np.zeros(len(mus))
        for a in addable_cells(lam, d):
            v[pos[add_cell(lam, a)]] = 1.0
        mat += np.outer(v, v)
    return mus, mat


def dpbt_f(n: int, d: int) -> tuple[FDistribution, float]:
    """Optimal dPBT weights as the squared principal eigenvector, with the objective."""
    mus, mat = dpbt_matrix(n, d)
    vals, vecs = np.linalg.eigh(mat)
    x = vecs[:, -1]
    x = x * np.sign(x.sum())
    if x.min() < -1e-12:
        raise RuntimeError("principal eigenvector is not nonnegative")
    x = np.clip(x, 0.0, None)
    x /= np.linalg.norm(x)
    return {mu: float(v * v) for mu, v in zip(mus, x)}, float(vals[-1])


# protocol tables

PROTOCOLS = ("dpbt", "ppbt")
RESOURCES = ("epr", "optimized")


def protocol_setup(protocol: str, resource: str, n: int, d: int) -> tuple[ResourceState, Povm, Optional[float]]:
    """Resource state, dense POVM and dPBT objective (None for pPBT) of a table cell."""
    if protocol not in PROTOCOLS or resource not in RESOURCES:
        raise ValueError(f"unknown protocol/resource {protocol}/{resource}")
    objective = None
    if protocol == "dpbt":
        if resource == "epr":
            state = epr_resource(n, d)
            objective = dpbt_objective({k: float(v) for k, v in epr_f(n, d).items()}, n, d)
        else:
            f, objective = dpbt_f(n, d)
            state = optimized_resource(n, d, f, "optimized-dPBT")
        return state, redistribute_failure(pgm_bruteforce(n, d)), objective
    if resource == "optimized":
        return optimized_resource(n, d, ppbt_f(n, d), "optimized-pPBT"), pgm_bruteforce(n, d), None
    tw = solve_intertwiner(n, d)
    star = generic_povm(g_epr_ppbt(n, d), n, d, pgm_gt(n, d))
    return epr_resource(n, d), Povm([tw.to_dense(e) for e in star.outcomes]), None


def table_row(protocol: str, resource: str, n: int, d: int) -> dict:
    state, povm, objective = protocol_setup(protocol, resource, n, d)
    fid = entanglement_fidelity(state, povm)
    p = success_probability(state, povm)
    return {"protocol": protocol, "resource": resource, "n": n, "d": d, "F": fid, "p_succ": p,
            "F/p": fid / p if p > 0 else float("nan"), "objective": objective}
