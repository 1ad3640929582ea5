"""Invariant suites shared by the command line and the test-suite.

Every check yields a ``Check`` with the residual it measured and the
threshold it must stay under; exact identities use residual 0 or 1.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

import numpy as np

from . import oracles
from .algebra import BlockOperator, block_cyclic, gt_transposition, solve_intertwiner, verify_blocks
from .bratteli import build_diagram, from_yamanouchi, to_yamanouchi
from .circuits import (
    Simulator,
    prep_path_amplitudes,
    synth_measurement,
    synth_resource_prep,
    synth_transposition_std,
    synth_yamanouchi_transposition,
)
from .measurements import (
    GDiag,
    compress,
    dilated_pvm,
    g_epr_ppbt,
    generic_povm,
    naimark_compression,
    naimark_two_outcome,
    pgm_bruteforce,
    pgm_gt,
)
from .partitions import (
    addable_cells,
    add_cell,
    branch_ratio,
    content,
    enumerate_partitions,
    hook_content_dim,
    removable_cells,
    sym_dim,
    weyl_dim,
)
from .protocols import (
    dpbt_f,
    entanglement_fidelity,
    epr_f,
    epr_resource,
    isotypic_weights,
    optimized_resource,
    ppbt_f,
    protocol_setup,
    success_probability,
)

FAULTS = ("perturb-g",)


@dataclass
class Check:
    suite: str
    name: str
    params: dict
    residual: float
    threshold: float
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        self.residual = float(self.residual)
        self.passed = bool(np.isfinite(self.residual) and self.residual <= self.threshold)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerifyConfig:
    max_n: int = 3
    max_d: int = 2
    exact_max: int = 7
    seed: int = 2024
    fault: Optional[str] = None

    def cells(self, min_n: int = 2) -> list[tuple[int, int]]:
        return [(n, d) for d in range(2, self.max_d + 1) for n in range(min_n, self.max_n + 1)]


# partitions

def exact_identities(max_size: int, max_d: int) -> dict[str, int]:
    """Count violations of the exact dimension identities; all entries should be 0.

    Walled dimension sums run over n < max_size, the rest over |lam| <= max_size.
    """
    bad = {"dimension_sum": 0, "branching": 0, "content_ratio": 0, "content_product": 0,
           "hook_vs_count": 0, "weyl_vs_hook_content": 0}
    for d in range(2, max_d + 1):
        for n in range(1, max_size):
            bad["dimension_sum"] += walled_dimension_sum(n, d) != 0
    for k in range(0, max_size + 1):
        for lam in enumerate_partitions(k):
            n = k + 1
            kids = addable_cells(lam)
            bad["branching"] += n * sym_dim(lam) != sum(sym_dim(add_cell(lam, a)) for a in kids)
            bad["hook_vs_count"] += sym_dim(lam) != oracles.count_standard_tableaux(lam)
            for a in kids:
                num = Fraction(1)
                for c in removable_cells(lam):
                    num *= content(a) - content(c)
                for c in kids:
                    if c != a:
                        num /= content(a) - content(c)
                ratio = Fraction(sym_dim(add_cell(lam, a)), n * sym_dim(lam))
                bad["content_product"] += num != ratio or branch_ratio(lam, a) != ratio
            for d in range(1, max_d + 1):
                if len(lam) > d:
                    continue
                bad["weyl_vs_hook_content"] += weyl_dim(lam, d) != hook_content_dim(lam, d)
                for a in addable_cells(lam, d):
                    mu = add_cell(lam, a)
                    lhs = Fraction(n * sym_dim(lam) * weyl_dim(mu, d), weyl_dim(lam, d) * sym_dim(mu))
                    bad["content_ratio"] += lhs != d + content(a)
    return bad


def walled_dimension_sum(n: int, d: int) -> int:
    """|d^{n+1} - sum over leaves of d_Lambda m_Lambda| on the (n, 1) diagram."""
    diagram = build_diagram(n, d)
    return abs(d ** (n + 1) - sum(diagram.dim(x) * diagram.mult(x) for x in diagram.leaves))


def suite_partitions(cfg: VerifyConfig) -> Iterator[Check]:
    for name, bad in exact_identities(cfg.exact_max, max(cfg.max_d, 2)).items():
        yield Check("partitions", name, {"max_size": cfg.exact_max}, bad, 0)
    for lam in enumerate_partitions(5):
        for d in range(1, cfg.max_d + 2):
            yield Check("partitions", "weyl_vs_semistandard_count", {"lam": list(lam), "d": d},
                        abs(weyl_dim(lam, d) - oracles.count_semistandard_tableaux(lam, d)), 0)


def suite_bratteli(cfg: VerifyConfig) -> Iterator[Check]:
    for n, d in cfg.cells(min_n=1):
        yield Check("bratteli", "dimension_sum", {"n": n, "d": d}, walled_dimension_sum(n, d), 0)
        diagram = build_diagram(n, d)
        bad = 0
        for leaf in diagram.leaves:
            for path in diagram.paths_to(leaf):
                bad += from_yamanouchi(to_yamanouchi(path), diagram) != path
        yield Check("bratteli", "yamanouchi_roundtrip", {"n": n, "d": d}, bad, 0)


# algebra and measurements

def suite_algebra(cfg: VerifyConfig) -> Iterator[Check]:
    for n, d in cfg.cells(min_n=1):
        res = verify_blocks(solve_intertwiner(n, d))
        for name, val in res.items():
            yield Check("algebra", f"intertwiner_{name}", {"n": n, "d": d}, val, 1e-10)


def pgm_oracle_residual(n: int, d: int) -> float:
    tw = solve_intertwiner(n, d)
    brute = pgm_bruteforce(n, d)
    return max(float(np.max(np.abs(tw.to_dense(e) - b))) for e, b in zip(pgm_gt(n, d).outcomes, brute.outcomes))


def dilation_residuals(n: int, d: int) -> dict[str, float]:
    pvm = dilated_pvm(n, d)
    diagram = pvm.diagram
    out = {"idempotent": 0.0, "orthogonal": 0.0, "complete": 0.0, "compression": 0.0}
    ports = pvm.outcomes[1:]
    for i, a in enumerate(ports):
        out["idempotent"] = max(out["idempotent"], (a @ a - a).max_abs())
        for b in ports[i + 1:]:
            out["orthogonal"] = max(out["orthogonal"], (a @ b).max_abs())
    total = ports[0]
    for a in ports[1:]:
        total = total + a
    for leaf, blk in total.blocks.items():
        if not leaf.right:
            out["complete"] = max(out["complete"], float(np.max(np.abs(blk - np.eye(len(blk))))))
    for a, e in zip(ports, pgm_gt(n, d).outcomes[1:]):
        out["compression"] = max(out["compression"], (compress(a, diagram) - e).max_abs())
    return out


def random_g(n: int, d: int, rng: np.random.Generator) -> GDiag:
    diagram = build_diagram(n, d)
    return GDiag({(leaf.left, a): float(rng.uniform()) for leaf in diagram.leaves if not leaf.right
                  for a in addable_cells(leaf.left, d)})


def naimark_residual(n: int, d: int, g: GDiag, vectors: int, seed: int, fault: Optional[str] = None) -> float:
    """max |<0 psi| Pi_k |0 psi> - <psi| E_k |psi>| over random GT-basis vectors."""
    diagram = build_diagram(n, d, dilated=True)
    pvm = dilated_pvm(n, d)
    target = generic_povm(g.perturbed(1e-3) if fault == "perturb-g" else g, n, d)
    comp = [compress(e, diagram) for e in naimark_compression(naimark_two_outcome(g, pvm))]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(vectors):
        for leaf in target.diagram.leaves:
            dim = target.diagram.dim(leaf)
            psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            psi /= np.linalg.norm(psi)
            for c, e in zip(comp, target.outcomes):
                lhs = psi.conj() @ c.blocks[leaf] @ psi
                rhs = psi.conj() @ e.blocks[leaf] @ psi
                worst = max(worst, abs(lhs - rhs))
    return worst


def suite_measurements(cfg: VerifyConfig) -> Iterator[Check]:
    rng = np.random.default_rng(cfg.seed)
    for n, d in cfg.cells():
        yield Check("measurements", "pgm_vs_bruteforce", {"n": n, "d": d}, pgm_oracle_residual(n, d), 1e-10)
        for name, val in dilation_residuals(n, d).items():
            yield Check("measurements", f"dilated_pvm_{name}", {"n": n, "d": d}, val, 1e-10)
        g = random_g(n, d, rng)
        yield Check("measurements", "naimark_compression", {"n": n, "d": d},
                    naimark_residual(n, d, g, 20, cfg.seed, cfg.fault), 1e-12)


# protocols

def isotypic_residual(n: int, d: int) -> float:
    exact = epr_f(n, d)
    got = isotypic_weights(epr_resource(n, d))
    return max(abs(got.get(mu, 0.0) - float(v)) for mu, v in exact.items())


def suite_protocols(cfg: VerifyConfig) -> Iterator[Check]:
    for n, d in cfg.cells():
        p = {"n": n, "d": d}
        yield Check("protocols", "epr_isotypic_overlaps", p, isotypic_residual(n, d), 1e-10)
        f = ppbt_f(n, d)
        got = isotypic_weights(optimized_resource(n, d, f))
        yield Check("protocols", "optimized_isotypic_overlaps", p, max(abs(got[mu] - f[mu]) for mu in f), 1e-10)
        for resource in ("epr", "optimized"):
            res, povm, _ = protocol_setup("ppbt", resource, n, d)
            fid, prob = entanglement_fidelity(res, povm), success_probability(res, povm)
            yield Check("protocols", f"ppbt_{resource}_F_equals_p", p, abs(fid - prob), 1e-10)
            res, povm, obj = protocol_setup("dpbt", resource, n, d)
            yield Check("protocols", f"dpbt_{resource}_trace_preserving", p,
                        abs(success_probability(res, povm) - 1.0), 1e-10)
            yield Check("protocols", f"dpbt_{resource}_F_vs_objective", p,
                        abs(entanglement_fidelity(res, povm) - obj / d**2), 1e-10)
        _, val = dpbt_f(n, d)
        _, ref = oracles.projected_gradient_dpbt(n, d)
        yield Check("protocols", "dpbt_optimizer_vs_projected_gradient", p, abs(val - ref), 1e-8)


# circuits

def circuit_povm_check(n: int, d: int, encoding: str, g: Optional[GDiag], trials: int, seed: int,
                       with_corr: bool = True, fault: Optional[str] = None) -> dict[str, float]:
    """Total variation against the dense POVM and worst Corr fidelity over random inputs."""
    circ = synth_measurement(n, d, encoding, g, with_corr=with_corr)
    sim = Simulator(circ)
    tw = solve_intertwiner(n, d)
    ref_g = g.perturbed(1e-3) if (g is not None and fault == "perturb-g") else g
    povm = generic_povm(ref_g, n, d) if g is not None else pgm_gt(n, d)
    effects = [tw.to_dense(e) for e in povm.outcomes]
    roots = []
    for e in effects:
        vals, vecs = np.linalg.eigh(e)
        roots.append((vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T)
    rng = np.random.default_rng(seed)
    size = d ** (n + 1)
    tv, fid = 0.0, 1.0
    dists = []
    for _ in range(trials):
        psi = rng.normal(size=size) + 1j * rng.normal(size=size)
        psi /= np.linalg.norm(psi)
        res = sim.run(psi, ["X"])
        p = res.probabilities["anc"]
        exact = np.array([np.real(psi.conj() @ e @ psi) for e in effects])
        dists.append(p)
        tv = max(tv, 0.5 * float(np.abs(p - exact).sum()))
        if not with_corr:
            continue
        for k in range(1, n + 1):
            if exact[k] < 1e-9:
                continue
            names, branch = res.branch({"anc": k})
            mat = np.moveaxis(branch, names.index("X"), 0).reshape(size, -1)
            target = roots[k] @ psi
            overlap = np.linalg.norm(target.conj() @ mat) ** 2
            fid = min(fid, overlap / (np.linalg.norm(mat) ** 2 * np.linalg.norm(target) ** 2))
    return {"tv": tv, "corr_infidelity": 1.0 - fid, "distributions": dists}


def path_block(circuit, leaf, paths, extra=None) -> np.ndarray:
    """Matrix of a fragment on the standard-encoded paths of one leaf.

    ``extra`` fixes further registers (name -> basis index) on input and output.
    """
    n = circuit.meta["n"]
    extra = dict(extra or {})
    regs = [f"T{k}" for k in range(n + 1)] + ["L"] + list(extra)
    sim = Simulator(circuit)

    def values(path):
        vals = [circuit.registers[f"T{k}"].index(path[k]) for k in range(n + 1)]
        return vals + [circuit.registers["L"].index(leaf)] + list(extra.values())

    cols = []
    for path in paths:
        state = np.ones(1)
        for r, v in zip(regs, values(path)):
            vec = np.zeros(circuit.registers[r].dim)
            vec[v] = 1.0
            state = np.multiply.outer(state, vec)
        out = sim.run(state.reshape(state.shape[1:]), regs)
        arr = np.transpose(out.state, [out.names.index(r) for r in regs] +
                           [i for i, r in enumerate(out.names) if r not in regs])
        tail = tuple(circuit.registers[r].init for r in out.names if r not in regs)
        cols.append([arr[tuple(values(q)) + tail] for q in paths])
    return np.array(cols).T


def fragment_residuals(n: int, d: int) -> dict[str, float]:
    diagram = build_diagram(n, d, dilated=True)
    out = {"transposition_std": 0.0, "transposition_yamanouchi": 0.0, "work_clean": 0.0}
    for i in range(1, n):
        circ = synth_transposition_std(i, n, d)
        for leaf in diagram.leaves:
            got = path_block(circ, leaf, diagram.paths_to(leaf))
            out["transposition_std"] = max(out["transposition_std"],
                                           float(np.max(np.abs(got - gt_transposition(diagram, leaf, i)))))
        yres = _yamanouchi_fragment(i, n, d, diagram)
        out["transposition_yamanouchi"] = max(out["transposition_yamanouchi"], yres[0])
        out["work_clean"] = max(out["work_clean"], yres[1])
    return out


def _yamanouchi_fragment(i: int, n: int, d: int, diagram) -> tuple[float, float]:
    circ = synth_yamanouchi_transposition(i, n, d)
    regs = [f"y{k}" for k in range(1, n + 1)] + ["L"]
    sim = Simulator(circ)
    worst, leak = 0.0, 0.0
    for leaf in diagram.leaves:
        paths = diagram.paths_to(leaf)
        ref = gt_transposition(diagram, leaf, i)
        words = [to_yamanouchi(p).rows for p in paths]
        for col, word in enumerate(words):
            state = np.ones(1)
            for k, r in enumerate(regs):
                reg = circ.registers[r]
                v = np.zeros(reg.dim)
                v[reg.index(leaf if r == "L" else (1 if k == 0 else word[k - 1]))] = 1.0
                state = np.multiply.outer(state, v)
            out = sim.run(state.reshape(state.shape[1:]), regs)
            w_axis = out.names.index("W")
            arr = np.moveaxis(out.state, w_axis, -1)
            clean = circ.registers["W"].init
            leak = max(leak, float(np.linalg.norm(np.delete(arr, clean, axis=-1))))
            arr = np.transpose(arr[..., clean], [[n for n in out.names if n != "W"].index(r) for r in regs])
            for row, other in enumerate(words):
                idx = tuple(circ.registers[r].index(leaf if r == "L" else (1 if k == 0 else other[k - 1]))
                            for k, r in enumerate(regs))
                worst = max(worst, abs(arr[idx] - ref[row, col]))
    return worst, leak


def resource_prep_residual(n: int, d: int, f) -> float:
    circ = synth_resource_prep(n, d, f)
    res = Simulator(circ).run(np.ones(1), [])
    amps = prep_path_amplitudes(circ, res.state, res.names)
    worst = abs(np.linalg.norm(res.state) - 1.0)
    expected = {}
    for mu in enumerate_partitions(n, d):
        if float(f.get(mu, 0)) > 0:
            expected[mu] = np.sqrt(float(f[mu]) / sym_dim(mu))
    seen = {}
    for path, a in amps.items():
        mu = path[n - 1]
        mirrored = all(path[k - 1] == path[2 * n - k - 1] for k in range(2, n))
        worst = max(worst, abs(abs(a) - expected.get(mu, 0.0)), 0.0 if mirrored else 1.0)
        seen[mu] = seen.get(mu, 0) + 1
    for mu in expected:
        worst = max(worst, abs(seen.get(mu, 0) - sym_dim(mu)))
    return worst


def suite_circuits(cfg: VerifyConfig) -> Iterator[Check]:
    for n, d in cfg.cells():
        p = {"n": n, "d": d}
        for name, val in fragment_residuals(n, d).items():
            yield Check("circuits", name, p, val, 1e-10)
        for encoding in ("standard", "yamanouchi"):
            for deformed in (False, True):
                g = g_epr_ppbt(n, d) if deformed else None
                res = circuit_povm_check(n, d, encoding, g, 3, cfg.seed, fault=cfg.fault)
                q = dict(p, encoding=encoding, G=deformed)
                yield Check("circuits", "measurement_tv", q, res["tv"], 1e-7)
                yield Check("circuits", "corr_infidelity", q, res["corr_infidelity"], 1e-8)
        for tag, f in (("ppbt", ppbt_f(n, d)), ("epr", {k: float(v) for k, v in epr_f(n, d).items()})):
            yield Check("circuits", f"resource_prep_{tag}", p, resource_prep_residual(n, d, f), 1e-10)


SUITES: dict[str, Callable[[VerifyConfig], Iterator[Check]]] = {
    "partitions": suite_partitions,
    "bratteli": suite_bratteli,
    "algebra": suite_algebra,
    "measurements": suite_measurements,
    "protocols": suite_protocols,
    "circuits": suite_circuits,
}


def run_suites(cfg: VerifyConfig, names=None) -> list[Check]:
    if cfg.fault is not None and cfg.fault not in FAULTS:
        raise ValueError(f"unknown fault {cfg.fault}")
    out = []
    for name in names or SUITES:
        out.extend(SUITES[name](cfg))
    return out
