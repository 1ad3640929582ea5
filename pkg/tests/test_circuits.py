import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from portbased.algebra import cyclic_block, gt_transposition
from portbased.bratteli import build_diagram
from portbased.circuits import (
    Circuit,
    Simulator,
    depth,
    gate_count_report,
    gate_counts,
    invert,
    prep_path_amplitudes,
    report_csv,
    synth_cyclic_std,
    synth_measurement,
    synth_resource_prep,
    synth_transposition_std,
    synth_W,
    synth_yamanouchi_transposition,
)
from portbased.circuits.actions import compile_gate
from portbased.measurements import GDiag, dilated_pvm, g_epr_ppbt
from portbased.partitions import BOX, EMPTY, Cell, IrrepLabel
from portbased.protocols import ppbt_f
from portbased.verify import circuit_povm_check, fragment_residuals, path_block, random_g, resource_prep_residual


def _sub_circuit(circ: Circuit, gates) -> Circuit:
    out = Circuit(dict(circ.registers), [], dict(circ.meta))
    out.extend(gates)
    return out


def test_every_compiled_gate_is_unitary():
    for circ in (synth_measurement(3, 2, "standard", g_epr_ppbt(3, 2), with_corr=True),
                 synth_measurement(3, 2, "yamanouchi", g_epr_ppbt(3, 2), with_corr=True),
                 synth_resource_prep(3, 2, ppbt_f(3, 2))):
        for gate in circ.gates:
            if gate.kind in ("schur", "schur_dag", "measure"):
                continue
            for _, mat in compile_gate(gate, circ):
                assert np.abs(mat.conj().T @ mat - np.eye(len(mat))).max() < 1e-12, gate.kind


@pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (3, 3)])
def test_transposition_fragments(n, d):
    res = fragment_residuals(n, d)
    assert max(res.values()) <= 1e-10, res


def test_transposition_is_an_involution():
    n, d = 3, 2
    diagram = build_diagram(n, d, dilated=True)
    frag = synth_transposition_std(2, n, d)
    twice = _sub_circuit(frag, frag.gates + frag.gates)
    for leaf in diagram.leaves:
        blk = path_block(twice, leaf, diagram.paths_to(leaf))
        assert np.abs(blk - np.eye(len(blk))).max() < 1e-10
    with pytest.raises(ValueError):
        synth_transposition_std(3, 3, 2)


def test_transposition_count_is_quadratic_in_d():
    counts = [sum(gate_counts(synth_transposition_std(1, 3, d)).values()) for d in (2, 3, 4)]
    assert counts == [(d + 1) * d // 2 for d in (2, 3, 4)]


def test_cyclic_fragment_and_its_order():
    n, d = 3, 2
    diagram = build_diagram(n, d, dilated=True)
    frag = synth_cyclic_std(n, d)
    power = _sub_circuit(frag, frag.gates * n)
    for leaf in diagram.leaves:
        paths = diagram.paths_to(leaf)
        blk = path_block(frag, leaf, paths)
        assert np.abs(blk - cyclic_block(diagram, leaf).T).max() < 1e-10
        assert np.abs(path_block(power, leaf, paths) - np.eye(len(paths))).max() < 1e-9


def test_cyclic_count_linear_in_n():
    counts = [sum(gate_counts(synth_cyclic_std(n, 2)).values()) for n in range(3, 8)]
    assert np.allclose(np.diff(counts), counts[1] - counts[0])


def _prepared(n, d, dilated, lam):
    frag = synth_W(n, d, dilated)
    diagram = build_diagram(n, d, dilated=True)
    leaf = IrrepLabel(lam, EMPTY)
    sim = Simulator(frag)
    regs = [f"T{k}" for k in range(n + 1)] + ["L"]
    path = [p for p in diagram.paths_to(leaf) if p[n - 1] == lam][0]
    state = np.ones(1)
    for k, r in enumerate(regs):
        reg = frag.registers[r]
        v = np.zeros(reg.dim)
        v[reg.index(leaf if r == "L" else "bot" if k == n else path[k])] = 1.0
        state = np.multiply.outer(state, v)
    out = sim.run(state.reshape(state.shape[1:]), regs)
    top = frag.registers[f"T{n}"]
    amps = out.marginal(f"T{n}")
    return {top.labels[i]: a for i, a in enumerate(amps) if a > 1e-14}


def test_w_preparation_amplitudes():
    assert _prepared(2, 2, True, (1,)) == pytest.approx({(2,): 0.5, (1, 1): 0.5})
    dil = _prepared(3, 2, True, (1, 1))
    assert sum(dil.values()) == pytest.approx(1)
    assert dil[(1, 1, 1)] == pytest.approx(1 / 3)
    plain = _prepared(3, 2, False, (1, 1))
    assert (1, 1, 1) not in plain and sum(plain.values()) == pytest.approx(1)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2)])
def test_phase_estimation_unitary(n, d):
    """anc = 1 block of the controlled-V stage equals sum_k omega^k Pi_k."""
    circ = synth_measurement(n, d, "standard")
    kinds = [g.kind for g in circ.gates]
    start = kinds.index("qft") + 1
    stop = len(kinds) - kinds[::-1].index("qft") - 1
    core = _sub_circuit(circ, circ.gates[start:stop])
    pvm = dilated_pvm(n, d)
    omega = cmath.exp(2j * cmath.pi / (n + 1))
    for leaf in pvm.diagram.leaves:
        paths = pvm.diagram.paths_to(leaf)
        want = sum(omega**k * pvm.outcomes[k].blocks[leaf] for k in range(1, n + 1))
        if leaf.right:
            want = np.eye(len(paths))
        got = path_block(core, leaf, paths, {"anc": 1})
        assert np.abs(got - want).max() < 1e-10


@pytest.mark.parametrize("encoding", ["standard", "yamanouchi"])
@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_measurement_matches_pgm(encoding, n, d):
    res = circuit_povm_check(n, d, encoding, None, 4, seed=11)
    assert res["tv"] <= 1e-7 and res["corr_infidelity"] <= 1e-8


@pytest.mark.parametrize("encoding", ["standard", "yamanouchi"])
def test_deformed_measurement_abort_probability(encoding):
    res = circuit_povm_check(3, 2, encoding, g_epr_ppbt(3, 2), 4, seed=3)
    assert res["tv"] <= 1e-7 and res["corr_infidelity"] <= 1e-8


@settings(max_examples=5)
@given(st.integers(0, 2**32 - 1))
def test_random_deformation(seed):
    g = random_g(2, 2, np.random.default_rng(seed))
    res = circuit_povm_check(2, 2, "standard", g, 2, seed=seed)
    assert res["tv"] <= 1e-7 and res["corr_infidelity"] <= 1e-8


def test_encodings_agree():
    a = circuit_povm_check(2, 2, "standard", None, 3, seed=5, with_corr=False)["distributions"]
    b = circuit_povm_check(2, 2, "yamanouchi", None, 3, seed=5, with_corr=False)["distributions"]
    assert np.abs(np.array(a) - np.array(b)).max() < 1e-8


def test_measurement_rejects_box_deformation():
    with pytest.raises(ValueError):
        synth_measurement(2, 2, "standard", GDiag({}, {(2,): 0.5}))
    with pytest.raises(ValueError):
        synth_measurement(2, 2, "qubits")


def test_yamanouchi_recording_grows_with_level():
    counts = [len(synth_yamanouchi_transposition(i, 7, 2).gates) for i in range(1, 7)]
    assert np.all(np.diff(counts) == 2)


def test_resource_prep_examples():
    n, d = 2, 2
    circ = synth_resource_prep(n, d, ppbt_f(n, d))
    res = Simulator(circ).run(np.ones(1), [])
    amps = prep_path_amplitudes(circ, res.state, res.names)
    squared = {path[1]: abs(a) ** 2 for path, a in amps.items()}
    assert squared == pytest.approx({(2,): 0.9, (1, 1): 0.1})
    assert np.linalg.norm(res.state) == pytest.approx(1)
    assert resource_prep_residual(4, 3, ppbt_f(4, 3)) < 1e-10


def test_gate_counts_are_deterministic():
    a = report_csv(gate_count_report(range(3, 6), [2], "standard")[0])
    b = report_csv(gate_count_report(range(3, 6), [2], "standard")[0])
    assert a == b and a.splitlines()[0].startswith("encoding,n,d,total,depth")
    circ = synth_measurement(3, 2, "yamanouchi")
    assert depth(circ) <= sum(gate_counts(circ).values())


def test_inverse_round_trip_and_serialisation():
    frag = synth_W(3, 2, True)
    both = _sub_circuit(frag, frag.gates + invert(frag.gates))
    diagram = build_diagram(3, 2, dilated=True)
    for leaf in diagram.leaves:
        blk = path_block(both, leaf, diagram.paths_to(leaf))
        assert np.abs(blk - np.eye(len(blk))).max() < 1e-12
    text = synth_measurement(2, 2, "standard", g_epr_ppbt(2, 2)).to_json()
    assert '"1/3"' in text and text == synth_measurement(2, 2, "standard", g_epr_ppbt(2, 2)).to_json()
