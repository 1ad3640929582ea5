from fractions import Fraction
from math import cos, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from portbased import oracles
from portbased.algebra import solve_intertwiner
from portbased.measurements import Povm, g_epr_ppbt, generic_povm, pgm_bruteforce, pgm_gt
from portbased.partitions import Cell, add_cell, addable_cells, enumerate_partitions, sym_dim
from portbased.protocols import (
    channel_apply,
    dpbt_f,
    dpbt_objective,
    entanglement_fidelity,
    epr_f,
    epr_resource,
    isotypic_projector,
    isotypic_weights,
    optimized_resource,
    path_weights,
    ppbt_f,
    ppbt_f_exact,
    prep_amplitude_sq,
    protocol_setup,
    redistribute_failure,
    success_probability,
    table_row,
)

# d = 2, n = 2..6; fidelities from the square-root objective at 30 digits,
# success probabilities from the exact min-ratio formula
FROZEN_DPBT_EPR = [0.466506350946109662, 0.625, 0.732838894363082945, 0.803860462684472339, 0.850222411777174711]
FROZEN_PPBT_EPR = [Fraction(1, 3), Fraction(13, 32), Fraction(9, 20), Fraction(47, 96), Fraction(29, 56)]


def test_epr_overlaps_examples():
    assert epr_f(1, 2) == {(1,): 1}
    assert epr_f(2, 2) == {(2,): Fraction(3, 4), (1, 1): Fraction(1, 4)}
    assert sum(isotypic_weights(epr_resource(3, 2)).values()) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n,d", [(n, d) for n in range(1, 6) for d in (2, 3)])
def test_isotypic_overlap_law(n, d):
    got = isotypic_weights(epr_resource(n, d))
    for mu, val in epr_f(n, d).items():
        assert abs(got[mu] - float(val)) <= 1e-10


def test_isotypic_projectors_resolve_identity():
    n, d = 3, 2
    total = sum(isotypic_projector(mu, d) for mu in enumerate_partitions(n, d))
    assert np.allclose(total, np.eye(d ** n))


def test_ppbt_f_examples():
    assert ppbt_f_exact(2, 2) == {(2,): Fraction(9, 10), (1, 1): Fraction(1, 10)}
    assert ppbt_f_exact(1, 3) == {(1,): 1}
    for n in range(1, 7):
        assert sum(ppbt_f_exact(n, 3).values()) == 1


def test_optimized_resource_examples():
    n, d = 3, 2
    epr = {k: float(v) for k, v in epr_f(n, d).items()}
    assert np.abs(optimized_resource(n, d, epr).psi - epr_resource(n, d).psi).max() < 1e-12
    point = {(3,): 1.0, (2, 1): 0.0}
    state = optimized_resource(n, d, point)
    sym = isotypic_projector((3,), d)
    assert np.abs(sym @ state.psi - state.psi).max() < 1e-12
    assert np.linalg.norm(state.vector) == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        optimized_resource(n, d, {(1, 1, 1): 1.0})


def test_prep_amplitude_examples():
    assert prep_amplitude_sq((), Cell(1, 1), 2) == 1
    assert prep_amplitude_sq((1,), Cell(1, 2), 2) == Fraction(9, 10)
    assert prep_amplitude_sq((1,), Cell(2, 1), 2) == Fraction(1, 10)
    with pytest.raises(ValueError):
        prep_amplitude_sq((1,), Cell(3, 1), 2)


@given(st.integers(1, 7), st.integers(2, 4))
def test_prep_amplitudes_telescope_to_f(n, d):
    f = ppbt_f_exact(n, d)

    def walk(nu, acc):
        if sum(nu) == n:
            assert acc == f[nu] / sym_dim(nu)
            return
        assert sum(prep_amplitude_sq(nu, a, d) for a in addable_cells(nu, d)) == 1
        for a in addable_cells(nu, d):
            walk(add_cell(nu, a), acc * prep_amplitude_sq(nu, a, d))

    walk((), Fraction(1))
    g = path_weights({k: float(v) for k, v in f.items()}, n, d)
    assert g[()] == pytest.approx(1, abs=1e-12)


def test_dpbt_f_two_ports():
    f, obj = dpbt_f(2, 2)
    assert f[(2,)] == pytest.approx(0.5, abs=1e-12) and f[(1, 1)] == pytest.approx(0.5, abs=1e-12)
    assert obj == pytest.approx(2, abs=1e-12)


@pytest.mark.parametrize("n,d", [(n, d) for n in range(2, 7) for d in (2, 3)])
def test_dpbt_optimizer_against_projected_gradient(n, d):
    f, obj = dpbt_f(n, d)
    assert dpbt_objective(f, n, d) == pytest.approx(obj, abs=1e-12)
    _, ref = oracles.projected_gradient_dpbt(n, d)
    assert abs(obj - ref) <= 1e-8
    assert obj >= dpbt_objective({k: float(v) for k, v in epr_f(n, d).items()}, n, d) - 1e-12


@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_fidelity_matches_bruteforce_oracle(n, d):
    for protocol in ("dpbt", "ppbt"):
        if protocol == "ppbt" and n == 1:
            continue
        for resource in ("epr", "optimized"):
            state, povm, _ = protocol_setup(protocol, resource, n, d)
            fid, prob = oracles.fidelity_bruteforce(state.psi, povm.outcomes, n, d)
            assert entanglement_fidelity(state, povm) == pytest.approx(fid, abs=1e-12)
            assert success_probability(state, povm) == pytest.approx(prob, abs=1e-12)


def test_single_port_fidelity():
    state, povm, _ = protocol_setup("dpbt", "epr", 1, 2)
    assert entanglement_fidelity(state, povm) == pytest.approx(0.25, abs=1e-12)


def test_frozen_qubit_values():
    for n, want in zip(range(2, 7), FROZEN_DPBT_EPR):
        assert table_row("dpbt", "epr", n, 2)["F"] == pytest.approx(want, abs=1e-11)
    for n, want in zip(range(2, 7), FROZEN_PPBT_EPR):
        assert table_row("ppbt", "epr", n, 2)["p_succ"] == pytest.approx(float(want), abs=1e-11)


@pytest.mark.parametrize("n,d", [(n, d) for n in range(2, 6) for d in (2, 3)])
def test_closed_forms_against_channel(n, d):
    assert table_row("ppbt", "epr", n, d)["p_succ"] == pytest.approx(float(oracles.ppbt_epr_success_exact(n, d)),
                                                                     abs=1e-12)
    assert table_row("dpbt", "epr", n, d)["F"] == pytest.approx(oracles.dpbt_epr_fidelity(n, d), abs=1e-12)


@pytest.mark.parametrize("n", range(2, 7))
def test_known_qubit_closed_forms(n):
    # optimal dPBT fidelity cos^2(pi/(n+2)); optimal pPBT success n/(n+3)
    assert table_row("dpbt", "optimized", n, 2)["F"] == pytest.approx(cos(pi / (n + 2)) ** 2, abs=1e-10)
    assert table_row("ppbt", "optimized", n, 2)["p_succ"] == pytest.approx(n / (n + 3), abs=1e-10)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_dpbt_is_trace_preserving(n, d):
    state, povm, obj = protocol_setup("dpbt", "epr", n, d)
    assert success_probability(state, povm) == pytest.approx(1, abs=1e-12)
    res = channel_apply(state, povm, np.eye(d) / d)
    assert sum(res.probabilities) == pytest.approx(1, abs=1e-10)
    assert entanglement_fidelity(state, povm) == pytest.approx(obj / d**2, abs=1e-10)


def test_channel_probabilities_and_mixed_input():
    n, d = 2, 2
    state, povm = epr_resource(n, d), pgm_bruteforce(n, d)
    res = channel_apply(state, povm, np.eye(d) / d)
    assert sum(res.probabilities) == pytest.approx(1, abs=1e-12)
    assert sum(res.probabilities[1:]) == pytest.approx(success_probability(state, povm), abs=1e-12)
    with pytest.raises(ValueError):
        channel_apply(state, povm, np.diag([1.5, -0.5]))


@settings(max_examples=5)
@given(st.integers(0, 2**32 - 1))
def test_channel_unitary_equivariance(seed):
    n, d = 2, 2
    rng = np.random.default_rng(seed)
    state, povm = epr_resource(n, d), redistribute_failure(pgm_bruteforce(n, d))
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    u, _ = np.linalg.qr(z)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    rho = np.outer(v, v.conj()) / np.vdot(v, v).real
    plain = channel_apply(state, povm, rho).outputs
    turned = channel_apply(state, povm, u @ rho @ u.conj().T).outputs
    for a, b in zip(plain[1:], turned[1:]):
        assert np.abs(u @ a @ u.conj().T - b).max() < 1e-10


def test_box_redistribution_leaves_figures_unchanged():
    n, d = 3, 2
    tw = solve_intertwiner(n, d)
    g = g_epr_ppbt(n, d)
    base = generic_povm(g, n, d, pgm_gt(n, d))
    uneven = [e for e in base.outcomes]
    weights = np.array([0.7, 0.2, 0.1])
    for k in range(1, n + 1):
        uneven[k] = uneven[k].map(lambda leaf, b, k=k: b if not leaf.right else b * weights[k - 1] * n)
    state = epr_resource(n, d)
    dense_a = Povm([tw.to_dense(e) for e in base.outcomes])
    dense_b = Povm([tw.to_dense(e) for e in uneven])
    assert entanglement_fidelity(state, dense_a) == pytest.approx(entanglement_fidelity(state, dense_b), abs=1e-10)
    assert success_probability(state, dense_a) == pytest.approx(success_probability(state, dense_b), abs=1e-10)
