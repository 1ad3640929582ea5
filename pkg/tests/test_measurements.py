from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from portbased.algebra import block_cyclic, cyclic_computational, solve_intertwiner
from portbased.bratteli import build_diagram
from portbased.measurements import (
    GDiag,
    compress,
    dilated_pvm,
    g_epr_ppbt,
    g_identity,
    generic_povm,
    naimark_compression,
    naimark_two_outcome,
    pgm_bruteforce,
    pgm_gt,
)
from portbased.partitions import BOX, EMPTY, Cell, IrrepLabel, add_cell, addable_cells, enumerate_partitions, sym_dim
from portbased.verify import dilation_residuals, pgm_oracle_residual, random_g

CELLS = [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3)]


@pytest.mark.parametrize("n,d", CELLS)
def test_povm_axioms(n, d):
    for povm in (pgm_bruteforce(n, d), pgm_gt(n, d), generic_povm(g_epr_ppbt(n, d), n, d)):
        assert povm.completeness_residual() <= 1e-10
        assert povm.min_eig() >= -1e-10


def test_bruteforce_two_ports():
    povm = pgm_bruteforce(2, 2)
    e = povm.outcomes
    assert np.abs(sum(e) - np.eye(8)).max() < 1e-12
    for k in (1, 2):
        assert np.abs(e[0] @ e[k]).max() < 1e-12


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_covariance_in_both_bases(n, d):
    dense = pgm_bruteforce(n, d).outcomes
    pi = cyclic_computational(n, d)
    for k in range(1, n + 1):
        pk = np.linalg.matrix_power(pi, k)
        assert np.abs(pk @ dense[n] @ pk.T - dense[k]).max() < 1e-10
    blocks = pgm_gt(n, d)
    diagram = blocks.diagram
    for k in range(1, n + 1):
        pk = block_cyclic(diagram, k)
        assert (pk @ blocks.outcomes[n] @ pk.dagger() - blocks.outcomes[k]).max_abs() < 1e-12


def test_failure_rank_matches_box_isotypic_dimension():
    n, d = 3, 2
    e0 = pgm_bruteforce(n, d).outcomes[0]
    diagram = build_diagram(n, d)
    box = sum(diagram.dim(x) * diagram.mult(x) for x in diagram.leaves if x.right)
    assert np.linalg.matrix_rank(e0, tol=1e-8) == box


def test_w_vector_two_ports():
    diagram = build_diagram(2, 2)
    blk = pgm_gt(2, 2).outcomes[2].blocks[IrrepLabel((1,), EMPTY)]
    assert np.allclose(blk, np.full((2, 2), 0.5))
    assert not pgm_gt(2, 2).outcomes[1].blocks[IrrepLabel((2,), BOX)].any()
    assert diagram.dim(IrrepLabel((1,), EMPTY)) == 2


@pytest.mark.parametrize("n,d", CELLS)
def test_gt_form_matches_bruteforce(n, d):
    assert pgm_oracle_residual(n, d) <= 1e-10


@given(st.integers(2, 7), st.integers(2, 4))
def test_undilated_norm_defect(n, d):
    for lam in enumerate_partitions(n - 1, d):
        norm = sum(Fraction(sym_dim(add_cell(lam, a)), n * sym_dim(lam)) for a in addable_cells(lam, d))
        defect = Fraction(sym_dim(add_cell(lam, Cell(d + 1, 1))), n * sym_dim(lam)) if len(lam) == d else 0
        assert norm == 1 - defect


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (4, 2)])
def test_pgm_is_projective_when_last_row_empty(n, d):
    pgm = pgm_gt(n, d)
    for leaf, blk in pgm.outcomes[n].blocks.items():
        if not leaf.right and len(leaf.left) < d:
            assert np.abs(blk @ blk - blk).max() < 1e-12


@pytest.mark.parametrize("n,d", [(n, d) for n in range(2, 6) for d in (2, 3) if (n, d) != (5, 3)] + [(5, 3)])
def test_dilated_pvm(n, d):
    res = dilation_residuals(n, d)
    assert max(res.values()) <= 1e-10, res


def test_g_epr_examples():
    g = g_epr_ppbt(2, 2)
    assert g.values[((1,), Cell(1, 2))] == 1
    assert g.values[((1,), Cell(2, 1))] == Fraction(1, 3)
    for n in range(2, 9):
        for d in range(2, 5):
            assert all(0 <= v <= 1 for v in g_epr_ppbt(n, d).values.values())
    with pytest.raises(ValueError):
        GDiag({((1,), Cell(1, 2)): 1.5})


def test_identity_deformation_reduces_to_pgm():
    n, d = 3, 2
    gen, pgm = generic_povm(g_identity(n, d), n, d), pgm_gt(n, d)
    for a, b in zip(gen.outcomes[1:], pgm.outcomes[1:]):
        assert (a - b).max_abs() < 1e-12
    for leaf, blk in gen.outcomes[0].blocks.items():
        assert np.allclose(blk, np.eye(len(blk)) if leaf.right else 0)


def test_failure_block_is_one_minus_g():
    n, d = 3, 2
    g = g_epr_ppbt(n, d)
    povm = generic_povm(g, n, d)
    diagram = povm.diagram
    for leaf in diagram.leaves:
        if not leaf.right:
            assert np.allclose(povm.outcomes[0].blocks[leaf], np.eye(diagram.dim(leaf)) - g.block(diagram, leaf))


def test_naimark_trivial_deformations():
    n, d = 2, 2
    pvm = dilated_pvm(n, d)
    diagram = pvm.diagram
    ones = GDiag({}, {})
    lifted = naimark_two_outcome(ones, pvm)
    for leaf, blk in naimark_compression(lifted)[0].blocks.items():
        assert np.allclose(blk, np.eye(len(blk)))
    full = GDiag({(x.left, a): 1 for x in diagram.leaves if not x.right for a in addable_cells(x.left)},
                 {x.left: 1 for x in diagram.leaves if x.right})
    lifted = naimark_two_outcome(full, pvm)
    for k in range(1, n + 1):
        for leaf, blk in lifted.outcomes[k].blocks.items():
            dim = len(blk) // 2
            assert np.allclose(blk[:dim, :dim], pvm.outcomes[k].blocks[leaf])
            assert np.allclose(blk[dim:, dim:], 0)


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (3, 2)]))
def test_naimark_is_projective(seed, nd):
    n, d = nd
    pvm = dilated_pvm(n, d)
    lifted = naimark_two_outcome(random_g(n, d, np.random.default_rng(seed)), pvm)
    assert lifted.completeness_residual() < 1e-12
    for i, a in enumerate(lifted.outcomes):
        assert (a @ a - a).max_abs() < 1e-12
        for b in lifted.outcomes[i + 1:]:
            assert (a @ b).max_abs() < 1e-12


def test_naimark_rejects_non_projective_input():
    with pytest.raises(ValueError):
        naimark_two_outcome(g_epr_ppbt(3, 2), pgm_gt(3, 2))


def test_compression_of_naimark_is_generic_povm():
    n, d = 3, 2
    g = random_g(n, d, np.random.default_rng(5))
    diagram = build_diagram(n, d, dilated=True)
    comp = [compress(e, diagram) for e in naimark_compression(naimark_two_outcome(g, dilated_pvm(n, d)))]
    target = generic_povm(g, n, d)
    assert max((a - b).max_abs() for a, b in zip(comp, target.outcomes)) < 1e-12


def test_dense_generic_povm_completeness():
    n, d = 2, 3
    tw = solve_intertwiner(n, d)
    dense = [tw.to_dense(e) for e in generic_povm(g_epr_ppbt(n, d), n, d).outcomes]
    assert np.abs(sum(dense) - np.eye(d ** (n + 1))).max() < 1e-10
