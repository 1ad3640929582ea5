from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import partitions
from portbased import oracles
from portbased.partitions import (
    Cell,
    IrrepLabel,
    add_cell,
    add_to_row,
    addable_cells,
    branch_ratio,
    conjugate,
    content,
    enumerate_partitions,
    hook_content_dim,
    is_partition,
    removable_cells,
    remove_cell,
    sym_dim,
    weyl_dim,
)
from portbased.verify import exact_identities


def test_content_examples():
    assert content(Cell(1, 1)) == 0
    assert content(Cell(4, 1)) == -3
    cells = [(r, c) for r, row in enumerate((3, 2), 1) for c in range(1, row + 1)]
    assert [content(c) for c in cells] == [0, 1, 2, -1, 0]


def test_addable_and_removable_examples():
    assert addable_cells((5, 3, 3)) == [Cell(1, 6), Cell(2, 4), Cell(4, 1)]
    assert addable_cells((5, 3, 3), 3) == [Cell(1, 6), Cell(2, 4)]
    assert addable_cells(()) == [Cell(1, 1)]
    assert removable_cells((5, 3, 3)) == [Cell(1, 5), Cell(3, 3)]
    assert removable_cells((1,)) == [Cell(1, 1)]
    assert removable_cells((2, 2)) == [Cell(2, 2)]


def test_dimension_examples():
    assert sym_dim((1,)) == 1
    assert sym_dim((2, 1)) == 2
    assert sym_dim((3, 2)) == 5
    assert weyl_dim((1,), 2) == 2
    assert weyl_dim((2,), 2) == 3
    assert weyl_dim((1, 1, 1), 2) == 0


def test_weyl_dim_on_irrep_labels():
    # the box label carries a -1 weight in the last slot
    assert weyl_dim(IrrepLabel((1,), ()), 2) == 2
    assert weyl_dim(IrrepLabel((), ()), 3) == 1
    # weight (2, -1) for d = 2
    assert weyl_dim(IrrepLabel((2,), (1,)), 2) == 4


def test_branch_ratio_examples():
    assert branch_ratio((1,), (1, 2)) == Fraction(1, 2)
    assert branch_ratio((), (1, 1)) == 1
    # d_(2,2) / (4 d_(2,1)) = 2 / 8
    assert branch_ratio((2, 1), (2, 2)) == Fraction(1, 4)
    with pytest.raises(ValueError):
        branch_ratio((2, 1), (1, 2))


def test_enumerate_examples():
    assert enumerate_partitions(0, 3) == [()]
    assert enumerate_partitions(3, 2) == [(3,), (2, 1)]
    assert len(enumerate_partitions(4, 4)) == 5


def test_add_to_row_rejects_gaps():
    assert add_to_row((1,), 3) is None
    assert add_to_row((1,), 2) == (1, 1)
    with pytest.raises(ValueError):
        add_cell((1,), (3, 1))


def test_exact_identities_up_to_nine_cells():
    assert exact_identities(9, 4) == dict.fromkeys(exact_identities(1, 2), 0)


@given(partitions(max_size=9))
def test_hook_length_matches_tableau_count(lam):
    assert sym_dim(lam) == oracles.count_standard_tableaux(lam)


@given(partitions(max_size=6), st.integers(1, 4))
def test_weyl_matches_semistandard_count_and_hook_content(lam, d):
    assert weyl_dim(lam, d) == oracles.count_semistandard_tableaux(lam, d)
    if len(lam) <= d:
        assert weyl_dim(lam, d) == hook_content_dim(lam, d)


@given(partitions(max_size=9))
def test_branch_ratios_form_a_distribution(lam):
    assert sum(branch_ratio(lam, a) for a in addable_cells(lam)) == 1


@given(partitions(max_size=9))
def test_add_remove_roundtrip(lam):
    for a in addable_cells(lam):
        mu = add_cell(lam, a)
        assert is_partition(mu) and a in removable_cells(mu)
        assert remove_cell(mu, a) == lam
    assert conjugate(conjugate(lam)) == lam
    assert sym_dim(conjugate(lam)) == sym_dim(lam)
