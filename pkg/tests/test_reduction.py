import pytest

from lattice.core import GramMatrix, I_LATTICE, A_LATTICE, J_LATTICE, mat_mul, transpose
from lattice.reduction import (automorphisms, canonical_form, is_minkowski_reduced, minkowski_reduce,
                               representation_count, short_vectors, successive_minima)

SKEW = ((1, 2, -1), (0, 1, 3), (0, 0, 1))

# --- Test Short Vectors --- #

def test_short_vectors_identity():
    vectors = short_vectors(I_LATTICE, 1)
    assert len(vectors) == 6
    assert all(value == 1 for _, value in vectors)


def test_short_vectors_sorted_by_value():
    values = [value for _, value in short_vectors(GramMatrix.diagonal(1, 2, 3), 4)]
    assert values == sorted(values)
    assert max(values) <= 4


@pytest.mark.parametrize("t, expected", [(0, 1), (1, 6), (2, 12), (3, 8), (7, 0)])
def test_representation_counts_of_identity(t, expected):
    assert representation_count(t, I_LATTICE) == expected

# --- Test Reduction --- #

def test_reduced_diagonal_is_its_own_canonical_form():
    g = GramMatrix.diagonal(1, 2, 3)
    assert is_minkowski_reduced(g)
    assert canonical_form(g) == g


def test_canonical_form_is_a_class_invariant():
    g = GramMatrix.diagonal(1, 2, 3)
    skewed = g.transform(SKEW)
    assert not is_minkowski_reduced(skewed)
    assert canonical_form(skewed) == canonical_form(g)


def test_minkowski_reduce_returns_transform():
    skewed = J_LATTICE.transform(SKEW)
    reduced, t = minkowski_reduce(skewed)
    assert is_minkowski_reduced(reduced)
    assert mat_mul(mat_mul(transpose(t), skewed.rows), t) == reduced.rows


def test_unsorted_diagonal_not_reduced():
    assert not is_minkowski_reduced(GramMatrix.diagonal(3, 2, 1))


def test_successive_minima():
    assert successive_minima(GramMatrix.diagonal(1, 2, 3)) == (1, 2, 3)
    assert successive_minima(A_LATTICE) == (2, 2, 2)

# --- Test Automorphisms --- #

@pytest.mark.parametrize("name", ['I', 'A', 'J'])
def test_order_48_lattices(named, name):
    assert len(automorphisms(named[name])) == 48


def test_automorphisms_preserve_gram():
    g = GramMatrix.diagonal(1, 1, 3)
    group = automorphisms(g)
    assert len(group) == 16
    for s in group:
        assert mat_mul(mat_mul(transpose(s), g.rows), s) == g.rows
