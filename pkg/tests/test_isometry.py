import random

import pytest

from lattice.core import GramMatrix, I_LATTICE, A_LATTICE, mat_mul, random_unimodular, transpose
from lattice.isometry import (Label, central_symmetries, group_order, is_isometric, label, named_lattice_type,
                              orthogonal_group, orthogonal_systems, recognize_family, symmetries, symmetry_classes)
from lattice.localdata import same_genus
from lattice.reduction import canonical_form

# --- Test Labels --- #

def test_identity_label():
    lab = label(I_LATTICE)
    assert lab == Label(48, (1, 1, 1, 2, 2, 2, 2, 2, 2))
    assert str(lab) == "<48; 1,1,1,2,2,2,2,2,2>"


def test_order_16_label():
    assert label(GramMatrix.diagonal(1, 1, 3)) == Label(16, (1, 1, 2, 2, 3))


def test_order_8_label():
    g = GramMatrix.diagonal(1, 2, 3)
    assert group_order(g) == 8
    assert label(g) == Label(8, (1, 2, 3))


def test_label_sorting_scaling_and_json():
    lab = Label(8, (3, 1, 2))
    assert lab.q_values == (1, 2, 3)
    assert lab.scaled(5) == Label(8, (5, 10, 15))
    assert Label.from_json(lab.to_json()) == lab
    assert str(Label(2)) == "<2>"
    assert Label(2) < Label(4, (1,)) < Label(4, (2,))

# --- Test Symmetries --- #

def test_symmetries_are_reflections():
    g = GramMatrix.diagonal(1, 1, 3)
    syms = symmetries(g)
    assert len(syms) == 5
    for s in syms:
        assert mat_mul(mat_mul(transpose(s.matrix), g.rows), s.matrix) == g.rows
        assert g.q(s.axis) == s.q_value
        assert mat_mul(s.matrix, s.matrix) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_symmetry_classes_of_order_16():
    classes = symmetry_classes(GramMatrix.diagonal(1, 1, 3))
    sizes = sorted(len(c) for c in classes)
    assert sizes == [1, 2, 2]


def test_central_symmetry_of_order_16():
    central = central_symmetries(GramMatrix.diagonal(1, 1, 3))
    assert [s.q_value for s in central] == [3]


def test_orthogonal_systems():
    assert len(orthogonal_systems(GramMatrix.diagonal(1, 2, 3))) == 1
    assert orthogonal_systems(A_LATTICE) != []
    assert orthogonal_systems(GramMatrix.diagonal(1, 1, 3).transform(((1, 1, 0), (0, 1, 0), (0, 0, 1)))) != []

def test_orthogonal_group_of_identity():
    group = orthogonal_group(I_LATTICE)
    assert len(group) == 48
    assert {g.order for g in group} <= {1, 2, 3, 4, 6}
    assert [g.order for g in group].count(1) == 1


# --- Test Isometry Search --- #

def test_is_isometric_finds_transform():
    g = GramMatrix.diagonal(1, 1, 3)
    t = ((1, 1, 0), (0, 1, 1), (0, 0, 1))
    h = g.transform(t)
    found = is_isometric(g, h)
    assert found is not None
    assert mat_mul(mat_mul(transpose(found), g.rows), found) == h.rows


def test_non_isometric_same_discriminant():
    assert is_isometric(GramMatrix.diagonal(1, 1, 3),
                        GramMatrix.from_rows(((2, 1, 0), (1, 2, 0), (0, 0, 1)))) is None

# --- Test Class Invariants --- #

def test_invariants_survive_unimodular_transforms():
    rng = random.Random(11)
    for _ in range(60):
        base = GramMatrix.diagonal(*(rng.randint(1, 12) for _ in range(3)))
        base = base.transform(random_unimodular(rng, 2))
        moved = base.transform(random_unimodular(rng))
        assert canonical_form(moved) == canonical_form(base)
        assert label(moved) == label(base)
        assert same_genus(moved, base)
        assert is_isometric(base, moved) is not None

# --- Test Family Recognition --- #

def test_named_lattice_type():
    assert named_lattice_type(A_LATTICE.scaled(3)) == 'A'
    assert named_lattice_type(I_LATTICE) == 'I'
    assert named_lattice_type(GramMatrix.diagonal(1, 1, 3)) is None


def test_recognize_k4(named):
    match = recognize_family(named['K4_295'])
    assert match is not None
    assert (match.family, match.a, match.b) == ('K4', 1, 295)


@pytest.mark.parametrize("g", [I_LATTICE, A_LATTICE])
def test_recognize_order_48(g):
    assert recognize_family(g) is not None
