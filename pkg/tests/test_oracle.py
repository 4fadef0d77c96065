from fractions import Fraction

import pytest

from agents.oracle import FiberCensus, GenusOracleAgent
from lattice.census import ClassRecord, GenusCensus
from lattice.core import GramMatrix, I_LATTICE, ScaledLattice
from lattice.errors import BoundExceededError, InvalidFormError
from lattice.isometry import Label, label
from lattice.reduction import automorphisms, is_minkowski_reduced


@pytest.fixture(scope='module')
def fiber_1125(oracle):
    return oracle.gamma_fiber(ScaledLattice(I_LATTICE, 25), GramMatrix.diagonal(1, 1, 25), 5)

# --- Test Genus Enumeration --- #

def test_reduced_forms_small_discriminant(oracle):
    forms = oracle.reduced_forms(2)
    assert forms == sorted(forms, key=lambda g: g.entries)
    assert all(g.discriminant == 2 and is_minkowski_reduced(g) for g in forms)
    assert GramMatrix.diagonal(1, 1, 2) in forms


def test_reduced_forms_filter(oracle):
    forms = oracle.reduced_forms(4, lambda g: g.is_even)
    assert len(forms) == 1
    assert len(automorphisms(forms[0])) == 48


@pytest.mark.parametrize("name, h, mass", [
    ('I', 1, Fraction(1, 48)),
    ('D113', 1, Fraction(1, 16)),
    ('D1125', 2, Fraction(5, 16)),
])
def test_enumerate_genus(oracle, named, name, h, mass):
    census = oracle.enumerate_genus(named[name])
    assert census.class_number == h
    assert census.mass == mass
    assert census.method == 'oracle'
    assert census.complete_grams


def test_enumerate_genus_labels(oracle, named):
    census = oracle.enumerate_genus(named['D1125'])
    assert sorted(census.label_multiset) == [Label(4, (2,)), Label(16, (1, 1, 2, 2, 25))]


def test_enumerate_genus_keeps_content(oracle):
    census = oracle.enumerate_genus(GramMatrix.diagonal(2, 2, 6))
    assert census.class_number == 1
    assert census.records[0].gram.content == 2


def test_enumerate_genus_bound():
    with pytest.raises(BoundExceededError):
        GenusOracleAgent(max_disc=10).enumerate_genus(GramMatrix.diagonal(1, 1, 25))


def test_threads_give_same_genus(named):
    single = GenusOracleAgent(threads=1).enumerate_genus(named['D1125'])
    pooled = GenusOracleAgent(threads=2).enumerate_genus(named['D1125'])
    assert [r.gram for r in single.records] == [r.gram for r in pooled.records]


def test_genus_representatives(oracle):
    reps = oracle.genus_representatives(3)
    assert len(reps) == 2
    assert all(r.discriminant == 3 for r in reps)

# --- Test Watson Fibers --- #

def test_gamma_fiber_size(fiber_1125):
    assert isinstance(fiber_1125, FiberCensus)
    assert fiber_1125.size == 15
    assert fiber_1125.modulus == 5


def test_fiber_class_counts(fiber_1125):
    counts = fiber_1125.class_counts()
    assert sorted(counts.values()) == [3, 12]
    assert fiber_1125.counts_by_order() == {4: 1, 16: 1}


def test_fiber_orbits(oracle, fiber_1125):
    orbits = oracle.fiber_orbits(fiber_1125)
    assert sorted(len(o) for o in orbits) == [3, 12]


def test_fixed_members(oracle, fiber_1125):
    identity = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert len(oracle.fixed_members(fiber_1125, identity)) == 15
    reflection = ((-1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert len(oracle.fixed_members(fiber_1125, reflection)) == 3


def test_fiber_json(fiber_1125):
    data = fiber_1125.to_json()
    assert data['size'] == 15
    assert sum(c['count'] for c in data['classes']) == 15


def test_gamma_fiber_rejects_wrong_index(oracle):
    with pytest.raises(InvalidFormError):
        oracle.gamma_fiber(ScaledLattice(I_LATTICE, 5), GramMatrix.diagonal(1, 1, 25), 5)


def test_constructive_ascend(oracle):
    lower = GenusCensus(1, [ClassRecord(label(I_LATTICE), I_LATTICE)])
    census = oracle.constructive_ascend(lower, 25, GramMatrix.diagonal(1, 1, 25), 5)
    assert census.method == 'constructive'
    assert census.class_number == 2
    assert oracle.mass_check(census, lower.mass * 15)
    assert not oracle.mass_check(census, lower.mass * 14)


def test_constructive_ascend_needs_grams(oracle):
    lower = GenusCensus(1, [ClassRecord(label(I_LATTICE))])
    with pytest.raises(InvalidFormError):
        oracle.constructive_ascend(lower, 25, GramMatrix.diagonal(1, 1, 25), 5)
