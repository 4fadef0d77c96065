import random
from math import prod

import pytest
from sympy import factorint, nextprime

from lattice.core import (GramMatrix, I_LATTICE, A_LATTICE, J_LATTICE, columns, det3, m_plane, mat_mul,
                          random_unimodular)
from lattice.errors import InvalidFormError, OutOfContractError
from lattice.reduction import automorphisms, canonical_form
from lattice.watson import (capital_lambda, capital_lambda_basis, descend_to_stable, hermite_basis, is_stable,
                            lambda_primitive, two_dual_transport)

# --- Test Hermite Bases --- #

def test_hermite_basis_of_index_two_sublattice():
    h = hermite_basis([[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0]])
    assert det3(h) == 4
    assert [tuple(c) for c in columns(h)] == [(1, 1, 0), (0, 2, 0), (0, 0, 2)]


def test_hermite_basis_rejects_degenerate_generators():
    with pytest.raises(InvalidFormError):
        hermite_basis([[1, 0, 0], [0, 1, 0], [1, 1, 0]])


def test_hermite_basis_ignores_the_spanning_set():
    rng = random.Random(3)
    base = capital_lambda_basis(GramMatrix.diagonal(1, 1, 25), 5)
    for _ in range(20):
        moved = mat_mul(base, random_unimodular(rng))
        assert hermite_basis(columns(moved)) == base
        assert hermite_basis(columns(moved) + [(0, 0, 0)]) == base

# --- Test Watson Transformations --- #

def test_lambda_two_of_identity_is_a():
    assert canonical_form(capital_lambda(I_LATTICE, 2)) == canonical_form(A_LATTICE)


def test_lambda_two_of_j_is_twice_identity():
    sub = capital_lambda(J_LATTICE, 2)
    assert canonical_form(sub) == GramMatrix.diagonal(4, 4, 4)
    lam = lambda_primitive(J_LATTICE, 2)
    assert canonical_form(lam.primitive) == I_LATTICE
    assert lam.scale == 4


def test_lambda_odd_prime_on_diagonal():
    assert capital_lambda(GramMatrix.diagonal(1, 1, 9), 3) == GramMatrix.diagonal(9, 9, 9)
    lam = lambda_primitive(GramMatrix.diagonal(1, 1, 3), 3)
    assert lam.scale == 3
    assert canonical_form(lam.primitive) == canonical_form(GramMatrix.diagonal(1, 3, 3))


def test_lambda_at_unimodular_prime_is_rescaling():
    g = GramMatrix.diagonal(1, 2, 3)
    lam = lambda_primitive(g, 5)
    assert lam.scale == 25
    assert canonical_form(lam.primitive) == canonical_form(g)
    assert lam.gram.discriminant == 25 ** 3 * g.discriminant


def test_lambda_index_divides_discriminant_growth():
    g = GramMatrix.diagonal(1, 1, 25)
    index = det3(capital_lambda_basis(g, 5))
    assert capital_lambda(g, 5).discriminant == index * index * g.discriminant


def test_automorphisms_survive_lambda():
    g = GramMatrix.diagonal(1, 1, 3)
    assert len(automorphisms(lambda_primitive(g, 3).primitive)) % len(automorphisms(g)) == 0


def test_lambda_modulus_limits():
    with pytest.raises(OutOfContractError):
        capital_lambda_basis(I_LATTICE, 8)
    with pytest.raises(ValueError):
        capital_lambda_basis(I_LATTICE, 1)


def test_two_dual_transport_of_a_is_j():
    assert canonical_form(two_dual_transport(A_LATTICE)) == canonical_form(J_LATTICE)


def test_lambda_squared_returns_the_class():
    """Twice lambda_m at odd squarefree m with ord_p(dL) <= 1 for p | m gives back L."""
    rng = random.Random(5)
    for _ in range(100):
        diagonal = GramMatrix.diagonal(*(rng.randint(1, 30) for _ in range(3))).primitive()
        g = diagonal.transform(random_unimodular(rng, 4))
        factors = factorint(g.discriminant)
        primes = [p for p, e in factors.items() if p > 2 and e == 1]
        if primes:
            m = prod(primes)
        else:
            m = 3
            while m in factors:
                m = int(nextprime(m))
        twice = lambda_primitive(lambda_primitive(g, m).primitive, m).primitive
        assert canonical_form(twice) == canonical_form(g), (g, m)

# --- Test Stability and Descent --- #

@pytest.mark.parametrize("g, expected", [
    (I_LATTICE, True),
    (GramMatrix.diagonal(1, 1, 3), True),
    (m_plane(1), True),
    (m_plane(2), True),
    (GramMatrix.diagonal(1, 1, 2), False),
    (GramMatrix.diagonal(1, 1, 25), False),
    (A_LATTICE, False),
    (J_LATTICE, False),
])
def test_is_stable(g, expected):
    assert is_stable(g) is expected


def test_descend_odd_prime(named):
    chain = descend_to_stable(named['D1125'])
    assert [s.modulus for s in chain.steps] == [5]
    assert chain.steps[0].scale == 25
    assert canonical_form(chain.terminal) == I_LATTICE
    assert chain.odd_only


@pytest.mark.parametrize("name, modulus, scale", [('A', 4, 4), ('J', 2, 4)])
def test_descend_two_adic(named, name, modulus, scale):
    chain = descend_to_stable(named[name])
    assert [s.modulus for s in chain.steps] == [modulus]
    assert chain.steps[0].scale == scale
    assert canonical_form(chain.terminal) == I_LATTICE
    assert not chain.odd_only


def test_descend_stable_form_is_empty(named):
    chain = descend_to_stable(named['D113'])
    assert chain.steps == []
    assert chain.terminal == named['D113']


def test_descend_uses_primitive_part():
    chain = descend_to_stable(GramMatrix.diagonal(3, 3, 9))
    assert chain.start == GramMatrix.diagonal(1, 1, 3)
    assert chain.steps == []


def test_descent_chain_json(named):
    data = descend_to_stable(named['D1125']).to_json()
    assert data['start'] == [1, 1, 25, 0, 0, 0]
    assert data['odd_only'] is True
    assert data['steps'][0]['m'] == 5
    assert data['steps'][0]['scale'] == 25
