from fractions import Fraction

import pytest
from sympy import factorint

from agents.verifier import (TABLE_PRIMES, CheckRow, example_identity_h, family_counts, family_step,
                             k4_example_gram, k4_family_h, table_instances)
from lattice.census import ClassRecord, GenusCensus
from lattice.core import GramMatrix, A_LATTICE, J_LATTICE, k_family, parse_form
from lattice.errors import InvariantViolation
from lattice.isometry import Label
from lattice.localdata import jordan_odd
from lattice.reduction import canonical_form

# --- Test Closed Forms --- #

@pytest.mark.parametrize("p, h", [(5, 2), (7, 3)])
def test_example_identity_h(p, h):
    assert example_identity_h(p) == h


@pytest.mark.parametrize("p, h", [(5, 4), (7, 5), (11, 11), (13, 16), (17, 25), (19, 28), (23, 40)])
def test_k4_family_h(p, h):
    assert k4_family_h(p) == h


def test_k4_family_h_rejects_small_primes():
    with pytest.raises(ValueError):
        k4_family_h(3)


def test_k4_example_gram_at_seven_is_k1():
    assert canonical_form(k4_example_gram(7)) == canonical_form(k_family(1))


def test_family_counts_and_recursion():
    assert family_counts(1) == {2: 1, 4: 3, 8: 0, 16: 1}
    for n in (1, 2, 3):
        assert family_step(family_counts(n)) == family_counts(n + 1)
    with pytest.raises(ValueError):
        family_counts(0)


def test_family_counts_are_integers():
    for n in range(1, 6):
        assert all(type(v) is int for v in family_counts(n).values())

# --- Test Instances and Rows --- #

def test_table_instances_cover_every_case():
    instances = table_instances((5,))
    cases = {jordan_odd(g, p).case_id for g, p in instances}
    assert cases == set(range(1, 9))
    assert len(instances) == len(set(instances))


def test_table_instances_use_both_unit_classes():
    units = {g.a22 for g, _ in table_instances((5,)) if g.a33 == 25 and g.a22 in (1, 2)}
    assert units == {1, 2}


def test_table_instances_default_sweep():
    instances = table_instances()
    assert len(instances) >= 50
    assert {p for _, p in instances} == set(TABLE_PRIMES) == {3, 5, 7, 11}
    off_diagonal = {(p, jordan_odd(g, p).case_id) for g, p in instances if any(g.entries[3:])}
    assert off_diagonal == {(p, case) for p in TABLE_PRIMES for case in range(1, 9)}
    assert table_instances() == instances


def test_off_diagonal_instances_keep_the_class():
    instances = table_instances((5,))
    diagonal = {canonical_form(g) for g, _ in instances if not any(g.entries[3:])}
    scrambled = [g for g, _ in instances if any(g.entries[3:])]
    assert len(scrambled) == 8
    assert all(canonical_form(g) in diagonal for g in scrambled)


def test_check_row_json():
    row = CheckRow('examples', 'mass', Fraction(5, 16), {4: 1}, True)
    assert row.to_json() == {'suite': 'examples', 'case': 'mass', 'expected': "5/16",
                             'actual': {'4': 1}, 'passed': True}

# --- Test Suites --- #

def test_unknown_suite_raises(orchestrator):
    with pytest.raises(ValueError):
        orchestrator.verifier.run(['nope'])


def test_tables_suite_at_five(orchestrator, mocker):
    """Every formula row agrees with the explicit fibers at p = 5."""
    mocker.patch('agents.verifier.table_instances',
                 return_value=[(GramMatrix.diagonal(1, 1, 25), 5), (GramMatrix.diagonal(1, 5, 5), 5)])
    result = orchestrator.verifier.run(['tables'])
    failed = [row for row in result['rows'] if not row['passed']]
    assert result['total'] > 0
    assert failed == []


def test_missing_fixed_point_row_fails_the_check(orchestrator, mocker):
    mocker.patch('agents.verifier.table_instances', return_value=[(GramMatrix.diagonal(1, 1, 25), 5)])
    mocker.patch.object(orchestrator.ascent, 'gamma_sigma_count', side_effect=InvariantViolation("no row"))
    result = orchestrator.verifier.run(['tables'])
    fixed = [row for row in result['rows'] if row['case'].startswith('fixed points')]
    assert len(fixed) == 9
    assert all(row['expected'] == 'no row' and not row['passed'] for row in fixed)
    assert any(row['case'].startswith('class counts') and not row['passed'] for row in result['rows'])
    assert result['passed'] is False


def test_transport_rows_pass(orchestrator):
    rows = [orchestrator.verifier._transport_row(base.transform(((1, 0, 0), (0, 1, 0), (0, 0, 5))), 5)
            for base in (A_LATTICE, J_LATTICE)]
    assert [row.case.split(' from')[0] for row in rows] == ["counts over 5A", "counts over 5J"]
    assert all(row.passed for row in rows)


def test_chain_rows_on_the_identity_chain(orchestrator):
    rows = orchestrator.verifier._chain_rows(GramMatrix.diagonal(1, 1, 25))
    assert len(rows) == 2
    assert rows[0].case.startswith('labels lambda_5')
    assert rows[1].expected == 2
    assert all(row.passed for row in rows)


def test_chain_rows_catch_wrong_formula_labels(orchestrator, mocker):
    wrong = GenusCensus(25, [ClassRecord(Label(2)), ClassRecord(Label(2))], method='formula')
    mocker.patch.object(orchestrator.ascent, 'ascend_step', return_value=wrong)
    rows = orchestrator.verifier._chain_rows(GramMatrix.diagonal(1, 1, 25))
    assert rows[0].passed is False
    assert rows[1].passed is True


@pytest.mark.parametrize("form", ["1 1 1 0 0 0", "1 1 3 0 0 0", "1 1 5 0 0 0", "1 2 3 -1 0 0", "1 1 7 0 0 0"])
def test_stable_rows_include_every_class(orchestrator, form):
    k = parse_form(form)
    rows = orchestrator.verifier._stable_rows(k, [])
    per_class = [row for row in rows if row.case.startswith('symmetries Q=')]
    genus = orchestrator.oracle.enumerate_genus(k)
    moduli = 2 ** len([q for q in factorint(k.discriminant) if q > 2])
    assert len(per_class) == 2 * moduli * genus.class_number
    assert [row for row in rows if not row.passed] == []


@pytest.mark.slow
@pytest.mark.parametrize("suite", ['examples', 'tables', 'stable', 'appendix', 'family', 'chains'])
def test_suite_passes(orchestrator, suite):
    result = orchestrator.verifier.run([suite])
    assert [row for row in result['rows'] if not row['passed']] == []
