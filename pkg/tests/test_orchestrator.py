from fractions import Fraction

import pytest

from agents.orchestrator import OrchestratorAgent, SCHEMA_VERSION
from config import NavigatorSettings
from lattice.census import CORRECTION_LEDGER, GenusCensus
from lattice.errors import OutOfContractError, TableGapError
from lattice.watson import descend_to_stable

D1125 = "1 1 25 0 0 0"

# --- Test Class Numbers --- #

def test_classnum_formula_path(orchestrator):
    result = orchestrator.run_classnum(D1125)
    assert result['success'] is True
    assert result['schema'] == SCHEMA_VERSION
    assert result['h'] == 2
    assert result['mass'] == "5/16"
    assert [s['method'] for s in result['steps']] == ['formula', 'formula']
    assert [row['label'] for row in result['labels']] == ["<4; 2>", "<16; 1,1,2,2,25>"]
    assert result['counts_by_order'] == {'4': 1, '16': 1}


def test_classnum_oracle_path(orchestrator):
    result = orchestrator.run_classnum(D1125, force_oracle=True)
    assert result['h'] == 2
    assert result['steps'] == [{'stage': 'genus', 'method': 'oracle', 'h': 2}]


def test_classnum_scales_labels_by_content(orchestrator):
    result = orchestrator.run_classnum("3 3 9 0 0 0")
    assert result['content'] == 3
    assert result['h'] == 1
    assert result['labels'][0]['label'] == "<16; 3,3,6,6,9>"


def test_classnum_stable_input_has_no_ascent(orchestrator):
    result = orchestrator.run_classnum("1 1 3 0 0 0")
    assert result['h'] == 1
    assert len(result['steps']) == 1
    assert result['descent']['steps'] == []


def test_classnum_invalid_input(orchestrator):
    result = orchestrator.run_classnum("1 1 1 1 1 1")
    assert result['success'] is False
    assert result['error'] == 'Invalid Input'


def test_classnum_bound_exceeded():
    agent = OrchestratorAgent(NavigatorSettings(max_disc=10))
    result = agent.run_classnum(D1125, force_oracle=True)
    assert result['success'] is False
    assert result['error'] == 'Bound Exceeded'

# --- Test Fallback --- #

def test_ascent_falls_back_to_constructive(orchestrator, mocker):
    mocker.patch.object(orchestrator.ascent, 'ascend_step', side_effect=TableGapError("no row"))
    result = orchestrator.run_classnum(D1125)
    assert result['success'] is True
    assert result['h'] == 2
    assert result['steps'][-1]['method'] == 'constructive'
    assert any('no row' in note for note in result['notes'])


def test_stable_falls_back_to_oracle(orchestrator, mocker):
    mocker.patch.object(orchestrator.stable, 'census', side_effect=TableGapError("gap"))
    result = orchestrator.run_classnum("1 1 3 0 0 0")
    assert result['h'] == 1
    assert result['steps'][0]['method'] == 'oracle'
    assert CORRECTION_LEDGER['table_gap'] in result['notes']


def test_constructive_fallback_checks_mass(orchestrator, mocker):
    mocker.patch.object(orchestrator.ascent, 'ascend_step', side_effect=TableGapError("no row"))
    mocker.patch.object(orchestrator.oracle, 'mass_check', return_value=False)
    result = orchestrator.run_classnum(D1125)
    assert result['success'] is False
    assert result['error'] == 'Invariant Violation'


def test_stable_fallback_checks_mass(orchestrator, mocker):
    mocker.patch.object(orchestrator.stable, 'census', side_effect=TableGapError("gap"))
    mocker.patch.object(orchestrator.oracle, 'enumerate_genus', return_value=GenusCensus(3, []))
    result = orchestrator.run_classnum("1 1 3 0 0 0")
    assert result['success'] is False
    assert result['error'] == 'Invariant Violation'
    assert "1/16" in result['details']


def test_oracle_path_checks_mass(orchestrator, mocker):
    mocker.patch.object(orchestrator.ascent, 'table1_w', return_value=Fraction(14))
    result = orchestrator.run_classnum(D1125, force_oracle=True)
    assert result['error'] == 'Invariant Violation'


def test_expected_mass(orchestrator, named):
    assert orchestrator.expected_mass(descend_to_stable(named['D1125'])) == Fraction(5, 16)
    assert orchestrator.expected_mass(descend_to_stable(named['D113'])) == Fraction(1, 16)


def test_expected_mass_outside_tables(orchestrator, named, mocker):
    mocker.patch.object(orchestrator.ascent, 'table1_w', side_effect=OutOfContractError("no row"))
    assert orchestrator.expected_mass(descend_to_stable(named['D1125'])) is None
    assert orchestrator.run_classnum(D1125, force_oracle=True)['h'] == 2


def test_force_formula_reports_failure(orchestrator, mocker):
    mocker.patch.object(orchestrator.ascent, 'ascend_step', side_effect=TableGapError("no row"))
    result = orchestrator.run_classnum(D1125, force_formula=True)
    assert result['success'] is False
    assert result['error'] == 'Invariant Violation'


def test_unexpected_error_is_internal(orchestrator, mocker):
    mocker.patch('agents.orchestrator.descend_to_stable', side_effect=RuntimeError("boom"))
    result = orchestrator.run_classnum(D1125)
    assert result == {'schema': SCHEMA_VERSION, 'success': False, 'error': 'Internal Error', 'details': 'boom'}

# --- Test Other Operations --- #

def test_genus(orchestrator):
    result = orchestrator.run_genus(D1125)
    assert result['success'] is True
    assert result['class_number'] == 2
    assert result['method'] == 'oracle'


def test_descend(orchestrator):
    result = orchestrator.run_descend(D1125)
    assert result['terminal'] == [1, 1, 1, 0, 0, 0]
    assert [s['m'] for s in result['steps']] == [5]


def test_label(orchestrator):
    result = orchestrator.run_label("1 1 3 0 0 0")
    assert result['label'] == "<16; 1,1,2,2,3>"
    assert result['order'] == 16
    assert len(result['symmetries']) == 5
    assert sorted(len(c) for c in result['classes']) == [1, 2, 2]
    assert result['named'] is None
    assert sorted(sorted(system) for system in result['orthogonal_systems']) == [[1, 1, 3], [2, 2, 3]]
    assert result['successive_minima'] == [1, 1, 3]


def test_label_of_named_lattice(orchestrator):
    result = orchestrator.run_label("1 1 1 0 0 0")
    assert result['order'] == 48
    assert result['named'] == 'I'


def test_fiber(orchestrator):
    result = orchestrator.run_fiber(D1125, 5)
    assert result['size'] == 15
    assert result['scale'] == 25
    assert result['lower'] == [1, 1, 1, 0, 0, 0]
    assert result['counts_by_order'] == {'4': 1, '16': 1}
    assert result['formula']['h'] == {'4': 1, '16': 1}
    assert result['formula']['w'] == "15/1"
    assert result['orbit_sizes'] == [3, 12]


def test_stable(orchestrator):
    result = orchestrator.run_stable("1 1 3 0 0 0")
    assert result['P'] == [3] and result['Q'] == []
    assert result['nu'] == 1
    assert result['mass'] == "1/16"
    assert result['h'] == 1
    assert result['b']['16'] == 1
    assert [(t['m'], t['delta']) for t in result['terms']] == [(1, 1), (1, 2), (3, 1)]


@pytest.mark.parametrize("form", [D1125, "2 2 6 0 0 0"])
def test_stable_rejects_unstable(orchestrator, form):
    result = orchestrator.run_stable(form)
    assert result['error'] == 'Invalid Input'


def test_verify_unknown_suite(orchestrator):
    result = orchestrator.run_verify(['nope'])
    assert result['success'] is False
    assert result['error'] == 'Internal Error'


@pytest.mark.slow
def test_verify_examples(orchestrator):
    result = orchestrator.run_verify(['examples'])
    assert result['success'] is True
    assert result['passed'], [row for row in result['rows'] if not row['passed']]
