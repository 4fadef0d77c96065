import json

from agents.orchestrator import OrchestratorAgent
from cli import cli

OK_RESULT = {'schema': 1, 'success': True, 'h': 2, 'mass': "5/16",
             'labels': [{'label': "<4; 2>", 'order': 4, 'q_values': [2], 'count': 1}]}

# --- Test classnum --- #

def test_classnum_json(runner, mocker):
    """The FORM words are joined and the orchestrator result is printed as JSON."""
    run = mocker.patch.object(OrchestratorAgent, 'run_classnum', return_value=OK_RESULT)
    result = runner.invoke(cli, ['classnum', '2', '2', '295', '-1', '-1', '0', '--json'])
    assert result.exit_code == 0
    assert json.loads(result.output) == OK_RESULT
    run.assert_called_once_with("2 2 295 -1 -1 0")


def test_classnum_markdown(runner, mocker):
    mocker.patch.object(OrchestratorAgent, 'run_classnum', return_value=OK_RESULT)
    result = runner.invoke(cli, ['classnum', '1', '1', '25', '0', '0', '0', '--format', 'markdown'])
    assert result.exit_code == 0
    assert result.output.startswith("# Class number")
    assert "- **H**: 2" in result.output


def test_classnum_html(runner, mocker):
    mocker.patch.object(OrchestratorAgent, 'run_classnum', return_value=OK_RESULT)
    result = runner.invoke(cli, ['classnum', '1 1 25 0 0 0', '--format', 'html'])
    assert result.exit_code == 0
    assert "<h1>Class number</h1>" in result.output


def test_classnum_real_pipeline(runner):
    result = runner.invoke(cli, ['classnum', '1', '1', '25', '0', '0', '0', '--json'])
    assert result.exit_code == 0
    assert json.loads(result.output)['h'] == 2

# --- Test Exit Codes --- #

def test_invalid_input_exits_one(runner, mocker):
    """Input errors, bound and contract failures exit with status 1."""
    mocker.patch.object(OrchestratorAgent, 'run_classnum', return_value={
        'schema': 1, 'success': False, 'error': 'Invalid Input', 'details': 'bad'})
    result = runner.invoke(cli, ['classnum', '1', '1', '1', '1', '1', '1', '--json'])
    assert result.exit_code == 1
    assert json.loads(result.output)['error'] == 'Invalid Input'


def test_invariant_violation_exits_two(runner, mocker):
    mocker.patch.object(OrchestratorAgent, 'run_classnum', return_value={
        'schema': 1, 'success': False, 'error': 'Invariant Violation', 'details': 'mass'})
    result = runner.invoke(cli, ['classnum', '1', '1', '25', '0', '0', '0', '--json'])
    assert result.exit_code == 2


def test_usage_error_exits_one(runner):
    result = runner.invoke(cli, ['classnum', '1', '1', '3', '0', '0', '0', '--force-oracle', '--force-formula'])
    assert result.exit_code == 1


def test_missing_config_exits_one(runner, tmp_path):
    result = runner.invoke(cli, ['label', '1', '1', '3', '0', '0', '0', '--config', str(tmp_path / 'missing.env')])
    assert result.exit_code == 1


def test_unknown_command_exits_one(runner):
    assert runner.invoke(cli, ['frobnicate']).exit_code == 1

# --- Test Other Commands --- #

def test_label_command(runner):
    result = runner.invoke(cli, ['label', '1', '1', '3', '0', '0', '0', '--json'])
    assert result.exit_code == 0
    assert json.loads(result.output)['label'] == "<16; 1,1,2,2,3>"


def test_descend_command(runner):
    result = runner.invoke(cli, ['descend', '[[1,0,0],[0,1,0],[0,0,25]]', '--json'])
    assert result.exit_code == 0
    assert [s['m'] for s in json.loads(result.output)['steps']] == [5]


def test_fiber_command_passes_modulus(runner, mocker):
    run = mocker.patch.object(OrchestratorAgent, 'run_fiber', return_value={'schema': 1, 'success': True})
    result = runner.invoke(cli, ['fiber', '-m', '5', '1', '1', '25', '0', '0', '0', '--json'])
    assert result.exit_code == 0
    run.assert_called_once_with("1 1 25 0 0 0", 5)


def test_fiber_command_rejects_small_modulus(runner):
    assert runner.invoke(cli, ['fiber', '-m', '1', '1', '1', '1', '0', '0', '0']).exit_code == 1


def test_genus_bound_flag(runner):
    """--bound lowers the oracle limit for this run only."""
    result = runner.invoke(cli, ['genus', '1', '1', '25', '0', '0', '0', '--bound', '10', '--json'])
    assert result.exit_code == 1
    assert json.loads(result.output)['error'] == 'Bound Exceeded'


def test_stable_command(runner):
    result = runner.invoke(cli, ['stable', '1', '1', '3', '0', '0', '0', '--json'])
    assert result.exit_code == 0
    assert json.loads(result.output)['mass'] == "1/16"

# --- Test verify --- #

def test_verify_all_passes_every_suite(runner, mocker):
    run = mocker.patch.object(OrchestratorAgent, 'run_verify', return_value={
        'schema': 1, 'success': True, 'passed': True, 'total': 3, 'failed': 0, 'rows': []})
    result = runner.invoke(cli, ['verify', 'all', '--json'])
    assert result.exit_code == 0
    run.assert_called_once_with(['examples', 'tables', 'stable', 'appendix', 'family', 'chains'])


def test_verify_defaults_to_configured_suites(runner, mocker):
    run = mocker.patch.object(OrchestratorAgent, 'run_verify', return_value={
        'schema': 1, 'success': True, 'passed': True, 'rows': []})
    runner.invoke(cli, ['verify', '--json'])
    run.assert_called_once_with(None)


def test_verify_failure_exits_two(runner, mocker):
    mocker.patch.object(OrchestratorAgent, 'run_verify', return_value={
        'schema': 1, 'success': True, 'passed': False, 'total': 1, 'failed': 1, 'rows': []})
    result = runner.invoke(cli, ['verify', 'examples', '--json'])
    assert result.exit_code == 2


def test_verify_rejects_unknown_suite(runner):
    assert runner.invoke(cli, ['verify', 'nope']).exit_code == 1
