"""
Pruebas de los formatos de archivo y de la interfaz de línea de comandos
"""

import io
import json
import math
import os

import numpy as np
import pytest

from adlab.asymptotics import SupportCase
from adlab.codec import StateFile, load_state, parse_report, render_report, save_state, to_jsonable
from adlab.config import Config
from adlab.divergences import DivergenceValue
from adlab.errors import DomainError, StateFileError
from adlab.main import DATA_DIR, EXIT_DOMAIN, EXIT_OK, run
from adlab.testkit import random_state


@pytest.fixture(autouse=True)
def events_in_tmp(tmp_path, monkeypatch):
    monkeypatch.setitem(Config.SYSTEM, 'events_file', str(tmp_path / 'events.log'))


def _cli(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def _write(tmp_path, name: str, payload) -> str:
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(path)


# ---------------------------------------------------------------------------
# StateFile
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('name', ['zero', 'one', 'pi2', 'pi4'])
def test_bundled_states_are_canonical(name):
    with open(os.path.join(DATA_DIR, f'{name}.json')) as f:
        text = f.read()
    state_file = StateFile.loads(text)
    assert state_file.label == name
    assert state_file.dim == 2
    assert state_file.dumps() == text


def test_save_and_load(tmp_path):
    rho = random_state(3, seed=1)
    path = str(tmp_path / 'states' / 'rho.json')
    save_state(path, rho, label='rho')
    loaded = StateFile.load(path)
    assert loaded.label == 'rho'
    assert np.allclose(loaded.state.matrix, rho.matrix, atol=1e-15)
    assert np.allclose(load_state(path).matrix, rho.matrix, atol=1e-15)


@pytest.mark.parametrize('payload,invariant', [
    ('{not json', 'format'),
    ([1, 2, 3], 'format'),
    ({'dim': True, 'entries': []}, 'dim'),
    ({'dim': 2, 'entries': [[1.0, 0.0]]}, 'dim'),
    ({'dim': 1, 'entries': [['a', 0.0]]}, 'format'),
    ({'dim': 2, 'entries': [[0.5, 0.0], [0.3, 0.0], [0.0, 0.0], [0.5, 0.0]]}, 'hermiticity'),
    ({'dim': 2, 'entries': [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}, 'trace'),
    ({'dim': 2, 'entries': [[1.5, 0.0], [0.0, 0.0], [0.0, 0.0], [-0.5, 0.0]]}, 'psd'),
])
def test_corrupted_state_files(tmp_path, payload, invariant):
    path = _write(tmp_path, 'bad.json', payload)
    with pytest.raises(StateFileError) as info:
        StateFile.load(path)
    assert info.value.invariant == invariant


def test_missing_state_file(tmp_path):
    with pytest.raises(StateFileError) as info:
        StateFile.load(str(tmp_path / 'missing.json'))
    assert info.value.invariant == 'format'


# ---------------------------------------------------------------------------
# Reportes
# ---------------------------------------------------------------------------

def test_to_jsonable_tokens():
    assert to_jsonable(math.inf) == 'inf'
    assert to_jsonable(-math.inf) == '-inf'
    assert to_jsonable(DivergenceValue.inf()) == 'inf'
    assert to_jsonable(DivergenceValue.of(0.5)) == 0.5
    assert to_jsonable(np.float64(-0.0)) == 0.0
    assert to_jsonable(SupportCase.SOURCE_VIOLATED) == 'source_violated'
    assert to_jsonable({'a': (np.int64(2), True)}) == {'a': [2, True]}


def test_render_and_parse_report():
    text = render_report({'value': math.inf, 'status': 'optimal'}, {'extra': [1.0]}, seed=9)
    lines = text.splitlines()
    assert lines[0] == f"version={Config.SYSTEM['version']}"
    assert lines[1] == 'seed=9'
    assert lines[2] == 'value=inf'
    parsed = parse_report(text)
    assert parsed['fields']['status'] == 'optimal'
    assert parsed['block']['fields']['value'] == 'inf'
    assert parsed['block']['extra'] == [1.0]
    assert parsed['block']['tolerances']['solver.gap_tol'] == Config.SOLVER['gap_tol']
    assert text == render_report({'value': math.inf, 'status': 'optimal'}, {'extra': [1.0]}, seed=9)


def test_parse_report_requires_separator():
    with pytest.raises(DomainError):
        parse_report('value=1.0\n')


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_compute_dmin():
    code, text = _cli('compute', 'dmin', '--rho', 'zero', '--sigma', 'pi2')
    assert code == EXIT_OK
    fields = parse_report(text)['fields']
    assert fields['quantity'] == 'dmin'
    assert float(fields['value']) == pytest.approx(1.0, abs=1e-12)


def test_cli_compute_relative_entropy_of_equal_states():
    code, text = _cli('compute', 'rel', '--rho', 'pi2', '--sigma', 'pi2')
    assert code == EXIT_OK
    assert float(parse_report(text)['fields']['value']) == pytest.approx(0.0, abs=1e-12)


def test_cli_compute_infinite_value():
    code, text = _cli('compute', 'dmax', '--rho', 'zero', '--sigma', 'one')
    assert code == EXIT_OK
    assert parse_report(text)['fields']['value'] == 'inf'


def test_cli_box_error():
    code, text = _cli('compute', 'box-error', '--rho', 'zero', '--sigma', 'pi2', '--tau', 'zero', '--omega', 'pi4')
    assert code == EXIT_OK
    fields = parse_report(text)['fields']
    assert float(fields['value']) == pytest.approx(0.5, abs=1e-6)
    assert fields['status'] == 'optimal'


def test_cli_smooth_dmin_with_state_paths():
    rho = os.path.join(DATA_DIR, 'zero.json')
    sigma = os.path.join(DATA_DIR, 'pi4.json')
    code, text = _cli('compute', 'smooth-dmin', '--rho', rho, '--sigma', sigma, '--eps', '0.5')
    assert code == EXIT_OK
    assert float(parse_report(text)['fields']['value']) == pytest.approx(3.0, abs=1e-5)


def test_cli_domain_errors(tmp_path):
    bad = _write(tmp_path, 'bad.json', {'dim': 2, 'entries': [[1.0, 0.0]]})
    assert _cli('compute', 'dmin', '--rho', bad, '--sigma', 'pi2')[0] == EXIT_DOMAIN
    assert _cli('compute', 'petz', '--rho', 'zero', '--sigma', 'pi2')[0] == EXIT_DOMAIN
    assert _cli('compute', 'petz', '--rho', 'zero', '--sigma', 'pi2', '--alpha', '1')[0] == EXIT_DOMAIN
    assert _cli('compute', 'smooth-dmin', '--rho', 'zero', '--sigma', 'pi2', '--eps', '1.5')[0] == EXIT_DOMAIN
    assert _cli('compute', 'telepathy', '--rho', 'zero', '--sigma', 'pi2')[0] == EXIT_DOMAIN
    assert _cli('compute', 'dmin', '--rho', 'zero', '--sigma', str(tmp_path / 'nowhere.json'))[0] == EXIT_DOMAIN


def test_cli_rate():
    code, text = _cli('rate', '--source-rho', 'zero', '--source-sigma', 'pi2',
                      '--target-rho', 'zero', '--target-sigma', 'pi4', '--n', '10', '--eps', '0.1')
    assert code == EXIT_OK
    fields = parse_report(text)['fields']
    assert float(fields['rate']) == pytest.approx(0.5)
    assert fields['marker'] == 'finite'
    assert float(fields['second_order_distill']) == pytest.approx(10.0, abs=1e-9)


def test_cli_rate_infinite():
    code, text = _cli('rate', '--source-rho', 'zero', '--source-sigma', 'one',
                      '--target-rho', 'zero', '--target-sigma', 'pi2')
    assert code == EXIT_OK
    fields = parse_report(text)['fields']
    assert fields['rate'] == 'inf'
    assert fields['marker'] == 'infinite'
    assert fields['support_case'] == 'source_violated'


def test_cli_battery_is_deterministic(tmp_path):
    out = str(tmp_path / 'reports' / 'pc.txt')
    code, text = _cli('battery', 'pseudo-continuity', '--seed', '42', '--count', '2', '--out', out)
    assert code == EXIT_OK
    with open(out) as f:
        assert f.read() == text
    again = _cli('battery', 'pseudo-continuity', '--seed', '42', '--count', '2', '--workers', '2')[1]
    assert again == text
    fields = parse_report(text)['fields']
    assert fields['seed'] == '42'
    assert fields['status'] == 'pass'


def test_cli_battery_bridge():
    code, text = _cli('battery', 'bridge', '--seed', '42', '--count', '1')
    assert code == EXIT_OK
    report = parse_report(text)
    assert report['fields']['violations'] == '0'
    assert 'bridge_a' in report['block']['families']


def test_cli_help_exits_cleanly(capsys):
    assert run(['--help']) == EXIT_OK
    assert 'adlab' in capsys.readouterr().out
