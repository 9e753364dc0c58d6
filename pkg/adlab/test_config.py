"""
Pruebas de la configuración centralizada y de las utilidades del sistema
"""

import json

import pytest

from adlab.config import Config
from adlab.utils import get_system_metrics, log_system_event


@pytest.fixture
def restore_config():
    saved = {name: dict(getattr(Config, name)) for name in ('TOLERANCES', 'SOLVER', 'BISECTION', 'BATTERY', 'SYSTEM')}
    yield
    for name, values in saved.items():
        getattr(Config, name).clear()
        getattr(Config, name).update(values)


def test_default_tolerances():
    assert Config.TOLERANCES['psd_tol'] == 1e-10
    assert Config.TOLERANCES['choi_tp_tol'] == 1e-9
    assert Config.SOLVER['gap_tol'] <= 1e-7
    assert Config.BISECTION['resolution'] == 1e-4
    assert Config.BATTERY['margin_tol'] == 1e-7


def test_default_config_is_valid():
    result = Config.validate_config()
    assert result['valid'], result['errors']


def test_getters_return_copies():
    solver = Config.get_solver_config()
    solver['gap_tol'] = 1.0
    assert Config.SOLVER['gap_tol'] != 1.0
    assert set(Config.get_all_config()) == {'tolerances', 'solver', 'bisection', 'battery', 'system'}


def test_update_config(restore_config):
    assert Config.update_config('solver', 'gap_tol', 1e-6)
    assert Config.SOLVER['gap_tol'] == 1e-6
    assert not Config.update_config('solver', 'no_such_key', 1)
    assert not Config.update_config('nowhere', 'gap_tol', 1)


def test_invalid_config_is_reported(restore_config):
    Config.update_config('solver', 'backend', 'mosek')
    Config.update_config('bisection', 'lo', 100)
    result = Config.validate_config()
    assert not result['valid']
    assert len(result['errors']) == 2


def test_load_from_env(restore_config, monkeypatch):
    monkeypatch.setenv('ADLAB_GAP_TOL', '1e-6')
    monkeypatch.setenv('ADLAB_SOLVER', ' CVXPY ')
    monkeypatch.setenv('ADLAB_WORKERS', '3')
    monkeypatch.setenv('ADLAB_LOG_LEVEL', 'debug')
    monkeypatch.setenv('ADLAB_EVENTS_FILE', '')
    Config.load_from_env()
    assert Config.SOLVER['gap_tol'] == 1e-6
    assert Config.SOLVER['backend'] == 'cvxpy'
    assert Config.BATTERY['workers'] == 3
    assert Config.SYSTEM['log_level'] == 'DEBUG'
    assert Config.SYSTEM['events_file'] == ''


def test_report_tolerances_cover_all_sections():
    report = Config.get_report_tolerances()
    assert report['solver.gap_tol'] == Config.SOLVER['gap_tol']
    assert all(f'tol.{k}' in report for k in Config.TOLERANCES)
    assert list(report)[:len(Config.TOLERANCES)] == sorted(f'tol.{k}' for k in Config.TOLERANCES)


def test_log_system_event_appends_json_lines(tmp_path, monkeypatch):
    path = tmp_path / 'logs' / 'events.log'
    monkeypatch.setitem(Config.SYSTEM, 'events_file', str(path))
    log_system_event('WARNING', 'violación', {'margin': -1.0})
    log_system_event('INFO', 'fin')
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert first['type'] == 'WARNING'
    assert first['details'] == {'margin': -1.0}
    assert json.loads(lines[1])['details'] == {}


def test_log_system_event_disabled(tmp_path, monkeypatch):
    monkeypatch.setitem(Config.SYSTEM, 'events_file', '')
    log_system_event('INFO', 'sin archivo')
    assert list(tmp_path.iterdir()) == []


def test_system_metrics():
    metrics = get_system_metrics()
    assert metrics['cpu_count'] >= 1
    assert 0 <= metrics['memory_percent'] <= 100
