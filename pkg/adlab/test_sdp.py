"""
Pruebas del solver cónico y de las familias de programas semidefinidos
"""

import math

import numpy as np
import pytest

from adlab import conic, sdp
from adlab.battery import run_battery
from adlab.conic import ConicProgram, hermitian_basis, realify, realify_functional, derealify, scalar
from adlab.divergences import d_max, d_min, fidelity, trace_distance
from adlab.errors import DomainError, NumericalFailure
from adlab.linalg import Box, State, apply, basis_state, pi_state, tensor_power
from adlab.protocols import BitsBox
from adlab.sdp import SmoothingBall
from adlab.testkit import (
    classical_box_error_exact, classical_dmin_eps_exact, classical_smooth_dmax_grid, random_box,
    random_channel, random_classical_box, random_state
)

GAP_TOL = 1e-7


# ---------------------------------------------------------------------------
# Capa cónica
# ---------------------------------------------------------------------------

def test_realify_roundtrip_and_functional():
    X = random_state(3, seed=1).matrix
    F = random_state(3, seed=2).matrix - random_state(3, seed=3).matrix
    assert np.allclose(derealify(realify(X)), X)
    assert np.sum(realify_functional(F) * realify(X)) == pytest.approx(np.real(np.trace(F @ X)))
    assert np.min(np.linalg.eigvalsh(realify(X))) >= -1e-12


def test_hermitian_basis_is_orthonormal():
    basis = hermitian_basis(3)
    gram = np.einsum('iab,jba->ij', basis, basis)
    assert basis.shape == (9, 3, 3)
    assert np.allclose(gram, np.eye(9))


def test_scalar_program():
    p = ConicProgram('toy', sense='min')
    x = p.nonneg('x')
    p.add_inequality(scalar(x), '>=', 2.0, 'x>=2')
    p.set_objective(scalar(x))
    res = conic.solve(p)
    assert res.optimal
    assert res.primal_value == pytest.approx(2.0, abs=1e-7)
    assert res.gap <= GAP_TOL


def test_inconsistent_equalities_are_infeasible():
    p = ConicProgram('inconsistent', sense='min')
    x = p.nonneg('x')
    p.add_equality(scalar(x), 1.0, 'x=1')
    p.add_equality(scalar(x), 2.0, 'x=2')
    p.set_objective(scalar(x))
    assert conic.solve(p).status == 'infeasible'


def test_unknown_sense_rejected():
    with pytest.raises(DomainError):
        ConicProgram('bad', sense='maximize')


def test_dump_program_lists_constraints():
    text = sdp.dump_program(sdp.trace_distance_program(basis_state(0, 2), pi_state(2)))
    assert text.startswith('# adlab conic program: trace_distance')
    lines = text.splitlines()
    assert lines[1] == 'sense max'
    assert any(line.startswith('constraints ') for line in lines)
    assert any(' rhs ' in line for line in lines)


# ---------------------------------------------------------------------------
# Distancia de traza
# ---------------------------------------------------------------------------

def test_trace_distance_sdp_matches_eigenvalues():
    for seed in range(5):
        rho, sigma = random_state(3, seed=10 + seed), random_state(3, seed=20 + seed)
        result = sdp.trace_distance_sdp(rho, sigma)
        assert result.status == 'optimal'
        assert result.gap <= GAP_TOL
        assert result.value == pytest.approx(trace_distance(rho, sigma), abs=1e-8)


def test_trace_distance_dual_agrees():
    rho, sigma = random_state(2, seed=30), random_state(2, seed=31)
    primal = conic.solve(sdp.trace_distance_program(rho, sigma))
    dual = conic.solve(sdp.trace_distance_dual_program(rho, sigma))
    assert primal.primal_value == pytest.approx(dual.primal_value, abs=1e-7)


# ---------------------------------------------------------------------------
# D_min^ε
# ---------------------------------------------------------------------------

def test_smooth_dmin_bit_anchor():
    result = sdp.smooth_dmin(basis_state(0, 2), pi_state(4), 0.5)
    assert float(result.value) == pytest.approx(3.0, abs=1e-5)
    assert result.gap <= GAP_TOL


def test_smooth_dmin_zero_eps_is_dmin():
    rho, sigma = random_state(3, 2, seed=40), random_state(3, seed=41)
    assert float(sdp.smooth_dmin(rho, sigma, 0.0).value) == pytest.approx(float(d_min(rho, sigma)), abs=1e-12)


def test_smooth_dmin_monotone_and_limit():
    rho, sigma = random_state(2, seed=42), random_state(2, seed=43)
    values = [float(sdp.smooth_dmin(rho, sigma, eps).value) for eps in (1e-4, 0.05, 0.1, 0.3)]
    assert all(a <= b + 1e-7 for a, b in zip(values, values[1:]))
    assert values[0] >= float(d_min(rho, sigma)) - 1e-9


def test_smooth_dmin_matches_classical_oracle():
    p, q = (0.9, 0.1), (0.5, 0.5)
    for n in (1, 2, 3):
        rho = tensor_power(State(np.diag(p)), n)
        sigma = tensor_power(State(np.diag(q)), n)
        value = float(sdp.smooth_dmin(rho, sigma, 0.05).value)
        assert value == pytest.approx(classical_dmin_eps_exact(p, q, 0.05, n), abs=1e-5)


def test_smooth_dmin_dual_value():
    rho, sigma = random_state(3, seed=44), random_state(3, seed=45)
    primal = conic.solve(sdp.smooth_dmin_program(rho, sigma, 0.2))
    dual = conic.solve(sdp.smooth_dmin_dual_program(rho, sigma, 0.2))
    assert primal.optimal and dual.optimal
    assert primal.primal_value == pytest.approx(dual.primal_value, abs=1e-6)


def test_smooth_dmin_orthogonal_is_infinite():
    assert sdp.smooth_dmin(basis_state(0, 2), basis_state(1, 2), 0.2).value.infinite


def test_smooth_dmin_rejects_eps_one():
    with pytest.raises(DomainError):
        sdp.smooth_dmin(basis_state(0, 2), pi_state(2), 1.0)


# ---------------------------------------------------------------------------
# D_max^ε
# ---------------------------------------------------------------------------

def test_smoothing_ball_validation():
    assert SmoothingBall('fid', 0.1).metric == 'infidelity'
    assert SmoothingBall('trace', 0.1).metric == 'trace_distance'
    with pytest.raises(DomainError):
        SmoothingBall('trace', 1.0)
    with pytest.raises(DomainError):
        SmoothingBall('hellinger', 0.1)


def test_smooth_dmax_zero_eps_is_dmax():
    rho, sigma = random_state(3, seed=50), random_state(3, seed=51)
    assert float(sdp.smooth_dmax(rho, sigma, 0.0).value) == pytest.approx(float(d_max(rho, sigma)), abs=1e-12)


def test_smooth_dmax_classical_grid():
    p, q = (0.9, 0.1), (0.5, 0.5)
    rho, sigma = State(np.diag(p)), State(np.diag(q))
    for eps in (0.05, 0.1, 0.2):
        value = float(sdp.smooth_dmax(rho, sigma, eps).value)
        assert value == pytest.approx(classical_smooth_dmax_grid(p, q, eps), abs=1e-6)


def test_smooth_dmax_monotone_and_witness():
    rho, sigma = random_state(3, seed=52), random_state(3, seed=53)
    previous = float(d_max(rho, sigma))
    for eps in (0.01, 0.05, 0.1, 0.2):
        result = sdp.smooth_dmax(rho, sigma, eps)
        value = float(result.value)
        assert value <= previous + 1e-7
        assert result.gap <= GAP_TOL
        assert trace_distance(result.smoothed_state, rho) <= eps + 1e-6
        assert float(d_max(result.smoothed_state, sigma)) <= value + 1e-5
        previous = value


def test_smooth_dmax_infidelity_ball():
    rho, sigma = random_state(2, seed=54), random_state(2, seed=55)
    result = sdp.smooth_dmax(rho, sigma, SmoothingBall('infidelity', 0.1))
    assert result.status == 'optimal'
    assert float(result.value) <= float(d_max(rho, sigma)) + 1e-7
    assert 1.0 - fidelity(result.smoothed_state, rho) <= 0.1 + 1e-6
    assert float(d_max(result.smoothed_state, sigma)) <= float(result.value) + 1e-5


def test_smooth_dmax_support_obstruction():
    zero, one = basis_state(0, 2), basis_state(1, 2)
    assert sdp.smooth_dmax(zero, one, 0.2).value.infinite
    assert sdp.smooth_dmax(zero, one, SmoothingBall('fid', 0.5)).value.infinite


def test_smooth_dmax_partial_support():
    rho = State(np.diag([0.9, 0.1, 0.0]))
    sigma = State(np.diag([0.5, 0.0, 0.5]))
    assert sdp.smooth_dmax(rho, sigma, 0.05).value.infinite
    assert sdp.smooth_dmax(rho, sigma, 0.2).value.is_finite


def test_smooth_dmax_dual_value():
    rho, sigma = random_state(2, seed=56), random_state(2, seed=57)
    primal = conic.solve(sdp.smooth_dmax_program(rho, sigma, 0.1))
    dual = conic.solve(sdp.smooth_dmax_dual_program(rho, sigma, 0.1))
    assert primal.optimal
    if dual.optimal:
        assert primal.primal_value == pytest.approx(dual.primal_value, abs=1e-6)


# ---------------------------------------------------------------------------
# Transformación de cajas
# ---------------------------------------------------------------------------

def test_bits_transformation_error():
    result = sdp.box_transform_error(BitsBox(1).box(), BitsBox(2).box())
    assert result.error == pytest.approx(0.5, abs=1e-6)
    assert result.gap <= GAP_TOL
    assert not sdp.exact_transform_feasible(BitsBox(1).box(), BitsBox(2).box())
    assert sdp.exact_transform_feasible(BitsBox(2).box(), BitsBox(1).box())


def test_identity_transformation_is_free():
    box = random_box(2, seed=60)
    assert sdp.box_transform_error(box, box).error == pytest.approx(0.0, abs=1e-6)


def test_trivial_target_uses_replacer():
    source = random_box(3, seed=61)
    tau = random_state(2, seed=62)
    result = sdp.box_transform_error(source, Box(tau, tau))
    assert result.error == 0.0
    assert result.channel.dim_in == 3 and result.channel.dim_out == 2


def test_box_error_matches_classical_oracle():
    for seed in range(5):
        source = random_classical_box(2, seed=70 + seed)
        target = random_classical_box(2, seed=80 + seed)
        result = sdp.box_transform_error(source, target)
        assert result.error == pytest.approx(classical_box_error_exact(source, target), abs=1e-6)


def test_box_transform_dual_value():
    source, target = random_box(2, seed=90), random_box(2, seed=91)
    primal = conic.solve(sdp.box_transform_program(source, target))
    dual = conic.solve(sdp.box_transform_dual_program(source, target))
    assert primal.optimal and dual.optimal
    assert primal.primal_value == pytest.approx(dual.primal_value, abs=1e-6)


# ---------------------------------------------------------------------------
# Cantidades operacionales
# ---------------------------------------------------------------------------

def test_operational_equalities():
    box = random_box(2, seed=100)
    rho, sigma = box
    assert sdp.distillable_exact(box) == pytest.approx(float(d_min(rho, sigma)), abs=1e-3)
    assert sdp.cost_exact(box) == pytest.approx(float(d_max(rho, sigma)), abs=1e-3)
    assert sdp.cost_approx(box, 0.1) == pytest.approx(float(sdp.smooth_dmax(rho, sigma, 0.1).value), abs=1e-3)
    assert sdp.distillable_approx(box, 0.1) == pytest.approx(float(sdp.smooth_dmin(rho, sigma, 0.1).value),
                                                           abs=1e-3)


def test_operational_trivial_cases():
    rho = random_state(2, seed=101)
    assert sdp.cost_exact(Box(rho, rho)) == 0.0
    assert sdp.cost_approx(Box(rho, pi_state(2)), 0.99) == 0.0
    assert math.isinf(sdp.distillable_exact(Box(basis_state(0, 2), basis_state(1, 2))))
    assert math.isinf(sdp.cost_exact(Box(basis_state(0, 2), basis_state(1, 2))))


def test_cost_exact_on_stalling_instance():
    # el IPM se detiene con Z singular a brecha ~6e-7 en una de las evaluaciones
    box = random_box(2, seed=1004)
    rho, sigma = box
    assert sdp.cost_exact(box) == pytest.approx(float(d_max(rho, sigma)), abs=1e-3)


# ---------------------------------------------------------------------------
# Decisión de factibilidad sin certificado
# ---------------------------------------------------------------------------

def _uncertified(primal, dual, status='numerical_failure'):
    def fake_solve(program):
        return conic.SolveResult(status, primal, dual, abs(primal - dual))
    return fake_solve


@pytest.mark.parametrize('primal, dual, expected', [
    (2e-7, -3e-7, True),
    (0.31, 0.30, False),
    (1.2e-6, 0.9e-6, False),
    (0.9e-6, 0.6e-6, True),
])
def test_transform_within_decides_from_interval(monkeypatch, primal, dual, expected):
    monkeypatch.setattr(sdp, '_solve', _uncertified(primal, dual))
    assert sdp.transform_within(BitsBox(2).box(), BitsBox(1).box(), 1e-6) is expected


def test_transform_within_raises_on_wide_window(monkeypatch):
    monkeypatch.setattr(sdp, '_solve', _uncertified(0.5, 1e-7))
    with pytest.raises(NumericalFailure):
        sdp.transform_within(BitsBox(2).box(), BitsBox(1).box(), 1e-6)
    monkeypatch.setattr(sdp, '_solve', _uncertified(math.nan, math.nan, status='infeasible'))
    with pytest.raises(NumericalFailure):
        sdp.transform_within(BitsBox(2).box(), BitsBox(1).box(), 1e-6)


def test_transform_within_certified_and_trivial():
    assert sdp.transform_within(BitsBox(2).box(), BitsBox(1).box(), 1e-6)
    assert not sdp.transform_within(BitsBox(1).box(), BitsBox(2).box(), 1e-6)
    tau = random_state(2, seed=63)
    assert sdp.transform_within(BitsBox(1).box(), Box(tau, tau), 0.0)


def test_uncertified_ipm_retries_with_cvxpy(monkeypatch):
    calls = []

    def fake_solve(program, backend=None):
        calls.append(backend)
        if backend == 'cvxpy':
            return conic.SolveResult('optimal', 0.25, 0.25, 0.0, backend='cvxpy')
        return conic.SolveResult('numerical_failure', 0.25, 0.2499, 1e-4, backend='ipm')

    monkeypatch.setattr(conic, 'solve', fake_solve)
    monkeypatch.setattr(conic, 'cvxpy_available', lambda: True)
    program = sdp.trace_distance_program(basis_state(0, 2), pi_state(2))
    res = sdp._solve(program)
    assert calls == [None, 'cvxpy']
    assert res.optimal and res.backend == 'cvxpy'

    monkeypatch.setattr(conic, 'cvxpy_available', lambda: False)
    calls.clear()
    assert sdp._solve(program).status == 'numerical_failure'
    assert calls == [None]


# ---------------------------------------------------------------------------
# Monotonía
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('seed', range(5))
def test_box_error_monotone_under_precomposition(seed):
    source, target = random_box(2, seed=1200 + seed), random_box(2, seed=1210 + seed)
    channel = random_channel(2, 2, 2, seed=1220 + seed)
    rho, sigma = source
    processed = Box(apply(channel, rho), apply(channel, sigma))
    before = sdp.box_transform_error(source, target).error
    after = sdp.box_transform_error(processed, target).error
    assert after >= before - 1e-7


def test_smooth_divergences_monotone_on_eps_grid():
    rho, sigma = random_state(2, seed=1300), random_state(2, seed=1301)
    grid = [0.05 * k for k in range(11)]
    dmin = [float(sdp.smooth_dmin(rho, sigma, eps).value) for eps in grid]
    dmax = [float(sdp.smooth_dmax(rho, sigma, eps).value) for eps in grid]
    assert all(b >= a - 1e-7 for a, b in zip(dmin, dmin[1:]))
    assert all(b <= a + 1e-7 for a, b in zip(dmax, dmax[1:]))


# ---------------------------------------------------------------------------
# Baterías de brecha y de cantidades operacionales
# ---------------------------------------------------------------------------

def test_sdp_gap_battery():
    # la corrida completa es `python -m adlab battery sdp-gap --count 100`
    report = run_battery('sdp-gap', seed=11, count=4, workers=2)
    assert report.passed(), report.violations()
    assert {c.name for c in report.checks} == {
        'gap_trace_distance', 'gap_smooth_dmin', 'gap_smooth_dmax', 'gap_smooth_dmax_infidelity',
        'gap_box_transform',
    }


def test_operational_battery():
    # la corrida completa es `python -m adlab battery operational --count 50`
    report = run_battery('operational', seed=5, count=2, workers=2)
    assert report.passed(), report.violations()
    assert len(report.checks) == 8
