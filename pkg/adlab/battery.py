"""
Baterías de desigualdades sobre instancias aleatorias con semilla

Cada instancia depende solo de (semilla, índice); los resultados se recogen
por índice, de modo que el reporte no depende del orden de ejecución.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from . import asymptotics
from .asymptotics import BatteryReport, InequalityCheck
from .codec import StateFile
from .config import Config
from .divergences import d_max, d_min
from .errors import DomainError, NumericalFailure
from .linalg import Box, compose, tensor_power
from .protocols import BitsBox, approx_distill_channel, standardize_bits
from .sdp import (
    SmoothingBall, box_transform_error, cost_approx, cost_exact, distillable_exact, smooth_dmax, smooth_dmin,
    trace_distance_sdp
)
from .testkit import instance_rng, random_channel, random_state
from .utils import get_system_metrics, log_system_event

logger = logging.getLogger(__name__)

InstanceResult = Tuple[Dict[str, Any], List[InequalityCheck]]


def _payload(**states) -> Dict[str, Any]:
    return {name: StateFile(state, name).to_payload() for name, state in states.items()}


def _pick_dim(rng: np.random.Generator) -> int:
    dims = Config.BATTERY['dims']
    return int(dims[rng.integers(len(dims))])


def _source_pair(rng: np.random.Generator, dim: int):
    """ρ de rango aleatorio y σ de rango completo"""
    rank = int(rng.integers(1, dim + 1))
    return random_state(dim, rank, rng), random_state(dim, None, rng)


# ---------------------------------------------------------------------------
# Instancias por suite
# ---------------------------------------------------------------------------

def _bridge_instance(rng: np.random.Generator) -> InstanceResult:
    dim = _pick_dim(rng)
    rho, sigma = _source_pair(rng, dim)
    report = asymptotics.bridge_bounds(rho, sigma)
    return {'dim': dim, 'states': _payload(rho=rho, sigma=sigma)}, report.checks


def _infidelity_instance(rng: np.random.Generator) -> InstanceResult:
    dim = _pick_dim(rng)
    rho, sigma = _source_pair(rng, dim)
    report = asymptotics.infidelity_bounds(rho, sigma)
    return {'dim': dim, 'states': _payload(rho=rho, sigma=sigma)}, report.checks


def _dp_instance(rng: np.random.Generator) -> InstanceResult:
    dim_in, dim_out = _pick_dim(rng), _pick_dim(rng)
    rho, sigma = _source_pair(rng, dim_in)
    env_dim = int(rng.integers(1, dim_in * dim_out + 1))
    while dim_out * env_dim < dim_in:
        env_dim += 1
    channel = random_channel(dim_in, dim_out, env_dim, rng)

    checks = [asymptotics.data_processing_check(rho, sigma, channel, q)
              for q in ('dmin', 'dmax', 'rel', 'trace_distance', 'fidelity')]
    checks += [asymptotics.data_processing_check(rho, sigma, channel, 'petz', a)
               for a in Config.BATTERY['dp_petz_alphas']]
    checks += [asymptotics.data_processing_check(rho, sigma, channel, 'sandwiched', a)
               for a in Config.BATTERY['dp_sandwiched_alphas']]
    description = {
        'dim_in': dim_in, 'dim_out': dim_out, 'env_dim': env_dim,
        'states': _payload(rho=rho, sigma=sigma),
        'choi': [[[float(z.real), float(z.imag)] for z in row] for row in channel.choi.matrix],
    }
    return description, checks


def _pseudo_continuity_instance(rng: np.random.Generator) -> InstanceResult:
    dim = _pick_dim(rng)
    rho0 = random_state(dim, int(rng.integers(1, dim + 1)), rng)
    rho1 = random_state(dim, int(rng.integers(1, dim + 1)), rng)
    sigma = random_state(dim, None, rng)
    checks = [asymptotics.pseudo_continuity_sandwiched(rho0, rho1, sigma, a)
              for a in Config.BATTERY['sandwiched_alphas']]
    checks += [asymptotics.pseudo_continuity_petz(rho0, rho1, sigma, a)
               for a in Config.BATTERY['petz_alphas']]
    return {'dim': dim, 'states': _payload(rho0=rho0, rho1=rho1, sigma=sigma)}, checks


def _converse_checks(rho, sigma, tau, omega, n: int, m: int, channel) -> List[InequalityCheck]:
    checks = []
    for a in Config.BATTERY['sandwiched_alphas']:
        checks.append(asymptotics.strong_converse_sandwiched(rho, sigma, tau, omega, n, m, a, channel=channel))
        checks.append(asymptotics.strong_converse_infidelity(rho, sigma, tau, omega, n, m, a, channel=channel))
    for a in Config.BATTERY['petz_alphas']:
        checks.append(asymptotics.strong_converse_petz(rho, sigma, tau, omega, n, m, a, channel=channel))
    return checks


def _strong_converse_instance(rng: np.random.Generator) -> InstanceResult:
    """Protocolo SDP-óptimo entre potencias tensoriales de cajas de qubits (n, m ≤ 2)"""
    rho, sigma = random_state(2, None, rng), random_state(2, None, rng)
    tau, omega = random_state(2, None, rng), random_state(2, None, rng)
    n, m = int(rng.integers(1, 3)), int(rng.integers(1, 3))

    source = Box(tensor_power(rho, n), tensor_power(sigma, n))
    target = Box(tensor_power(tau, m), tensor_power(omega, m))
    result = box_transform_error(source, target)

    checks = _converse_checks(rho, sigma, tau, omega, n, m, result.channel)
    for a in Config.BATTERY['sandwiched_alphas']:
        checks.append(asymptotics.one_shot_converse_sandwiched(*source, *target, result.channel, a))
    for a in Config.BATTERY['petz_alphas']:
        checks.append(asymptotics.one_shot_converse_petz(*source, *target, result.channel, a))
    description = {
        'n': n, 'm': m, 'error': result.error, 'gap': result.gap,
        'states': _payload(rho=rho, sigma=sigma, tau=tau, omega=omega),
    }
    return description, checks


def _agreement(name: str, first, second, tol: float, **parameters) -> InequalityCheck:
    """|first − second| ≤ tol; dos infinitos coinciden"""
    first, second = float(first), float(second)
    diff = 0.0 if first == second else abs(first - second)
    return InequalityCheck.of(name, diff, tol, **parameters)


def _operational_instance(rng: np.random.Generator) -> InstanceResult:
    """Cantidades operacionales por bisección frente a sus fórmulas entrópicas"""
    dim = _pick_dim(rng)
    rho, sigma = random_state(dim, None, rng), random_state(dim, None, rng)
    box = Box(rho, sigma)
    eps = Config.BATTERY['operational_eps']
    tol = Config.BATTERY['operational_tol']

    distill = approx_distill_channel(rho, sigma, eps)
    checks = [
        _agreement('operational_distill_exact', distillable_exact(box), d_min(rho, sigma), tol),
        _agreement('operational_cost_exact', cost_exact(box), d_max(rho, sigma), tol),
        _agreement('operational_cost_approx', cost_approx(box, eps), smooth_dmax(rho, sigma, eps).value, tol,
                   eps=eps),
        _agreement('operational_distill_channel', math.log2(distill.M), smooth_dmin(rho, sigma, eps).value,
                   Config.BATTERY['protocol_tol'], eps=eps),
    ]
    return {'dim': dim, 'states': _payload(rho=rho, sigma=sigma)}, checks


def _sdp_gap_instance(rng: np.random.Generator) -> InstanceResult:
    """Brecha primal-dual certificada de cada familia de programas"""
    dim = _pick_dim(rng)
    rho, sigma = random_state(dim, None, rng), random_state(dim, None, rng)
    tau, omega = random_state(2, None, rng), random_state(2, None, rng)
    eps = float(rng.uniform(0.05, 0.3))

    families = {
        'trace_distance': lambda: trace_distance_sdp(rho, sigma).gap,
        'smooth_dmin': lambda: smooth_dmin(rho, sigma, eps).gap,
        'smooth_dmax': lambda: smooth_dmax(rho, sigma, eps).gap,
        'smooth_dmax_infidelity': lambda: smooth_dmax(rho, sigma, SmoothingBall('infidelity', eps)).gap,
        'box_transform': lambda: box_transform_error(Box(rho, sigma), Box(tau, omega)).gap,
    }
    checks = []
    for family, gap_of in families.items():
        try:
            gap = gap_of()
        except NumericalFailure as e:
            logger.warning(f"Familia {family} sin certificado: {e}")
            gap = math.inf
        checks.append(InequalityCheck.of(f'gap_{family}', gap, Config.SOLVER['gap_tol'], eps=eps))
    description = {'dim': dim, 'eps': eps, 'states': _payload(rho=rho, sigma=sigma, tau=tau, omega=omega)}
    return description, checks


def bits_protocol_instance() -> InstanceResult:
    """
    Dos copias de un bit llevadas a cuatro bits (tasa 2) con el protocolo
    SDP-óptimo sobre las cajas estandarizadas; el error óptimo es 3/4
    """
    result = box_transform_error(BitsBox(2).box(), BitsBox(4).box())
    channel = compose(standardize_bits('expand', 4), compose(result.channel, standardize_bits('compress', 2)))
    zero, half = BitsBox(1).box()
    checks = _converse_checks(zero, half, zero, half, 2, 4, channel)
    return {'n': 2, 'm': 4, 'error': result.error, 'gap': result.gap, 'fixed': 'bits'}, checks


SUITES: Dict[str, Callable[[np.random.Generator], InstanceResult]] = {
    'bridge': _bridge_instance,
    'infidelity': _infidelity_instance,
    'dp': _dp_instance,
    'pseudo-continuity': _pseudo_continuity_instance,
    'strong-converse': _strong_converse_instance,
    'operational': _operational_instance,
    'sdp-gap': _sdp_gap_instance,
}


# ---------------------------------------------------------------------------
# Ejecución
# ---------------------------------------------------------------------------

def _run_instance(suite: str, seed: int, index: int) -> InstanceResult:
    description, checks = SUITES[suite](instance_rng(seed, index))
    description = {'index': index, **description}
    checks = [replace(c, parameters={**c.parameters, 'instance': index}) for c in checks]
    return description, checks


def run_battery(suite: str, seed: int, count: Optional[int] = None, workers: Optional[int] = None) -> BatteryReport:
    """
    Ejecuta una batería de desigualdades

    Args:
        suite: Nombre de la suite (ver SUITES)
        seed: Semilla de la batería
        count: Número de instancias (por defecto Config.BATTERY['count'])
        workers: Hilos de trabajo (por defecto Config.BATTERY['workers'])

    Returns:
        BatteryReport con las comprobaciones ordenadas por instancia
    """
    if suite not in SUITES:
        raise DomainError(f"Batería desconocida: {suite}")
    count = Config.BATTERY['count'] if count is None else int(count)
    workers = Config.BATTERY['workers'] if workers is None else int(workers)
    if count < 1 or workers < 1:
        raise DomainError(f"count y workers deben ser ≥ 1 (count={count}, workers={workers})")

    metrics = get_system_metrics()
    logger.info(f"🔬 Batería '{suite}': {count} instancias, semilla {seed}, {workers} hilos, "
                f"memoria libre {metrics['memory_available'] / 2**20:.0f} MiB")

    results: List[Optional[InstanceResult]] = [None] * count
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_run_instance, suite, seed, i): i for i in range(count)}
        for future, index in futures.items():
            results[index] = future.result()

    if suite == 'strong-converse':
        description, checks = bits_protocol_instance()
        results.append(({'index': count, **description},
                        [replace(c, parameters={**c.parameters, 'instance': count}) for c in checks]))

    report = BatteryReport(suite, int(seed))
    for description, checks in results:
        report.instances.append(description)
        report.checks.extend(checks)

    counts = report.counts
    if counts['violations']:
        for check in report.violations():
            log_system_event('ERROR', f"Violación en batería {suite}: {check.name} margen={check.margin:.3e}",
                             details=violation_record(report, check))
    else:
        log_system_event('SUCCESS', f"Batería {suite} sin violaciones", details=counts)
    return report


def violation_record(report: BatteryReport, check: InequalityCheck) -> Dict[str, Any]:
    """Comprobación fallida junto con la instancia completa para reproducirla"""
    index = check.parameters.get('instance')
    instance = report.instances[index] if index is not None and index < len(report.instances) else None
    return {
        'name': check.name,
        'lhs': check.lhs,
        'rhs': check.rhs,
        'margin': check.margin,
        'parameters': check.parameters,
        'instance': instance,
    }


def summarize(report: BatteryReport) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """
    Campos y bloque estructurado del reporte de una batería

    Returns:
        (fields, block) para codec.render_report
    """
    by_name: Dict[str, Dict[str, Any]] = {}
    for check in report.checks:
        entry = by_name.setdefault(check.name, {'count': 0, 'vacuous': 0, 'min_margin': math.inf})
        entry['count'] += 1
        if check.vacuous:
            entry['vacuous'] += 1
        else:
            entry['min_margin'] = min(entry['min_margin'], check.margin)

    counts = report.counts
    fields = {
        'suite': report.suite,
        'instances': counts['instances'],
        'checks': counts['checks'],
        'vacuous': counts['vacuous'],
        'violations': counts['violations'],
        'min_margin': report.min_margin,
        'status': 'pass' if report.passed() else 'fail',
    }
    block = {
        'families': by_name,
        'vacuous_checks': [
            {'name': c.name, 'lhs': c.lhs, 'rhs': c.rhs, 'parameters': c.parameters}
            for c in report.checks if c.vacuous
        ],
        'violations': [violation_record(report, c) for c in report.violations()],
    }
    return fields, block
