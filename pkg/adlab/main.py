#!/usr/bin/env python3
"""
Interfaz de línea de comandos de adlab

    python -m adlab compute dmin --rho zero --sigma pi2
    python -m adlab battery bridge --seed 42 --count 10 --out tmp/bridge.txt
    python -m adlab rate --source-rho zero --source-sigma pi2 --target-rho zero --target-sigma pi4

Códigos de salida: 0 éxito, 1 violación en batería, 2 error de dominio o de
lectura, 3 fallo numérico.
"""

import argparse
import logging
import math
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

from . import battery, divergences, sdp
from .asymptotics import box_rate, second_order_cost, second_order_distill
from .codec import StateFile, render_report
from .config import Config
from .errors import AdlabError, DomainError, NumericalFailure
from .linalg import Box
from .sdp import SmoothingBall
from .utils import log_system_event, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')

QUANTITIES = (
    'dmin', 'dmax', 'rel', 'var', 'petz', 'sandwiched', 'smooth-dmin', 'smooth-dmax',
    'box-error', 'distill-exact', 'distill-approx', 'cost-exact', 'cost-approx',
    'trace-distance', 'fidelity',
)


def resolve_state_path(name: str) -> str:
    """Ruta a un StateFile; acepta los nombres de los estados incluidos (zero, one, pi2, pi4)"""
    if os.path.exists(name):
        return name
    bundled = os.path.join(DATA_DIR, name if name.endswith('.json') else f'{name}.json')
    if os.path.exists(bundled):
        return bundled
    return name


def _load(name: Optional[str], flag: str) -> StateFile:
    if name is None:
        raise DomainError(f"Falta el argumento {flag}")
    return StateFile.load(resolve_state_path(name))


def _require(value, flag: str):
    if value is None:
        raise DomainError(f"La cantidad requiere {flag}")
    return value


def _apply_overrides(args: argparse.Namespace):
    """Vuelca los flags de tolerancia sobre Config"""
    if getattr(args, 'backend', None):
        Config.update_config('solver', 'backend', args.backend)
    if getattr(args, 'gap_tol', None) is not None:
        Config.update_config('solver', 'gap_tol', args.gap_tol)
    if getattr(args, 'psd_tol', None) is not None:
        Config.update_config('tolerances', 'psd_tol', args.psd_tol)
    if getattr(args, 'resolution', None) is not None:
        Config.update_config('bisection', 'resolution', args.resolution)

    validation = Config.validate_config()
    if not validation['valid']:
        raise DomainError('; '.join(validation['errors']))


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------

def compute_quantity(quantity: str, rho, sigma, eps: Optional[float] = None, metric: str = 'trace',
                     alpha: Optional[float] = None, tau=None, omega=None) -> Dict[str, Any]:
    """
    Evalúa una cantidad y devuelve los campos del reporte

    Returns:
        Diccionario con value y, cuando hay solver, status y gap
    """
    if quantity == 'dmin':
        return {'value': divergences.d_min(rho, sigma)}
    if quantity == 'dmax':
        return {'value': divergences.d_max(rho, sigma)}
    if quantity == 'rel':
        return {'value': divergences.rel_entropy(rho, sigma)}
    if quantity == 'var':
        return {'value': divergences.rel_entropy_variance(rho, sigma)}
    if quantity == 'petz':
        return {'value': divergences.petz_renyi(rho, sigma, _require(alpha, '--alpha'))}
    if quantity == 'sandwiched':
        return {'value': divergences.sandwiched_renyi(rho, sigma, _require(alpha, '--alpha'))}
    if quantity == 'trace-distance':
        return {'value': divergences.trace_distance(rho, sigma)}
    if quantity == 'fidelity':
        return {'value': divergences.fidelity(rho, sigma)}

    if quantity == 'smooth-dmin':
        result = sdp.smooth_dmin(rho, sigma, _require(eps, '--eps'))
        return {'value': result.value, 'status': result.status, 'gap': result.gap}
    if quantity == 'smooth-dmax':
        result = sdp.smooth_dmax(rho, sigma, SmoothingBall(metric, _require(eps, '--eps')))
        return {'value': result.value, 'status': result.status, 'gap': result.gap}
    if quantity == 'box-error':
        target = Box(_require(tau, '--tau'), _require(omega, '--omega'))
        result = sdp.box_transform_error(Box(rho, sigma), target)
        return {'value': result.error, 'status': result.status, 'gap': result.gap}

    box = Box(rho, sigma)
    if quantity == 'distill-exact':
        return {'value': sdp.distillable_exact(box), 'status': 'optimal'}
    if quantity == 'distill-approx':
        return {'value': sdp.distillable_approx(box, _require(eps, '--eps')), 'status': 'optimal'}
    if quantity == 'cost-exact':
        return {'value': sdp.cost_exact(box), 'status': 'optimal'}
    if quantity == 'cost-approx':
        return {'value': sdp.cost_approx(box, _require(eps, '--eps')), 'status': 'optimal'}
    raise DomainError(f"Cantidad desconocida: {quantity}")


def cmd_compute(args: argparse.Namespace) -> Tuple[int, str]:
    rho_file = _load(args.rho, '--rho')
    sigma_file = _load(args.sigma, '--sigma')
    tau_file = _load(args.tau, '--tau') if args.tau else None
    omega_file = _load(args.omega, '--omega') if args.omega else None

    fields = {'quantity': args.quantity}
    fields.update(compute_quantity(
        args.quantity, rho_file.state, sigma_file.state, eps=args.eps, metric=args.metric, alpha=args.alpha,
        tau=tau_file.state if tau_file else None, omega=omega_file.state if omega_file else None,
    ))
    parameters = {'eps': args.eps, 'metric': args.metric, 'alpha': args.alpha}
    block = {
        'parameters': {k: v for k, v in parameters.items() if v is not None},
        'inputs': {name: f.to_payload() for name, f in
                   (('rho', rho_file), ('sigma', sigma_file), ('tau', tau_file), ('omega', omega_file)) if f},
    }
    return EXIT_OK, render_report(fields, block)


# ---------------------------------------------------------------------------
# battery
# ---------------------------------------------------------------------------

def cmd_battery(args: argparse.Namespace) -> Tuple[int, str]:
    report = battery.run_battery(args.suite, args.seed, args.count, args.workers)
    fields, block = battery.summarize(report)
    text = render_report(fields, block, seed=args.seed)

    if args.out:
        directory = os.path.dirname(args.out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(args.out, 'w') as f:
            f.write(text)
        logger.info(f"Reporte de batería escrito en {args.out}")

    code = EXIT_OK if report.passed() else EXIT_VIOLATION
    return code, text


# ---------------------------------------------------------------------------
# rate
# ---------------------------------------------------------------------------

def cmd_rate(args: argparse.Namespace) -> Tuple[int, str]:
    files = {
        'source_rho': _load(args.source_rho, '--source-rho'),
        'source_sigma': _load(args.source_sigma, '--source-sigma'),
        'target_rho': _load(args.target_rho, '--target-rho'),
        'target_sigma': _load(args.target_sigma, '--target-sigma'),
    }
    source = Box(files['source_rho'].state, files['source_sigma'].state)
    target = Box(files['target_rho'].state, files['target_sigma'].state)
    result = box_rate(source, target)

    fields: Dict[str, Any] = {
        'rate': result.rate,
        'marker': result.marker,
        'numerator': result.numerator,
        'denominator': result.denominator,
        'support_case': result.support_case,
    }
    if args.n is not None and args.eps is not None:
        if result.numerator.is_finite:
            fields['second_order_distill'] = second_order_distill(*source, args.eps, args.n)
            fields['second_order_cost'] = second_order_cost(*source, args.eps, args.n)
        else:
            fields['second_order_distill'] = math.inf
            fields['second_order_cost'] = math.inf
    block = {
        'parameters': {k: v for k, v in (('n', args.n), ('eps', args.eps)) if v is not None},
        'inputs': {name: f.to_payload() for name, f in files.items()},
    }
    return EXIT_OK, render_report(fields, block)


# ---------------------------------------------------------------------------
# Parser y entrada
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('--backend', choices=('ipm', 'cvxpy'), help="Backend del solver cónico")
    parser.add_argument('--gap-tol', type=float, help="Brecha primal-dual admitida")
    parser.add_argument('--psd-tol', type=float, help="Autovalor negativo admitido en estados")
    parser.add_argument('--resolution', type=float, help="Resolución de la bisección sobre log2 M")
    parser.add_argument('--log-level', default=None, help="Nivel de logging (DEBUG, INFO, ...)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='adlab',
        description="Teoría de recursos de la distinguibilidad asimétrica: cantidades, protocolos y baterías")
    sub = parser.add_subparsers(dest='command', required=True)

    compute = sub.add_parser('compute', help="Evalúa una cantidad sobre una caja")
    compute.add_argument('quantity', choices=QUANTITIES)
    compute.add_argument('--rho', required=True, help="StateFile de ρ (o zero, one, pi2, pi4)")
    compute.add_argument('--sigma', required=True, help="StateFile de σ")
    compute.add_argument('--tau', help="StateFile de τ (box-error)")
    compute.add_argument('--omega', help="StateFile de ω (box-error)")
    compute.add_argument('--eps', type=float, help="Parámetro de suavizado o error")
    compute.add_argument('--metric', choices=('trace', 'fid'), default='trace', help="Métrica de la bola")
    compute.add_argument('--alpha', type=float, help="Orden de Rényi")
    _add_common(compute)

    bat = sub.add_parser('battery', help="Ejecuta una batería de desigualdades")
    bat.add_argument('suite', choices=tuple(battery.SUITES))
    bat.add_argument('--seed', type=int, default=42, help="Semilla (por defecto 42)")
    bat.add_argument('--count', type=int, default=None, help="Número de instancias")
    bat.add_argument('--out', help="Archivo de reporte")
    bat.add_argument('--workers', type=int, default=None, help="Hilos de trabajo")
    _add_common(bat)

    rate = sub.add_parser('rate', help="Tasa óptima de conversión entre cajas")
    rate.add_argument('--source-rho', required=True)
    rate.add_argument('--source-sigma', required=True)
    rate.add_argument('--target-rho', required=True)
    rate.add_argument('--target-sigma', required=True)
    rate.add_argument('--n', type=int, help="Copias para los términos de segundo orden")
    rate.add_argument('--eps', type=float, help="Error para los términos de segundo orden")
    _add_common(rate)
    return parser


COMMANDS = {
    'compute': cmd_compute,
    'battery': cmd_battery,
    'rate': cmd_rate,
}


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    """
    Ejecuta la CLI y devuelve el código de salida

    Args:
        argv: Argumentos (por defecto sys.argv[1:])
        stdout: Flujo donde se escribe el reporte (por defecto sys.stdout)
    """
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_DOMAIN

    setup_logging(args.log_level)
    try:
        _apply_overrides(args)
        code, text = COMMANDS[args.command](args)
    except NumericalFailure as e:
        logger.error(f"Fallo numérico: {e}")
        log_system_event('ERROR', f"Fallo numérico en {args.command}: {e}")
        return EXIT_NUMERICAL
    except (AdlabError, ValueError) as e:
        logger.error(f"Error de dominio: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_DOMAIN

    stdout.write(text)
    return code


def main():
    """Función principal"""
    sys.exit(run())


if __name__ == "__main__":
    main()
