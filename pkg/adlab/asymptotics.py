"""
Tasas de conversión, expansiones de segundo orden, cotas de converso fuerte,
pseudo-continuidad y las familias de desigualdades entre cantidades suavizadas.

Toda comprobación se expresa como lhs ≤ rhs con margen rhs − lhs. Si el
lado derecho es +∞ o el izquierdo −∞ la desigualdad se cumple trivialmente
y la comprobación se marca como vacua (se cuenta, no se descarta).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtri

from .config import Config
from .divergences import (
    DivergenceValue, RenyiOrder, d_max, d_min, fidelity, petz_renyi, rel_entropy,
    rel_entropy_variance, sandwiched_renyi, support_violated, trace_distance
)
from .errors import DimensionError, DomainError
from .linalg import Box, Channel, apply, matrix_of, pinch, tensor_power, trace_norm
from .sdp import SmoothingBall, smooth_dmax, smooth_dmin

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Tipos
# ---------------------------------------------------------------------------

class SupportCase(Enum):
    """Casos de soporte de una conversión (ρ, σ) → (τ, ω)"""
    BOTH_FINITE = 'both_finite'
    SOURCE_VIOLATED = 'source_violated'
    TARGET_VIOLATED = 'target_violated'
    BOTH_VIOLATED = 'both_violated'


class RateResult(NamedTuple):
    """
    Tasa óptima D(ρ‖σ)/D(τ‖ω)

    marker es 'finite', 'zero', 'infinite' o 'undefined'; rate vale el
    cociente, 0.0, inf o nan respectivamente.
    """
    rate: float
    marker: str
    numerator: DivergenceValue
    denominator: DivergenceValue
    support_case: SupportCase


@dataclass(frozen=True)
class InequalityCheck:
    """
    Comprobación lhs ≤ rhs

    Args:
        name: Identificador de la familia de desigualdades
        lhs: Lado izquierdo
        rhs: Lado derecho
        margin: rhs − lhs (nan si la comprobación es vacua)
        parameters: Parámetros de la instancia (ε, α, n, ...)
        vacuous: True si un operando infinito la hace trivial
    """
    name: str
    lhs: float
    rhs: float
    margin: float
    parameters: Dict[str, Any] = field(default_factory=dict)
    vacuous: bool = False

    @classmethod
    def of(cls, name: str, lhs: float, rhs: float, **parameters) -> 'InequalityCheck':
        lhs, rhs = float(lhs), float(rhs)
        if rhs == math.inf or lhs == -math.inf:
            return cls(name, lhs, rhs, math.nan, parameters, True)
        if math.isnan(lhs) or math.isnan(rhs):
            raise DomainError(f"{name}: operando indefinido (lhs={lhs}, rhs={rhs})")
        return cls(name, lhs, rhs, rhs - lhs, parameters, False)

    def passed(self, margin_tol: float = None) -> bool:
        margin_tol = Config.BATTERY['margin_tol'] if margin_tol is None else margin_tol
        return self.vacuous or self.margin >= -margin_tol


@dataclass
class BatteryReport:
    """
    Conjunto de comprobaciones reproducible a partir de la semilla

    Args:
        suite: Nombre de la batería
        seed: Semilla (None para evaluaciones sueltas)
        checks: Comprobaciones en orden de instancia
        instances: Descripción de cada instancia evaluada
    """
    suite: str
    seed: Optional[int] = None
    checks: List[InequalityCheck] = field(default_factory=list)
    instances: List[Dict[str, Any]] = field(default_factory=list)

    def extend(self, other: 'BatteryReport'):
        self.checks.extend(other.checks)
        self.instances.extend(other.instances)

    def violations(self, margin_tol: float = None) -> List[InequalityCheck]:
        return [c for c in self.checks if not c.passed(margin_tol)]

    def passed(self, margin_tol: float = None) -> bool:
        return not self.violations(margin_tol)

    @property
    def counts(self) -> Dict[str, int]:
        vacuous = sum(1 for c in self.checks if c.vacuous)
        failed = len(self.violations())
        return {
            'checks': len(self.checks),
            'instances': len(self.instances),
            'vacuous': vacuous,
            'violations': failed,
            'passed': len(self.checks) - failed,
        }

    @property
    def min_margin(self) -> float:
        margins = [c.margin for c in self.checks if not c.vacuous]
        return min(margins) if margins else math.inf


class CostBracket(NamedTuple):
    lower: float
    upper: float


# ---------------------------------------------------------------------------
# Segundo orden
# ---------------------------------------------------------------------------

def inv_normal_cdf(eps: float) -> float:
    """
    Inversa de la distribución normal acumulada Φ⁻¹(ε)

    Raises:
        DomainError: si ε ∉ (0, 1)
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"Φ⁻¹ requiere ε ∈ (0, 1), recibido {eps}")
    return float(ndtri(eps))


def _first_and_second(rho, sigma, n: int) -> Tuple[float, float]:
    if int(n) != n or n < 1:
        raise DomainError(f"n debe ser un entero ≥ 1, recibido {n}")
    if support_violated(rho, sigma):
        raise DomainError("Expansión de segundo orden indefinida: supp(ρ) ⊄ supp(σ)")
    return float(rel_entropy(rho, sigma)), rel_entropy_variance(rho, sigma)


def second_order_distill(rho, sigma, eps: float, n: int) -> float:
    """
    nD(ρ‖σ) + √(nV(ρ‖σ)) Φ⁻¹(ε), sin el término O(log n)

    Args:
        rho: Primer estado
        sigma: Segundo estado
        eps: Error en (0, 1)
        n: Número de copias

    Returns:
        Aproximación de D_min^ε(ρ^⊗n‖σ^⊗n) en bits
    """
    D, V = _first_and_second(rho, sigma, n)
    return n * D + math.sqrt(n * V) * inv_normal_cdf(eps)


def third_order_distill(rho, sigma, eps: float, n: int) -> float:
    """
    second_order_distill más el término ½·log2 n

    A n de unos cientos el término logarítmico domina la diferencia con el
    valor exacto (≈ 5 bits a n = 100); con él la diferencia queda O(1).
    """
    return second_order_distill(rho, sigma, eps, n) + 0.5 * math.log2(n)


def second_order_cost(rho, sigma, eps: float, n: int, metric: str = 'trace_distance') -> float:
    """
    nD(ρ‖σ) − √(nV(ρ‖σ)) Φ⁻¹(ε)

    La misma expresión se usa con ambas métricas; con infidelidad es ajustada
    a segundo orden, con distancia de traza queda dentro de second_order_cost_bracket.
    """
    if metric not in ('trace_distance', 'trace', 'infidelity', 'fid'):
        raise DomainError(f"Métrica desconocida: {metric}")
    D, V = _first_and_second(rho, sigma, n)
    return n * D - math.sqrt(n * V) * inv_normal_cdf(eps)


def second_order_cost_bracket(rho, sigma, eps: float, n: int) -> CostBracket:
    """
    Cotas de segundo orden del coste con distancia de traza:
    nD − √(nV)Φ⁻¹(ε) ≤ D_c^ε ≤ nD − √(nV)Φ⁻¹(ε²)
    """
    D, V = _first_and_second(rho, sigma, n)
    spread = math.sqrt(n * V)
    return CostBracket(n * D - spread * inv_normal_cdf(eps),
                       n * D - spread * inv_normal_cdf(eps ** 2))


# ---------------------------------------------------------------------------
# Tasa de conversión
# ---------------------------------------------------------------------------

def box_rate(source: Box, target: Box) -> RateResult:
    """
    Tasa óptima de conversión de cajas D(ρ‖σ)/D(τ‖ω)

    Returns:
        RateResult con marcador 'finite', 'zero', 'infinite' o 'undefined'
    """
    rho, sigma = source
    tau, omega = target
    num = rel_entropy(rho, sigma)
    den = rel_entropy(tau, omega)
    free_target = trace_distance(tau, omega) <= Config.TOLERANCES['trace_tol']
    free_source = trace_distance(rho, sigma) <= Config.TOLERANCES['trace_tol']

    if num.infinite and den.infinite:
        return RateResult(math.nan, 'undefined', num, den, SupportCase.BOTH_VIOLATED)
    if num.infinite:
        return RateResult(math.inf, 'infinite', num, den, SupportCase.SOURCE_VIOLATED)
    if den.infinite:
        return RateResult(0.0, 'zero', num, den, SupportCase.TARGET_VIOLATED)
    if free_target:
        if free_source:
            return RateResult(math.nan, 'undefined', num, den, SupportCase.BOTH_FINITE)
        return RateResult(math.inf, 'infinite', num, den, SupportCase.BOTH_FINITE)
    if free_source:
        return RateResult(0.0, 'zero', DivergenceValue.of(0.0), den, SupportCase.BOTH_FINITE)
    return RateResult(num.value / den.value, 'finite', num, den, SupportCase.BOTH_FINITE)


# ---------------------------------------------------------------------------
# Pseudo-continuidad y conversos
# ---------------------------------------------------------------------------

def _sandwiched_pair(alpha) -> Tuple[float, float]:
    a = RenyiOrder(alpha).alpha
    if not 0.5 < a < 1.0:
        raise DomainError(f"Se requiere α ∈ (1/2, 1) para el par sandwiched, recibido {a}")
    return a, a / (2.0 * a - 1.0)


def _petz_pair(alpha) -> Tuple[float, float]:
    a = RenyiOrder(alpha).alpha
    if not 0.0 < a < 1.0:
        raise DomainError(f"Se requiere α ∈ (0, 1) para el par de Petz, recibido {a}")
    return a, 2.0 - a


def _log2_or_minus_inf(x: float) -> float:
    return math.log2(x) if x > 0 else -math.inf


def pseudo_continuity_sandwiched(rho0, rho1, sigma, alpha) -> InequalityCheck:
    """
    (α/(1−α)) log2 F(ρ₀, ρ₁) ≤ D̃_β(ρ₀‖σ) − D̃_α(ρ₁‖σ), β = α/(2α − 1)
    """
    a, b = _sandwiched_pair(alpha)
    first = float(sandwiched_renyi(rho0, sigma, b))
    second = float(sandwiched_renyi(rho1, sigma, a))
    lhs = a / (1.0 - a) * _log2_or_minus_inf(fidelity(rho0, rho1))
    rhs = math.inf if math.isinf(first) else first - second
    return InequalityCheck.of('pseudo_continuity_sandwiched', lhs, rhs, alpha=a, beta=b)


def pseudo_continuity_petz(rho0, rho1, sigma, alpha) -> InequalityCheck:
    """
    (2/(1−α)) log2[1 − ½‖ρ₀ − ρ₁‖₁] ≤ D_β(ρ₀‖σ) − D_α(ρ₁‖σ), β = 2 − α
    """
    a, b = _petz_pair(alpha)
    first = float(petz_renyi(rho0, sigma, b))
    second = float(petz_renyi(rho1, sigma, a))
    lhs = 2.0 / (1.0 - a) * _log2_or_minus_inf(1.0 - trace_distance(rho0, rho1))
    rhs = math.inf if math.isinf(first) else first - second
    return InequalityCheck.of('pseudo_continuity_petz', lhs, rhs, alpha=a, beta=b)


def _channel_residual(channel: Channel, sigma, omega) -> float:
    if channel.dim_in != matrix_of(sigma).shape[0] or channel.dim_out != matrix_of(omega).shape[0]:
        raise DimensionError(f"{channel!r} no conecta las dimensiones de la caja")
    return float(np.max(np.abs(apply(channel, sigma).matrix - matrix_of(omega))))


def one_shot_converse_sandwiched(rho, sigma, tau, omega, channel: Channel, alpha) -> InequalityCheck:
    """
    D̃_α(τ‖ω) + (α/(1−α)) log2 F(N(ρ), τ) ≤ D̃_β(ρ‖σ) para N con N(σ) = ω
    """
    a, b = _sandwiched_pair(alpha)
    residual = _channel_residual(channel, sigma, omega)
    target = float(sandwiched_renyi(tau, omega, a))
    lhs = target + a / (1.0 - a) * _log2_or_minus_inf(fidelity(apply(channel, rho), tau))
    rhs = float(sandwiched_renyi(rho, sigma, b))
    return InequalityCheck.of('one_shot_converse_sandwiched', lhs, rhs, alpha=a, beta=b, residual=residual)


def one_shot_converse_petz(rho, sigma, tau, omega, channel: Channel, alpha) -> InequalityCheck:
    """
    D_α(τ‖ω) + (2/(1−α)) log2[1 − ½‖N(ρ) − τ‖₁] ≤ D_β(ρ‖σ) para N con N(σ) = ω
    """
    a, b = _petz_pair(alpha)
    residual = _channel_residual(channel, sigma, omega)
    target = float(petz_renyi(tau, omega, a))
    lhs = target + 2.0 / (1.0 - a) * _log2_or_minus_inf(1.0 - trace_distance(apply(channel, rho), tau))
    rhs = float(petz_renyi(rho, sigma, b))
    return InequalityCheck.of('one_shot_converse_petz', lhs, rhs, alpha=a, beta=b, residual=residual)


def _protocol_error(rho, sigma, tau, omega, n: int, m: int, channel: Optional[Channel],
                    error: Optional[float], metric: str) -> Tuple[Optional[float], Dict[str, Any]]:
    """Error del protocolo (dado o medido reproduciendo el canal sobre las potencias tensoriales)"""
    if channel is None:
        return (None if error is None else float(error)), {}
    source_first, source_second = tensor_power(rho, n), tensor_power(sigma, n)
    target_first, target_second = tensor_power(tau, m), tensor_power(omega, m)
    residual = _channel_residual(channel, source_second, target_second)
    out = apply(channel, source_first)
    if metric == 'infidelity':
        measured = max(0.0, 1.0 - fidelity(out, target_first))
    else:
        measured = trace_distance(out, target_first)
    return measured, {'residual': residual}


def _strong_converse(name: str, exponent_bound: float, error: Optional[float], n: int,
                     parameters: Dict[str, Any]) -> InequalityCheck:
    """
    Sin protocolo: se registra la cota inferior del error 1 − 2^{−n·cota}.
    Con protocolo: lhs = cota del exponente, rhs = −(1/n) log2(1 − ε).
    """
    if math.isnan(exponent_bound):
        return InequalityCheck.of(name, -math.inf, math.inf, **parameters)
    if error is None:
        lower = 1.0 - 2.0 ** (-n * exponent_bound) if exponent_bound > 0 else 0.0
        parameters['error_lower_bound'] = lower
        return InequalityCheck.of(name, exponent_bound, max(exponent_bound, 0.0), **parameters)
    error = min(1.0, max(0.0, float(error)))
    parameters['error'] = error
    rhs = math.inf if error >= 1.0 else -math.log2(1.0 - error) / n
    return InequalityCheck.of(name, exponent_bound, rhs, **parameters)


def _rate_args(n: int, m: int) -> float:
    if int(n) != n or int(m) != m or n < 1 or m < 1:
        raise DomainError(f"n y m deben ser enteros ≥ 1 (n={n}, m={m})")
    return m / n


def _combine(rate: float, target: float, source: float) -> float:
    """R·D(τ‖ω) − D(ρ‖σ) con la convención ∞ − ∞ = nan"""
    if math.isinf(source) and math.isinf(target):
        return math.nan
    return rate * target - source


def strong_converse_sandwiched(rho, sigma, tau, omega, n: int, m: int, alpha,
                               channel: Optional[Channel] = None, error: Optional[float] = None) -> InequalityCheck:
    """
    −(1/n) log2(1 − ε) ≥ ((1−α)/(2α)) (R·D̃_α(τ‖ω) − D̃_β(ρ‖σ)), R = m/n

    Args:
        rho, sigma: Caja fuente (una copia)
        tau, omega: Caja destino (una copia)
        n, m: Copias consumidas y producidas
        alpha: Orden en (1/2, 1); β = α/(2α − 1)
        channel: Protocolo ρ^⊗n → τ^⊗m a reproducir (opcional)
        error: Error ya medido del protocolo (opcional)

    Returns:
        InequalityCheck con lhs = cota del exponente
    """
    a, b = _sandwiched_pair(alpha)
    rate = _rate_args(n, m)
    bound = (1.0 - a) / (2.0 * a) * _combine(rate, float(sandwiched_renyi(tau, omega, a)),
                                             float(sandwiched_renyi(rho, sigma, b)))
    measured, extra = _protocol_error(rho, sigma, tau, omega, n, m, channel, error, 'trace_distance')
    return _strong_converse('strong_converse_sandwiched', bound, measured, n,
                            dict(alpha=a, beta=b, n=n, m=m, rate=rate, **extra))


def strong_converse_petz(rho, sigma, tau, omega, n: int, m: int, alpha,
                         channel: Optional[Channel] = None, error: Optional[float] = None) -> InequalityCheck:
    """
    −(1/n) log2(1 − ε) ≥ ((1−α)/2) (R·D_α(τ‖ω) − D_β(ρ‖σ)), β = 2 − α
    """
    a, b = _petz_pair(alpha)
    rate = _rate_args(n, m)
    bound = (1.0 - a) / 2.0 * _combine(rate, float(petz_renyi(tau, omega, a)),
                                       float(petz_renyi(rho, sigma, b)))
    measured, extra = _protocol_error(rho, sigma, tau, omega, n, m, channel, error, 'trace_distance')
    return _strong_converse('strong_converse_petz', bound, measured, n,
                            dict(alpha=a, beta=b, n=n, m=m, rate=rate, **extra))


def strong_converse_infidelity(rho, sigma, tau, omega, n: int, m: int, alpha,
                               channel: Optional[Channel] = None, error: Optional[float] = None) -> InequalityCheck:
    """
    −(1/n) log2(1 − ε_F) ≥ ((1−α)/α) (R·D̃_α(τ‖ω) − D̃_β(ρ‖σ)) con error de infidelidad
    """
    a, b = _sandwiched_pair(alpha)
    rate = _rate_args(n, m)
    bound = (1.0 - a) / a * _combine(rate, float(sandwiched_renyi(tau, omega, a)),
                                     float(sandwiched_renyi(rho, sigma, b)))
    measured, extra = _protocol_error(rho, sigma, tau, omega, n, m, channel, error, 'infidelity')
    return _strong_converse('strong_converse_infidelity', bound, measured, n,
                            dict(alpha=a, beta=b, n=n, m=m, rate=rate, **extra))


# ---------------------------------------------------------------------------
# Procesamiento de datos
# ---------------------------------------------------------------------------

DP_QUANTITIES = ('dmin', 'dmax', 'rel', 'petz', 'sandwiched', 'trace_distance', 'fidelity')


def data_processing_check(rho, sigma, channel: Channel, quantity: str, alpha=None) -> InequalityCheck:
    """
    D(N(ρ)‖N(σ)) ≤ D(ρ‖σ) para la divergencia indicada

    Para la fidelidad la desigualdad se invierte: F(ρ, σ) ≤ F(N(ρ), N(σ)).
    """
    out_first, out_second = apply(channel, rho), apply(channel, sigma)
    params: Dict[str, Any] = {'quantity': quantity}

    if quantity == 'fidelity':
        return InequalityCheck.of('dp_fidelity', fidelity(rho, sigma), fidelity(out_first, out_second), **params)
    if quantity == 'trace_distance':
        return InequalityCheck.of('dp_trace_distance', trace_distance(out_first, out_second),
                                  trace_distance(rho, sigma), **params)

    if quantity in ('petz', 'sandwiched'):
        order = RenyiOrder(alpha)
        params['alpha'] = order.alpha
        if quantity == 'petz' and not order.petz_dp_guaranteed:
            params['beyond_proven_range'] = True
        fn = petz_renyi if quantity == 'petz' else sandwiched_renyi
        before, after = fn(rho, sigma, order), fn(out_first, out_second, order)
    else:
        fn = {'dmin': d_min, 'dmax': d_max, 'rel': rel_entropy}.get(quantity)
        if fn is None:
            raise DomainError(f"Cantidad desconocida para procesamiento de datos: {quantity}")
        before, after = fn(rho, sigma), fn(out_first, out_second)
    return InequalityCheck.of(f'dp_{quantity}', float(after), float(before), **params)


# ---------------------------------------------------------------------------
# Familias de cotas entre cantidades suavizadas
# ---------------------------------------------------------------------------

class _SmoothCache:
    """Valores de D_min^ε y D_max^ε ya resueltos para un par (ρ, σ)"""

    def __init__(self, rho, sigma):
        self.rho = rho
        self.sigma = sigma
        self._dmin: Dict[float, float] = {}
        self._dmax: Dict[Tuple[str, float], float] = {}

    def dmin(self, eps: float) -> float:
        key = round(float(eps), 15)
        if key not in self._dmin:
            self._dmin[key] = float(smooth_dmin(self.rho, self.sigma, key).value)
        return self._dmin[key]

    def dmax(self, eps: float, metric: str = 'trace_distance') -> float:
        key = (metric, round(float(eps), 15))
        if key not in self._dmax:
            self._dmax[key] = float(smooth_dmax(self.rho, self.sigma, SmoothingBall(metric, key[1])).value)
        return self._dmax[key]


def _grid(values: Optional[Iterable], key: str) -> List:
    return list(Config.BATTERY[key] if values is None else values)


def _log2_inv(x: float) -> float:
    """log2(1/x)"""
    return -math.log2(x)


def bridge_bounds(rho, sigma, eps_pairs: Optional[Sequence[Sequence[float]]] = None,
                  eps_grid: Optional[Sequence[float]] = None,
                  sandwiched_alphas: Optional[Sequence[float]] = None,
                  petz_alphas: Optional[Sequence[float]] = None,
                  upper_alphas: Optional[Sequence[float]] = None) -> BatteryReport:
    """
    Cotas entre D_min^ε y D_max^ε con bola de distancia de traza

    (a) D_min^{ε₁} ≤ D_max^{ε₂} + log2(1/(1 − ε₁ − ε₂))
    (b) D_max^ε ≤ D_min^{1−ε²} + log2|spec σ| + log2(1/(1 − ε²))
    (c) D̃_α + (2α/(α−1)) log2(1/(1−ε)) ≤ D_max^ε, α ∈ [1/2, 1), y su forma de Petz
    (d) D_max^ε ≤ (1/ε²)[D + ‖ρ−σ‖₁/(2 ln 2)] + log2(1/(1−ε²)) y
        D_max^ε ≤ D̃_α + (1/(α−1)) log2(1/ε²) + log2(1/(1−ε²)), α > 1

    Returns:
        BatteryReport con todas las comprobaciones
    """
    cache = _SmoothCache(rho, sigma)
    report = BatteryReport('bridge')
    _, spec_count = pinch(sigma, sigma)

    for eps1, eps2 in _grid(eps_pairs, 'eps_pairs'):
        if eps1 < 0 or eps2 < 0 or eps1 + eps2 >= 1:
            logger.debug(f"bridge_bounds: par (ε₁={eps1}, ε₂={eps2}) fuera de rango, omitido")
            continue
        report.checks.append(InequalityCheck.of(
            'bridge_a', cache.dmin(eps1), cache.dmax(eps2) + _log2_inv(1.0 - eps1 - eps2), eps1=eps1, eps2=eps2))

    rel = float(rel_entropy(rho, sigma))
    norm = trace_norm(matrix_of(rho) - matrix_of(sigma))
    for eps in _grid(eps_grid, 'eps_grid'):
        if not 0.0 < eps < 1.0:
            continue
        smoothed = cache.dmax(eps)
        report.checks.append(InequalityCheck.of(
            'bridge_b', smoothed,
            cache.dmin(1.0 - eps ** 2) + math.log2(spec_count) + _log2_inv(1.0 - eps ** 2),
            eps=eps, spec_count=spec_count))

        for a in _grid(sandwiched_alphas, 'sandwiched_alphas'):
            renyi = float(sandwiched_renyi(rho, sigma, a))
            report.checks.append(InequalityCheck.of(
                'bridge_c_sandwiched', renyi + 2.0 * a / (a - 1.0) * _log2_inv(1.0 - eps), smoothed,
                eps=eps, alpha=a))
        for a in _grid(petz_alphas, 'petz_alphas'):
            renyi = float(petz_renyi(rho, sigma, a))
            report.checks.append(InequalityCheck.of(
                'bridge_c_petz', renyi + 2.0 / (a - 1.0) * _log2_inv(1.0 - eps), smoothed, eps=eps, alpha=a))

        upper = (rel + norm / (2.0 * math.log(2.0))) / eps ** 2 + _log2_inv(1.0 - eps ** 2)
        report.checks.append(InequalityCheck.of('bridge_d_relative_entropy', smoothed, upper, eps=eps))
        for a in _grid(upper_alphas, 'sandwiched_upper_alphas'):
            renyi = float(sandwiched_renyi(rho, sigma, a))
            report.checks.append(InequalityCheck.of(
                'bridge_d_sandwiched', smoothed,
                renyi + _log2_inv(eps ** 2) / (a - 1.0) + _log2_inv(1.0 - eps ** 2), eps=eps, alpha=a))

    logger.debug(f"bridge_bounds: {len(report.checks)} comprobaciones, margen mínimo {report.min_margin:.3e}")
    return report


def infidelity_bounds(rho, sigma, eps_pairs: Optional[Sequence[Sequence[float]]] = None,
                      eps_grid: Optional[Sequence[float]] = None,
                      sandwiched_alphas: Optional[Sequence[float]] = None,
                      upper_alphas: Optional[Sequence[float]] = None) -> BatteryReport:
    """
    Las mismas familias con D_max suavizada en la bola de infidelidad

    (a) D_min^{ε} ≤ D_max^{ε'} − log2(1 − (√ε + √ε')²)
    (b) D_max^{ε} ≤ D_min^{1−ε} + log2|spec σ| + log2(1/(1 − ε))
    (c) D̃_α + (α/(α−1)) log2(1/(1−ε)) ≤ D_max^{ε}
    (d) D_max^{ε} ≤ D̃_α + log2(1/(1−ε)) + (1/(α−1)) log2(1/ε), α > 1
    """
    cache = _SmoothCache(rho, sigma)
    report = BatteryReport('infidelity')
    _, spec_count = pinch(sigma, sigma)

    for eps, eps_prime in _grid(eps_pairs, 'eps_pairs'):
        reach = math.sqrt(max(eps, 0.0)) + math.sqrt(max(eps_prime, 0.0))
        if eps < 0 or eps_prime < 0 or reach >= 1.0 or eps >= 1.0 or eps_prime >= 1.0:
            logger.debug(f"infidelity_bounds: par (ε={eps}, ε'={eps_prime}) fuera de rango, omitido")
            continue
        report.checks.append(InequalityCheck.of(
            'infidelity_a', cache.dmin(eps), cache.dmax(eps_prime, 'infidelity') - math.log2(1.0 - reach ** 2),
            eps=eps, eps_prime=eps_prime))

    for eps in _grid(eps_grid, 'eps_grid'):
        if not 0.0 < eps < 1.0:
            continue
        smoothed = cache.dmax(eps, 'infidelity')
        report.checks.append(InequalityCheck.of(
            'infidelity_b', smoothed, cache.dmin(1.0 - eps) + math.log2(spec_count) + _log2_inv(1.0 - eps),
            eps=eps, spec_count=spec_count))
        for a in _grid(sandwiched_alphas, 'sandwiched_alphas'):
            renyi = float(sandwiched_renyi(rho, sigma, a))
            report.checks.append(InequalityCheck.of(
                'infidelity_c', renyi + a / (a - 1.0) * _log2_inv(1.0 - eps), smoothed, eps=eps, alpha=a))
        for a in _grid(upper_alphas, 'sandwiched_upper_alphas'):
            renyi = float(sandwiched_renyi(rho, sigma, a))
            report.checks.append(InequalityCheck.of(
                'infidelity_d', smoothed, renyi + _log2_inv(1.0 - eps) + _log2_inv(eps) / (a - 1.0),
                eps=eps, alpha=a))

    logger.debug(f"infidelity_bounds: {len(report.checks)} comprobaciones, margen mínimo {report.min_margin:.3e}")
    return report
