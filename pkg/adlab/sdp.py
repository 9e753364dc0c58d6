"""
Programas semidefinidos de la teoría: distancia de traza, D_min^ε, D_max^ε
(bolas de traza e infidelidad), error de transformación de cajas y los
drivers de bisección para las cantidades operacionales.

Cada familia expone su programa primal y, donde aplica, el dual explícito
para verificar dualidad fuerte.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from . import conic
from .config import Config
from .conic import ConicProgram, scalar, tr, trace
from .divergences import DivergenceValue, d_max, d_min, support_violated, trace_distance
from .errors import DomainError, NumericalFailure
from .linalg import (
    Box, Channel, HermitianOperator, State, basis_state, channel_from_choi, check_same_dim,
    matrix_of, pi_state, replacer_channel, support_isometry, support_projector
)

logger = logging.getLogger(__name__)

METRICS = ('trace_distance', 'infidelity')


@dataclass(frozen=True)
class SmoothingBall:
    """
    Bola de suavizado alrededor de ρ

    Args:
        metric: 'trace_distance' o 'infidelity'
        radius: Radio ε en [0, 1)
    """
    metric: str = 'trace_distance'
    radius: float = 0.0

    def __post_init__(self):
        metric = {'trace': 'trace_distance', 'fid': 'infidelity'}.get(self.metric, self.metric)
        if metric not in METRICS:
            raise DomainError(f"Métrica de suavizado desconocida: {self.metric}")
        radius = float(self.radius)
        if not 0.0 <= radius < 1.0:
            raise DomainError(f"Radio de suavizado fuera de [0, 1): {self.radius}")
        object.__setattr__(self, 'metric', metric)
        object.__setattr__(self, 'radius', radius)


class TraceDistanceResult(NamedTuple):
    value: float
    test: HermitianOperator
    gap: float
    status: str


class SmoothDminResult(NamedTuple):
    value: DivergenceValue
    test: HermitianOperator
    gap: float
    status: str


class SmoothDmaxResult(NamedTuple):
    value: DivergenceValue
    smoothed_state: Optional[State]
    gap: float
    status: str


class BoxTransformResult(NamedTuple):
    error: float
    channel: Channel
    gap: float
    status: str


# ---------------------------------------------------------------------------
# Utilidades
# ---------------------------------------------------------------------------

def _check_eps(eps: float, name: str = 'ε') -> float:
    eps = float(eps)
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"{name} fuera de [0, 1): {eps}")
    return eps


def _certify(result: conic.SolveResult, name: str) -> conic.SolveResult:
    if result.status != 'optimal':
        raise NumericalFailure(f"{name}: el solver terminó con estado {result.status}")
    return result


def _solve(program: ConicProgram) -> conic.SolveResult:
    """Solve con el backend configurado; si el IPM no certifica, se reintenta con cvxpy"""
    res = conic.solve(program)
    if res.status == 'numerical_failure' and res.backend == 'ipm' and conic.cvxpy_available():
        logger.warning(f"{program.name}: sin certificado con el IPM, se reintenta con cvxpy")
        retry = conic.solve(program, backend='cvxpy')
        if retry.status == 'optimal':
            return retry
    return res


def _as_state(m: np.ndarray) -> State:
    """Proyecta una matriz casi-estado sobre el conjunto de estados"""
    m = 0.5 * (m + m.conj().T)
    lam, vecs = np.linalg.eigh(m)
    lam = np.clip(lam, 0.0, None)
    fixed = (vecs * lam) @ vecs.conj().T
    return State(fixed / np.real(np.trace(fixed)))


def _choi_apply(rho_m: np.ndarray, d_in: int, d_out: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: np.einsum('aA,acAC->cC', rho_m, x.reshape(d_in, d_out, d_in, d_out))


def _choi_input_marginal(d_in: int, d_out: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: np.einsum('acAc->aA', x.reshape(d_in, d_out, d_in, d_out))


def _bits_box(x: float) -> Box:
    return Box(basis_state(0, 2), pi_state(2.0 ** x))


def dump_program(program: ConicProgram) -> str:
    """Volcado en tripletes dispersos (ver ConicProgram.dump)"""
    return program.dump()


# ---------------------------------------------------------------------------
# Distancia de traza
# ---------------------------------------------------------------------------

def trace_distance_program(rho, sigma) -> ConicProgram:
    """max Tr[Λ(ρ − σ)]  s.a.  0 ⪯ Λ ⪯ I"""
    check_same_dim(rho, sigma)
    d = matrix_of(rho).shape[0]
    p = ConicProgram('trace_distance', sense='max')
    L = p.hermitian_psd('Lambda', d)
    p.add_matrix_inequality([(L, None)], '<=', np.eye(d), 'Lambda<=I')
    p.set_objective(tr(matrix_of(rho) - matrix_of(sigma), L))
    return p


def trace_distance_dual_program(rho, sigma) -> ConicProgram:
    """min Tr Y  s.a.  Y ⪰ ρ − σ, Y ⪰ 0"""
    check_same_dim(rho, sigma)
    d = matrix_of(rho).shape[0]
    p = ConicProgram('trace_distance_dual', sense='min')
    Y = p.hermitian_psd('Y', d)
    p.add_matrix_inequality([(Y, None)], '>=', matrix_of(rho) - matrix_of(sigma), 'Y>=rho-sigma')
    p.set_objective(trace(Y))
    return p


def trace_distance_sdp(rho, sigma) -> TraceDistanceResult:
    """
    Distancia de traza por SDP, con el test óptimo y la brecha certificada

    Returns:
        TraceDistanceResult(value, test, gap, status)
    """
    res = _certify(_solve(trace_distance_program(rho, sigma)), 'trace_distance')
    return TraceDistanceResult(res.primal_value, HermitianOperator(res.primal_solution['Lambda']),
                               res.gap, res.status)


# ---------------------------------------------------------------------------
# Entropía relativa de test de hipótesis
# ---------------------------------------------------------------------------

def smooth_dmin_program(rho, sigma, eps: float) -> ConicProgram:
    """min Tr[Λσ]  s.a.  0 ⪯ Λ ⪯ I,  Tr[Λρ] ≥ 1 − ε"""
    check_same_dim(rho, sigma)
    d = matrix_of(rho).shape[0]
    p = ConicProgram('smooth_dmin', sense='min')
    L = p.hermitian_psd('Lambda', d)
    p.add_matrix_inequality([(L, None)], '<=', np.eye(d), 'Lambda<=I')
    p.add_inequality(tr(matrix_of(rho), L), '>=', 1.0 - eps, 'type_one')
    p.set_objective(tr(matrix_of(sigma), L))
    return p


def smooth_dmin_dual_program(rho, sigma, eps: float) -> ConicProgram:
    """max μ(1 − ε) − Tr X  s.a.  σ + X − μρ ⪰ 0,  X ⪰ 0,  μ ≥ 0"""
    check_same_dim(rho, sigma)
    d = matrix_of(rho).shape[0]
    p = ConicProgram('smooth_dmin_dual', sense='max')
    X = p.hermitian_psd('X', d)
    mu = p.nonneg('mu')
    p.add_matrix_inequality([(X, None), (mu, -matrix_of(rho))], '>=', -matrix_of(sigma), 'sigma+X-mu*rho>=0')
    p.set_objective(scalar(mu, 1.0 - eps) - trace(X))
    return p


def smooth_dmin(rho, sigma, eps: float) -> SmoothDminResult:
    """
    Entropía relativa de test de hipótesis
    D_min^ε(ρ‖σ) = −log2 min{Tr[Λσ] : 0 ⪯ Λ ⪯ I, Tr[Λρ] ≥ 1 − ε}

    Args:
        rho: Primer estado
        sigma: Segundo estado
        eps: Error de tipo I admitido, en [0, 1)

    Returns:
        SmoothDminResult(value, test, gap, status)
    """
    check_same_dim(rho, sigma)
    eps = _check_eps(eps)
    projector = support_projector(rho)

    # ε = 0 no tiene punto estrictamente factible; forma cerrada con Λ = Π_ρ
    if eps == 0.0:
        return SmoothDminResult(d_min(rho, sigma), projector, 0.0, 'optimal')
    if d_min(rho, sigma).infinite:
        return SmoothDminResult(DivergenceValue.inf(), projector, 0.0, 'optimal')

    res = _certify(_solve(smooth_dmin_program(rho, sigma, eps)), 'smooth_dmin')
    test = HermitianOperator(res.primal_solution['Lambda'])
    p_value = res.primal_value
    if p_value <= Config.TOLERANCES['infinity_tol']:
        return SmoothDminResult(DivergenceValue.inf(), test, res.gap, res.status)
    return SmoothDminResult(DivergenceValue.of(-math.log2(min(p_value, 1.0))), test, res.gap, res.status)


# ---------------------------------------------------------------------------
# Entropía relativa máxima suavizada
# ---------------------------------------------------------------------------

def support_distance_program(rho, sigma) -> ConicProgram:
    """
    Distancia de traza de ρ al conjunto de estados con soporte en supp(σ)

    min Tr Y  s.a.  Y ⪰ ρ − VRV†,  Tr R = 1,  R, Y ⪰ 0
    """
    check_same_dim(rho, sigma)
    V = support_isometry(sigma)
    d, r = V.shape
    p = ConicProgram('support_distance', sense='min')
    R = p.hermitian_psd('R', r)
    Y = p.hermitian_psd('Y', d)
    p.add_matrix_inequality([(Y, None), (R, lambda x: V @ x @ V.conj().T)], '>=', matrix_of(rho), 'Y>=rho-VRV')
    p.add_equality(trace(R), 1.0, 'trace_R')
    p.set_objective(trace(Y))
    return p


def _support_distance(rho, sigma) -> float:
    if not support_violated(rho, sigma):
        return 0.0
    res = _certify(_solve(support_distance_program(rho, sigma)), 'support_distance')
    return max(0.0, res.primal_value)


def smooth_dmax_program(rho, sigma, eps: float) -> ConicProgram:
    """
    Bola de traza: min λ  s.a.  λσ' ⪰ R,  Y ⪰ ρ − VRV†,  Tr Y ≤ ε,  Tr R = 1

    V es una isometría sobre supp(σ), σ' = V†σV y ρ̃ = VRV†.
    """
    check_same_dim(rho, sigma)
    V = support_isometry(sigma)
    d, r = V.shape
    sigma_r = V.conj().T @ matrix_of(sigma) @ V

    p = ConicProgram('smooth_dmax', sense='min')
    lam = p.nonneg('lambda')
    R = p.hermitian_psd('R', r)
    Y = p.hermitian_psd('Y', d)
    p.add_matrix_inequality([(lam, sigma_r), (R, lambda x: -x)], '>=', np.zeros((r, r)), 'lambda*sigma>=R')
    p.add_matrix_inequality([(Y, None), (R, lambda x: V @ x @ V.conj().T)], '>=', matrix_of(rho), 'Y>=rho-VRV')
    p.add_inequality(trace(Y), '<=', eps, 'ball')
    p.add_equality(trace(R), 1.0, 'trace_R')
    p.set_objective(scalar(lam))
    return p


def smooth_dmax_dual_program(rho, sigma, eps: float) -> ConicProgram:
    """
    max Tr[Qρ] + μ − εt  s.a.  Tr[Xσ'] ≤ 1,  Q ⪯ tI,  V†QV + μI ⪯ X,
    Q, X ⪰ 0, t ≥ 0, μ libre
    """
    check_same_dim(rho, sigma)
    V = support_isometry(sigma)
    d, r = V.shape
    sigma_r = V.conj().T @ matrix_of(sigma) @ V

    p = ConicProgram('smooth_dmax_dual', sense='max')
    Q = p.hermitian_psd('Q', d)
    X = p.hermitian_psd('X', r)
    t = p.nonneg('t')
    mu = p.free_scalar('mu')
    p.add_inequality(tr(sigma_r, X), '<=', 1.0, 'Tr[X sigma]<=1')
    p.add_matrix_inequality([(Q, None), (t, -np.eye(d))], '<=', np.zeros((d, d)), 'Q<=tI')
    p.add_matrix_inequality([(Q, lambda x: V.conj().T @ x @ V), (mu, np.eye(r)), (X, lambda x: -x)],
                            '<=', np.zeros((r, r)), 'VQV+mu<=X')
    p.set_objective(tr(matrix_of(rho), Q) + scalar(mu) - scalar(t, eps))
    return p


def smooth_dmax_infidelity_program(rho, sigma, eps_f: float) -> ConicProgram:
    """
    Bola de infidelidad: min λ sobre el bloque Z = [[R, X], [X†, ρ']] ⪰ 0 con
    λσ' ⪰ R, Tr R = 1 y Re Tr[W†V X] ≥ √(1 − ε_F)

    W es una isometría sobre supp(ρ) y ρ' = W†ρW; el bloque acota √F(VRV†, ρ).
    """
    check_same_dim(rho, sigma)
    V = support_isometry(sigma)
    W = support_isometry(rho)
    r, k = V.shape[1], W.shape[1]
    sigma_r = V.conj().T @ matrix_of(sigma) @ V
    rho_k = W.conj().T @ matrix_of(rho) @ W

    coupling = np.zeros((r + k, r + k), dtype=complex)
    coupling[r:, :r] = W.conj().T @ V
    top = np.zeros((r + k, r + k))
    top[:r, :r] = np.eye(r)

    p = ConicProgram('smooth_dmax_infidelity', sense='min')
    lam = p.nonneg('lambda')
    Z = p.hermitian_psd('Z', r + k)
    p.add_matrix_equality([(Z, lambda x: x[r:, r:])], rho_k, 'Z_bottom=rho')
    p.add_equality(tr(top, Z), 1.0, 'trace_R')
    p.add_matrix_inequality([(lam, sigma_r), (Z, lambda x: -x[:r, :r])], '>=', np.zeros((r, r)), 'lambda*sigma>=R')
    p.add_inequality(tr(coupling, Z), '>=', math.sqrt(1.0 - eps_f), 'fidelity')
    p.set_objective(scalar(lam))
    return p


def _smoothing_ball(ball) -> SmoothingBall:
    if isinstance(ball, SmoothingBall):
        return ball
    return SmoothingBall('trace_distance', ball)


def smooth_dmax(rho, sigma, ball: Union[SmoothingBall, float]) -> SmoothDmaxResult:
    """
    Entropía relativa máxima suavizada min_{ρ̃ ∈ bola} D_max(ρ̃‖σ)

    Args:
        rho: Primer estado
        sigma: Segundo estado
        ball: SmoothingBall (un float se interpreta como bola de traza)

    Returns:
        SmoothDmaxResult(value, smoothed_state, gap, status); value infinito
        si ningún estado de la bola cabe en supp(σ)
    """
    check_same_dim(rho, sigma)
    ball = _smoothing_ball(ball)
    eps = ball.radius
    rho_state = rho if isinstance(rho, State) else State(rho)

    if eps == 0.0:
        value = d_max(rho, sigma)
        return SmoothDmaxResult(value, rho_state, 0.0, 'optimal')

    V = support_isometry(sigma)
    if ball.metric == 'infidelity':
        leak = 1.0 - float(np.real(np.trace(V.conj().T @ matrix_of(rho) @ V)))
        if leak > eps:
            return SmoothDmaxResult(DivergenceValue.inf(), None, 0.0, 'infeasible')
        program = smooth_dmax_infidelity_program(rho, sigma, eps)
        distance = leak
        margin = eps - 1e-6
    else:
        distance = _support_distance(rho, sigma)
        if distance > eps + Config.SOLVER['feas_tol']:
            return SmoothDmaxResult(DivergenceValue.inf(), None, 0.0, 'infeasible')
        program = smooth_dmax_program(rho, sigma, eps)
        margin = eps - 1e-6

    res = _solve(program)
    if res.status != 'optimal':
        if distance > margin:
            logger.warning(f"smooth_dmax: bola en el borde del soporte (distancia {distance:.3e}, ε={eps}); "
                           f"se reporta infinito")
            return SmoothDmaxResult(DivergenceValue.inf(), None, res.gap, res.status)
        _certify(res, program.name)

    if ball.metric == 'infidelity':
        r = V.shape[1]
        block = res.primal_solution['Z'][:r, :r]
    else:
        block = res.primal_solution['R']
    smoothed = _as_state(V @ block @ V.conj().T)
    lam = max(res.primal_value, np.finfo(float).tiny)
    return SmoothDmaxResult(DivergenceValue.of(math.log2(lam)), smoothed, res.gap, res.status)


# ---------------------------------------------------------------------------
# Transformación de cajas
# ---------------------------------------------------------------------------

def box_transform_program(source: Box, target: Box) -> ConicProgram:
    """
    min Tr Y  s.a.  Y ⪰ τ − N(ρ),  N(σ) = ω,  Tr_B J = I,  J, Y ⪰ 0

    J es el Choi de N con la entrada primero.
    """
    rho, sigma = source
    tau, omega = target
    d_in, d_out = source.dim, target.dim

    p = ConicProgram('box_transform', sense='min')
    J = p.hermitian_psd('J', d_in * d_out)
    Y = p.hermitian_psd('Y', d_out)
    p.add_matrix_inequality([(Y, None), (J, _choi_apply(matrix_of(rho), d_in, d_out))], '>=',
                            matrix_of(tau), 'Y>=tau-N(rho)')
    p.add_matrix_equality([(J, _choi_apply(matrix_of(sigma), d_in, d_out))], matrix_of(omega), 'N(sigma)=omega')
    p.add_matrix_equality([(J, _choi_input_marginal(d_in, d_out))], np.eye(d_in), 'trace_preserving')
    p.set_objective(trace(Y))
    return p


def box_transform_dual_program(source: Box, target: Box) -> ConicProgram:
    """
    max Tr[τX] + Tr[ωW] + Tr Z  s.a.  X ⪯ I,  ρᵀ⊗X + σᵀ⊗W + Z⊗I ⪯ 0,
    X ⪰ 0, W y Z hermíticas libres
    """
    rho, sigma = source
    tau, omega = target
    d_in, d_out = source.dim, target.dim
    rho_t = matrix_of(rho).T
    sigma_t = matrix_of(sigma).T
    eye_out = np.eye(d_out)

    p = ConicProgram('box_transform_dual', sense='max')
    X = p.hermitian_psd('X', d_out)
    W = p.free_hermitian('W', d_out)
    Z = p.free_hermitian('Z', d_in)
    p.add_matrix_inequality([(X, None)], '<=', eye_out, 'X<=I')
    p.add_matrix_inequality([(X, lambda x: np.kron(rho_t, x)),
                             (W, lambda w: np.kron(sigma_t, w)),
                             (Z, lambda z: np.kron(z, eye_out))],
                            '<=', np.zeros((d_in * d_out, d_in * d_out)), 'choi_dual')
    p.set_objective(tr(matrix_of(tau), X) + tr(matrix_of(omega), W) + trace(Z))
    return p


def box_transform_error(source: Box, target: Box) -> BoxTransformResult:
    """
    Error mínimo ε* = min_N ½‖N(ρ) − τ‖₁ con N(σ) = ω exactamente

    Args:
        source: Caja (ρ, σ)
        target: Caja (τ, ω)

    Returns:
        BoxTransformResult(error, channel, gap, status)
    """
    tau, omega = target
    trivial = trace_distance(tau, omega)
    if trivial <= Config.TOLERANCES['trace_tol']:
        return BoxTransformResult(0.0, replacer_channel(source.dim, omega), 0.0, 'optimal')

    res = _certify(_solve(box_transform_program(source, target)), 'box_transform')
    channel = channel_from_choi(res.primal_solution['J'], source.dim, target.dim, sanitize=True)
    error = min(1.0, max(0.0, res.primal_value))
    logger.debug(f"box_transform_error: ε*={error:.10g} brecha={res.gap:.2e}")
    return BoxTransformResult(error, channel, res.gap, res.status)


def exact_transform_feasible(source: Box, target: Box, tol: float = 1e-6) -> bool:
    return box_transform_error(source, target).error <= tol


def transform_within(source: Box, target: Box, tol: float) -> bool:
    """
    Decide si ε*(source → target) ≤ tol

    Sin certificado, el óptimo queda entre los valores dual y primal del
    último iterado y basta con que tol caiga fuera de ese intervalo.

    Args:
        source: Caja (ρ, σ)
        target: Caja (τ, ω)
        tol: Error admitido

    Returns:
        True si la transformación es posible con error ≤ tol
    """
    tau, omega = target
    if trace_distance(tau, omega) <= Config.TOLERANCES['trace_tol']:
        return True

    program = box_transform_program(source, target)
    res = _solve(program)
    if res.status == 'optimal':
        return res.primal_value <= tol

    values = (res.primal_value, res.dual_value)
    if res.status == 'numerical_failure' and all(math.isfinite(v) for v in values):
        lo, hi = min(values), max(values)
        if hi <= tol:
            return True
        if lo > tol:
            return False
        # ventana por debajo de feasibility_tol: desplaza la frontera mucho menos que la resolución
        if hi - lo <= Config.BISECTION['feasibility_tol']:
            logger.warning(f"{program.name}: decisión por el punto medio de [{lo:.3e}, {hi:.3e}] (tol {tol:.3e})")
            return 0.5 * (lo + hi) <= tol
    _certify(res, program.name)
    return False


# ---------------------------------------------------------------------------
# Bisección sobre x = log2 M
# ---------------------------------------------------------------------------

def _bisect(feasible: Callable[[float], bool], lo: float, hi: float, feasible_below: bool) -> float:
    """
    Frontera de factibilidad en [lo, hi] con la resolución configurada

    feasible_below=True: factible en [lo, x*], se busca el supremo.
    feasible_below=False: factible en [x*, hi], se busca el ínfimo.
    """
    resolution = Config.BISECTION['resolution']
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if feasible(mid) == feasible_below:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sup_feasible(feasible: Callable[[float], bool]) -> float:
    """Supremo de un conjunto factible [0, x*] con corchete adaptativo"""
    lo, hi = Config.BISECTION['lo'], 1.0
    limit = Config.BISECTION['hi']
    while feasible(hi):
        if hi >= limit:
            return limit
        lo, hi = hi, min(2.0 * hi, limit)
    return _bisect(feasible, lo, hi, feasible_below=True)


def _inf_feasible(feasible: Callable[[float], bool]) -> float:
    """Ínfimo de un conjunto factible [x*, ∞) con corchete adaptativo"""
    lo, hi = Config.BISECTION['lo'], 1.0
    limit = Config.BISECTION['hi']
    while not feasible(hi):
        if hi >= limit:
            return math.inf
        lo, hi = hi, min(2.0 * hi, limit)
    return _bisect(feasible, lo, hi, feasible_below=False)


def distillable_exact(box: Box) -> float:
    """sup log2 M con (ρ, σ) → (|0⟩⟨0|, π_M) exacto"""
    rho, sigma = box
    if d_min(rho, sigma).infinite:
        return math.inf
    tol = Config.BISECTION['feasibility_tol']
    value = _sup_feasible(lambda x: transform_within(box, _bits_box(x), tol))
    logger.info(f"distillable_exact = {value:.6f}")
    return value


def distillable_approx(box: Box, eps: float) -> float:
    """sup log2 M con (ρ, σ) → (|0⟩⟨0|, π_M) con error ≤ ε"""
    eps = _check_eps(eps)
    if eps == 0.0:
        return distillable_exact(box)
    rho, sigma = box
    leak = 1.0 - float(np.real(np.trace(support_projector(sigma).matrix @ matrix_of(rho))))
    if leak >= 1.0 - eps:
        return math.inf
    tol = eps + Config.BISECTION['feasibility_tol']
    value = _sup_feasible(lambda x: transform_within(box, _bits_box(x), tol))
    logger.info(f"distillable_approx(ε={eps}) = {value:.6f}")
    return value


def cost_exact(box: Box) -> float:
    """inf log2 M con (|0⟩⟨0|, π_M) → (ρ, σ) exacto"""
    rho, sigma = box
    if trace_distance(rho, sigma) <= Config.BISECTION['feasibility_tol']:
        return 0.0
    if d_max(rho, sigma).infinite:
        return math.inf
    tol = Config.BISECTION['feasibility_tol']
    value = _inf_feasible(lambda x: transform_within(_bits_box(x), box, tol))
    logger.info(f"cost_exact = {value:.6f}")
    return value


def cost_approx(box: Box, eps: float) -> float:
    """inf log2 M con (|0⟩⟨0|, π_M) → (ρ, σ) con error ≤ ε"""
    eps = _check_eps(eps)
    if eps == 0.0:
        return cost_exact(box)
    rho, sigma = box
    if trace_distance(rho, sigma) <= eps:
        return 0.0
    if _support_distance(rho, sigma) > eps + Config.SOLVER['feas_tol']:
        return math.inf
    tol = eps + Config.BISECTION['feasibility_tol']
    value = _inf_feasible(lambda x: transform_within(_bits_box(x), box, tol))
    logger.info(f"cost_approx(ε={eps}) = {value:.6f}")
    return value
