import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import Config
from .errors import DomainError
from .linalg import (
    check_same_dim, matrix_of, powm, log2m, sqrtm_psd, support_projector
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DivergenceValue:
    """
    Valor de una divergencia en bits, con marca explícita de infinito

    Args:
        value: Valor finito (ignorado si infinite=True)
        infinite: Marca de +∞ por violación de soporte
    """
    value: float = 0.0
    infinite: bool = False

    @classmethod
    def inf(cls) -> 'DivergenceValue':
        return cls(math.inf, True)

    @classmethod
    def of(cls, value: float) -> 'DivergenceValue':
        return cls(float(value), False)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def __float__(self) -> float:
        return math.inf if self.infinite else self.value

    def __str__(self) -> str:
        return 'inf' if self.infinite else repr(self.value)


@dataclass(frozen=True)
class RenyiOrder:
    """
    Orden de Rényi α > 0, α ≠ 1 (α = 1 corresponde a rel_entropy)
    """
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a) or a <= 0:
            raise DomainError(f"Orden de Rényi inválido: α = {self.alpha}")
        if a == 1.0:
            raise DomainError("α = 1 no es un orden de Rényi; usar rel_entropy")
        object.__setattr__(self, 'alpha', a)

    @property
    def petz_dp_guaranteed(self) -> bool:
        """Procesamiento de datos probado para Petz en (0,1) ∪ (1,2]"""
        return 0 < self.alpha < 1 or 1 < self.alpha <= 2

    @property
    def sandwiched_dp_guaranteed(self) -> bool:
        """Procesamiento de datos probado para sandwiched en [1/2,1) ∪ (1,∞)"""
        return 0.5 <= self.alpha < 1 or self.alpha > 1

    @property
    def beyond_proven_range(self) -> bool:
        return self.alpha > 2


def _order(alpha) -> RenyiOrder:
    return alpha if isinstance(alpha, RenyiOrder) else RenyiOrder(alpha)


def _support_leak(rho, sigma) -> float:
    """Tr[(I − Π_σ)ρ]"""
    proj = support_projector(sigma).matrix
    r = matrix_of(rho)
    return float(np.real(np.trace(r) - np.trace(proj @ r)))


def support_violated(rho, sigma) -> bool:
    return _support_leak(rho, sigma) > Config.TOLERANCES['support_leak_tol']


def trace_distance(rho, sigma) -> float:
    """
    Distancia de traza normalizada ½‖ρ − σ‖₁

    Returns:
        Valor en [0, 1]
    """
    check_same_dim(rho, sigma)
    lam = np.linalg.eigvalsh(matrix_of(rho) - matrix_of(sigma))
    return float(min(1.0, max(0.0, 0.5 * np.sum(np.abs(lam)))))


def sqrt_fidelity(rho, sigma) -> float:
    """‖√ρ √σ‖₁ (raíz de la fidelidad)"""
    check_same_dim(rho, sigma)
    s = np.linalg.svd(sqrtm_psd(rho) @ sqrtm_psd(sigma), compute_uv=False)
    return float(min(1.0, max(0.0, np.sum(s))))


def fidelity(rho, sigma) -> float:
    """Fidelidad cuántica F = ‖√ρ √σ‖₁²"""
    return sqrt_fidelity(rho, sigma) ** 2


def d_min(rho, sigma) -> DivergenceValue:
    """
    Entropía relativa mínima −log2 Tr[Π_ρ σ]

    Returns:
        Infinito si Tr[Π_ρ σ] ≤ infinity_tol
    """
    check_same_dim(rho, sigma)
    overlap = float(np.real(np.trace(support_projector(rho).matrix @ matrix_of(sigma))))
    if overlap <= Config.TOLERANCES['infinity_tol']:
        return DivergenceValue.inf()
    return DivergenceValue.of(-math.log2(min(overlap, 1.0)))


def d_max(rho, sigma) -> DivergenceValue:
    """
    Entropía relativa máxima log2 λ_max(σ^{-1/2} ρ σ^{-1/2}) sobre el soporte de σ
    """
    check_same_dim(rho, sigma)
    if support_violated(rho, sigma):
        return DivergenceValue.inf()
    s = powm(sigma, -0.5).matrix
    lam_max = float(np.linalg.eigvalsh(s @ matrix_of(rho) @ s)[-1])
    if lam_max <= 0:
        return DivergenceValue.inf()
    return DivergenceValue.of(math.log2(lam_max))


def rel_entropy(rho, sigma) -> DivergenceValue:
    """Entropía relativa cuántica Tr[ρ(log2 ρ − log2 σ)]"""
    check_same_dim(rho, sigma)
    if support_violated(rho, sigma):
        return DivergenceValue.inf()
    r = matrix_of(rho)
    value = np.real(np.trace(r @ (log2m(rho).matrix - log2m(sigma).matrix)))
    return DivergenceValue.of(float(value))


def rel_entropy_variance(rho, sigma) -> float:
    """
    Varianza de la entropía relativa Tr[ρ(log2 ρ − log2 σ − D)²]

    Raises:
        DomainError: si el soporte de ρ no está contenido en el de σ
    """
    check_same_dim(rho, sigma)
    if support_violated(rho, sigma):
        raise DomainError("V(ρ‖σ) no está definida si supp(ρ) ⊄ supp(σ)")
    r = matrix_of(rho)
    diff = log2m(rho).matrix - log2m(sigma).matrix
    d = float(np.real(np.trace(r @ diff)))
    second = float(np.real(np.trace(r @ diff @ diff)))
    return max(0.0, second - d * d)


def petz_renyi(rho, sigma, alpha) -> DivergenceValue:
    """
    Entropía relativa de Rényi–Petz (1/(α−1)) log2 Tr[ρ^α σ^{1−α}]

    Args:
        rho: Primer estado
        sigma: Segundo estado
        alpha: Orden (float o RenyiOrder)

    Returns:
        DivergenceValue (infinito para α > 1 con soporte violado o si Q se anula)
    """
    check_same_dim(rho, sigma)
    order = _order(alpha)
    a = order.alpha
    if order.beyond_proven_range:
        logger.debug(f"petz_renyi con α = {a} fuera del rango con procesamiento de datos probado")

    if a > 1 and support_violated(rho, sigma):
        return DivergenceValue.inf()

    q = float(np.real(np.trace(powm(rho, a).matrix @ powm(sigma, 1.0 - a).matrix)))
    if q <= Config.TOLERANCES['infinity_tol']:
        return DivergenceValue.inf()
    return DivergenceValue.of(math.log2(q) / (a - 1.0))


def sandwiched_renyi(rho, sigma, alpha) -> DivergenceValue:
    """
    Entropía relativa de Rényi sandwiched
    (1/(α−1)) log2 Tr[(σ^γ ρ σ^γ)^α], γ = (1−α)/(2α)
    """
    check_same_dim(rho, sigma)
    a = _order(alpha).alpha

    if a > 1 and support_violated(rho, sigma):
        return DivergenceValue.inf()

    gamma = (1.0 - a) / (2.0 * a)
    s = powm(sigma, gamma).matrix
    inner = s @ matrix_of(rho) @ s
    lam = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None)
    q = float(np.sum(np.power(lam, a)))
    if q <= Config.TOLERANCES['infinity_tol']:
        return DivergenceValue.inf()
    return DivergenceValue.of(math.log2(q) / (a - 1.0))
