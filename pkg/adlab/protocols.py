"""
Canales constructivos de destilación y dilución, canales de estandarización
de bits y verificación de protocolos por reproducción sobre cajas.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .config import Config
from .divergences import d_max, fidelity, trace_distance
from .errors import DimensionError, DomainError
from .linalg import (
    Box, Channel, HermitianOperator, apply, basis_state, channel_from_kraus, compose, ket,
    matrix_of, measure_prepare_channel, min_eigenvalue, pi_state, replacer_channel,
    support_projector, tensor_power
)
from .sdp import smooth_dmax, smooth_dmin

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Tipos
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InfiniteDistinguishability:
    """Señal: la caja permite destilar infinitos bits (Tr[Π_ρ σ] = 0)"""
    reason: str = ''

    @property
    def value(self) -> float:
        return math.inf


@dataclass(frozen=True)
class InfiniteCost:
    """Señal: ningún número finito de bits genera la caja (supp ρ ⊄ supp σ)"""
    reason: str = ''

    @property
    def value(self) -> float:
        return math.inf


class DistillResult(NamedTuple):
    channel: Channel
    M: float


class DiluteResult(NamedTuple):
    channel: Channel
    lam: float


class ImpossibilityWitness(NamedTuple):
    operator: HermitianOperator
    min_eigenvalue: float


@dataclass(frozen=True)
class BitsBox:
    """
    m bits de distinguibilidad asimétrica: (|0⟩⟨0|, π_{2^m})

    Args:
        m: Número de bits (real ≥ 0)
    """
    m: float

    def __post_init__(self):
        m = float(self.m)
        if not math.isfinite(m) or m < 0:
            raise DomainError(f"BitsBox requiere m ≥ 0, recibido {self.m}")
        object.__setattr__(self, 'm', m)

    @property
    def M(self) -> float:
        return 2.0 ** self.m

    def box(self) -> Box:
        return Box(basis_state(0, 2), pi_state(self.M))

    def tensor_form(self) -> Box:
        """(|0⟩⟨0|^⊗m, π^⊗m) para m entero ≥ 1"""
        m = _integer_bits(self.m)
        return Box(tensor_power(basis_state(0, 2), m), tensor_power(pi_state(2.0), m))


@dataclass
class ProtocolReport:
    """
    Resultado de reproducir un protocolo sobre una caja

    Args:
        first_state_error: Distancia de traza (o infidelidad) entre N(ρ) y τ
        second_state_residual: max |N(σ) − ω| entrada a entrada
        bits_in: Bits consumidos (si aplica)
        bits_out: Bits producidos (si aplica)
        metric: 'trace_distance' o 'infidelity'
    """
    first_state_error: float
    second_state_residual: float
    bits_in: Optional[float] = None
    bits_out: Optional[float] = None
    metric: str = 'trace_distance'
    bound_margin: Optional[float] = None
    channel: Optional[Channel] = field(default=None, repr=False)


def _integer_bits(m) -> int:
    if float(m) != int(m) or int(m) < 1:
        raise DomainError(f"Se requiere un número entero de bits ≥ 1, recibido {m}")
    return int(m)


def _qubit_projectors():
    return [basis_state(0, 2).matrix, basis_state(1, 2).matrix]


# ---------------------------------------------------------------------------
# Destilación y dilución
# ---------------------------------------------------------------------------

def exact_distill_channel(rho, sigma) -> Union[DistillResult, InfiniteDistinguishability]:
    """
    Canal de medida {Π_ρ, I − Π_ρ}: ρ ↦ |0⟩⟨0| y σ ↦ π_M con M = 1/Tr[Π_ρ σ]

    Returns:
        DistillResult(channel, M) o InfiniteDistinguishability si ρ ⊥ σ
    """
    projector = support_projector(rho).matrix
    overlap = float(np.real(np.trace(projector @ matrix_of(sigma))))
    if overlap <= Config.TOLERANCES['infinity_tol']:
        return InfiniteDistinguishability(f"Tr[Π_ρ σ] = {overlap:.3e}")

    d = projector.shape[0]
    channel = measure_prepare_channel([projector, np.eye(d) - projector], _qubit_projectors())
    return DistillResult(channel, 1.0 / min(overlap, 1.0))


def exact_dilute_channel(rho, sigma) -> Union[DiluteResult, InfiniteCost]:
    """
    Canal τ ↦ ⟨0|τ|0⟩ρ + ⟨1|τ|1⟩ω con ω = (2^λσ − ρ)/(2^λ − 1), λ = D_max(ρ‖σ)

    Returns:
        DiluteResult(channel, λ) o InfiniteCost si supp ρ ⊄ supp σ
    """
    value = d_max(rho, sigma)
    if value.infinite:
        return InfiniteCost("supp(ρ) ⊄ supp(σ)")

    lam = max(0.0, value.value)
    # D_max por debajo de la resolución numérica: ρ ≈ σ
    if lam <= 1e-9:
        return DiluteResult(replacer_channel(2, rho), 0.0)

    # margen relativo para que ω siga siendo PSD con redondeo
    M = 2.0 ** lam * (1.0 + 1e-12)
    omega = (M * matrix_of(sigma) - matrix_of(rho)) / (M - 1.0)
    omega = 0.5 * (omega + omega.conj().T)
    w_lam, w_vecs = np.linalg.eigh(omega)
    omega = (w_vecs * np.clip(w_lam, 0.0, None)) @ w_vecs.conj().T

    channel = measure_prepare_channel(_qubit_projectors(), [matrix_of(rho), omega])
    return DiluteResult(channel, lam)


def approx_distill_channel(rho, sigma, eps: float) -> Union[DistillResult, InfiniteDistinguishability]:
    """
    Canal de medida {Λ, I − Λ} con el test óptimo de D_min^ε

    Returns:
        DistillResult(channel, M) con log2 M = D_min^ε(ρ‖σ)
    """
    result = smooth_dmin(rho, sigma, eps)
    if result.value.infinite:
        return InfiniteDistinguishability(f"D_min^ε infinito con ε = {eps}")

    lam, vecs = np.linalg.eigh(result.test.matrix)
    test = (vecs * np.clip(lam, 0.0, 1.0)) @ vecs.conj().T
    d = test.shape[0]
    channel = measure_prepare_channel([test, np.eye(d) - test], _qubit_projectors())
    overlap = float(np.real(np.trace(test @ matrix_of(sigma))))
    return DistillResult(channel, 1.0 / min(max(overlap, np.finfo(float).tiny), 1.0))


# ---------------------------------------------------------------------------
# Estandarización de bits
# ---------------------------------------------------------------------------

def standardize_bits(direction: str, m: int) -> Channel:
    """
    Conversión entre (|0⟩⟨0|^⊗m, π^⊗m) y (|0⟩⟨0|, π_{2^m})

    Args:
        direction: 'compress' (m qubits → 1 qubit) o 'expand' (1 qubit → m qubits)
        m: Número entero de bits ≥ 1

    Returns:
        Canal de medida y preparación
    """
    m = _integer_bits(m)
    D = 2 ** m
    zero_m = np.zeros((D, D), dtype=complex)
    zero_m[0, 0] = 1.0

    if direction == 'compress':
        return measure_prepare_channel([zero_m, np.eye(D) - zero_m], _qubit_projectors())
    if direction == 'expand':
        rest = (np.eye(D) - zero_m) / (D - 1)
        return measure_prepare_channel(_qubit_projectors(), [zero_m, rest])
    raise DomainError(f"Dirección desconocida: {direction}")


def orthogonal_to_bits_channel(m: float) -> Channel:
    """T^m: (|0⟩⟨0|, |1⟩⟨1|) ↦ (|0⟩⟨0|, π_{2^m})"""
    bits = BitsBox(m)
    return measure_prepare_channel(_qubit_projectors(), [basis_state(0, 2).matrix, pi_state(bits.M).matrix])


def impossibility_witness(m: float, n: float) -> ImpossibilityWitness:
    """
    Extensión lineal forzada N(|1⟩⟨1|) de un canal hipotético que lleve
    m bits a n bits fijando |0⟩⟨0|

    Returns:
        ImpossibilityWitness(operador, autovalor mínimo); negativo si n > m
    """
    m, n = float(m), float(n)
    if m <= 0 or n < 0:
        raise DomainError(f"Se requiere m > 0 y n ≥ 0, recibido m={m}, n={n}")
    M, N = 2.0 ** m, 2.0 ** n
    forced = (pi_state(N).matrix - basis_state(0, 2).matrix / M) / (1.0 - 1.0 / M)
    return ImpossibilityWitness(HermitianOperator(forced), min_eigenvalue(forced))


# ---------------------------------------------------------------------------
# Isometrías, ancillas y descarte
# ---------------------------------------------------------------------------

def isometry_inverter(U, tau) -> Channel:
    """
    Canal θ ↦ U†θU + Tr[(I − UU†)θ] τ que invierte la isometría U

    Raises:
        DomainError: si U†U ≠ I
    """
    U = np.asarray(U, dtype=complex)
    d_big, d_small = U.shape
    if float(np.max(np.abs(U.conj().T @ U - np.eye(d_small)))) > Config.TOLERANCES['isometry_tol']:
        raise DomainError("La matriz no es una isometría")
    t = matrix_of(tau)
    if t.shape[0] != d_small:
        raise DimensionError(f"τ debe tener dimensión {d_small}")

    leftover = np.eye(d_big) - U @ U.conj().T
    j = channel_from_kraus([U.conj().T]).choi.matrix + np.kron(leftover.T, t)
    return Channel(d_big, d_small, j)


def appending_channel(d: int, tau) -> Channel:
    """ρ ↦ ρ ⊗ τ"""
    t = matrix_of(tau)
    gamma = np.eye(d, dtype=complex).ravel()
    return Channel(d, d * t.shape[0], np.kron(np.outer(gamma, gamma), t))


def discard_channel(d_keep: int, d_drop: int) -> Channel:
    """ρ_AB ↦ Tr_B ρ_AB"""
    kraus = [np.kron(np.eye(d_keep), ket(j, d_drop).reshape(1, -1)) for j in range(d_drop)]
    return channel_from_kraus(kraus)


# ---------------------------------------------------------------------------
# Reproducción
# ---------------------------------------------------------------------------

def replay(channel: Channel, source: Box, target: Box, metric: str = 'trace_distance') -> ProtocolReport:
    """
    Aplica el canal a la caja fuente y mide los errores frente a la destino

    Args:
        channel: Protocolo a verificar
        source: Caja (ρ, σ)
        target: Caja (τ, ω)
        metric: 'trace_distance' o 'infidelity' para el primer estado

    Returns:
        ProtocolReport con ½‖N(ρ) − τ‖₁ (o 1 − F) y max |N(σ) − ω|
    """
    if channel.dim_in != source.dim or channel.dim_out != target.dim:
        raise DimensionError(f"{channel!r} no conecta {source!r} con {target!r}")
    rho, sigma = source
    tau, omega = target
    out_first = apply(channel, rho)
    out_second = apply(channel, sigma)

    if metric in ('trace_distance', 'trace'):
        error = trace_distance(out_first, tau)
        metric = 'trace_distance'
    elif metric in ('infidelity', 'fid'):
        error = max(0.0, 1.0 - fidelity(out_first, tau))
        metric = 'infidelity'
    else:
        raise DomainError(f"Métrica desconocida: {metric}")

    residual = float(np.max(np.abs(out_second.matrix - omega.matrix)))
    return ProtocolReport(error, residual, metric=metric, channel=channel)


def bridge_protocol(rho, sigma, eps1: float, eps2: float) -> ProtocolReport:
    """
    Dilución (|0⟩⟨0|, π_M) → (ρ̃, σ) con log2 M = D_max^{ε₂}, seguida de
    destilación con log2 K = D_min^{ε₁}

    Returns:
        ProtocolReport del protocolo compuesto; bound_margin es
        log2 M + log2(1/(1 − ε₁ − ε₂)) − log2 K
    """
    eps1, eps2 = float(eps1), float(eps2)
    if eps1 < 0 or eps2 < 0 or eps1 + eps2 >= 1:
        raise DomainError(f"Se requiere ε₁, ε₂ ≥ 0 y ε₁ + ε₂ < 1 (ε₁={eps1}, ε₂={eps2})")

    smoothed = smooth_dmax(rho, sigma, eps2)
    distill = approx_distill_channel(rho, sigma, eps1)
    bits_in = float(smoothed.value)
    bits_out = math.inf if isinstance(distill, InfiniteDistinguishability) else math.log2(distill.M)

    if smoothed.value.infinite or isinstance(distill, InfiniteDistinguishability):
        margin = math.inf if smoothed.value.infinite else -math.inf
        logger.info(f"bridge_protocol: operando infinito (bits_in={bits_in}, bits_out={bits_out})")
        return ProtocolReport(math.nan, math.nan, bits_in, bits_out, bound_margin=margin)

    dilute = exact_dilute_channel(smoothed.smoothed_state, sigma)
    if isinstance(dilute, InfiniteCost):
        logger.warning("bridge_protocol: el estado suavizado escapa del soporte de σ")
        return ProtocolReport(math.nan, math.nan, bits_in, bits_out, bound_margin=math.nan)
    composed = compose(distill.channel, dilute.channel)
    source = BitsBox(dilute.lam).box()
    target = Box(basis_state(0, 2), pi_state(distill.M))
    report = replay(composed, source, target)

    report.bits_in = bits_in
    report.bits_out = bits_out
    report.bound_margin = bits_in + math.log2(1.0 / (1.0 - eps1 - eps2)) - bits_out
    logger.debug(f"bridge_protocol: error={report.first_state_error:.3e} margen={report.bound_margin:.3e}")
    return report
