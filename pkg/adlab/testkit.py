"""
Generadores aleatorios con semilla y oráculos clásicos independientes
(Neyman–Pearson exacto, programación lineal, barrido de suavizados)
"""

import itertools
import logging
import math
from typing import Iterator, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linprog
from scipy.special import gammaln, logsumexp

from .errors import DomainError, NumericalFailure
from .linalg import Box, Channel, State, channel_from_kraus, matrix_of

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]


# ---------------------------------------------------------------------------
# Semillas
# ---------------------------------------------------------------------------

def rng_for(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Generador de la instancia `index`; depende solo de (seed, index)"""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def seed_stream(seed: int) -> Iterator[np.random.Generator]:
    """Flujo infinito de generadores independientes derivados de la semilla"""
    for index in itertools.count():
        yield instance_rng(seed, index)


# ---------------------------------------------------------------------------
# Instancias aleatorias
# ---------------------------------------------------------------------------

def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_state(dim: int, rank: Optional[int] = None, seed: SeedLike = None) -> State:
    """
    Estado aleatorio ρ = GG†/Tr[GG†] con G gaussiana compleja dim×rank

    Args:
        dim: Dimensión
        rank: Rango (por defecto dim)
        seed: Semilla o Generator
    """
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise DomainError(f"Rango {rank} fuera de [1, {dim}]")
    g = _ginibre(rng_for(seed), dim, rank)
    m = g @ g.conj().T
    return State(m / np.real(np.trace(m)))


def random_unitary(dim: int, seed: SeedLike = None) -> np.ndarray:
    """Unitaria de Haar por QR con corrección de fases"""
    q, r = np.linalg.qr(_ginibre(rng_for(seed), dim, dim))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_isometry(dim_in: int, dim_out: int, seed: SeedLike = None) -> np.ndarray:
    if dim_out < dim_in:
        raise DomainError(f"No existe isometría {dim_in}→{dim_out}")
    return random_unitary(dim_out, seed)[:, :dim_in]


def random_channel(dim_in: int, dim_out: int, env_dim: Optional[int] = None, seed: SeedLike = None) -> Channel:
    """
    Canal aleatorio por dilatación isométrica y traza parcial del entorno

    Args:
        env_dim: Dimensión del entorno (1 da un canal isométrico)
    """
    env_dim = dim_in * dim_out if env_dim is None else int(env_dim)
    if env_dim < 1 or dim_out * env_dim < dim_in:
        raise DomainError(f"Entorno {env_dim} insuficiente para {dim_in}→{dim_out}")
    V = random_isometry(dim_in, dim_out * env_dim, seed).reshape(dim_out, env_dim, dim_in)
    return channel_from_kraus([V[:, e, :] for e in range(env_dim)])


def random_box(dim: int, seed: SeedLike = None, rank: Optional[int] = None) -> Box:
    rng = rng_for(seed)
    return Box(random_state(dim, rank, rng), random_state(dim, None, rng))


def random_classical_box(dim: int, seed: SeedLike = None) -> Box:
    """Caja diagonal con distribuciones de Dirichlet estrictamente positivas"""
    rng = rng_for(seed)
    p = rng.dirichlet(np.ones(dim))
    q = rng.dirichlet(np.ones(dim))
    return Box(np.diag(p), np.diag(q))


# ---------------------------------------------------------------------------
# Oráculos clásicos
# ---------------------------------------------------------------------------

def _check_distributions(p, q, max_len: int = 4):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1 or not 2 <= p.size <= max_len:
        raise DomainError(f"Se esperaban dos distribuciones de igual longitud en [2, {max_len}]")
    if np.any(p <= 0) or np.any(q <= 0):
        raise DomainError("Las distribuciones deben ser estrictamente positivas")
    if abs(p.sum() - 1) > 1e-12 or abs(q.sum() - 1) > 1e-12:
        raise DomainError("Las distribuciones deben sumar 1")
    return p, q


def _compositions(n: int, k: int) -> np.ndarray:
    """Todas las k-uplas de enteros ≥ 0 que suman n"""
    if k == 2:
        t = np.arange(n + 1)
        return np.stack([t, n - t], axis=1)
    out = []
    for first in range(n + 1):
        rest = _compositions(n - first, k - 1)
        out.append(np.hstack([np.full((rest.shape[0], 1), first), rest]))
    return np.vstack(out)


def _neyman_pearson(log_p: np.ndarray, log_q: np.ndarray, eps: float) -> float:
    """
    −log2 del mínimo error de tipo II con error de tipo I ≤ ε, sobre clases
    (de secuencias o de tipos) con probabilidades log_p, log_q

    Incluye las clases por razón de verosimilitud decreciente y completa con
    una fracción de la clase frontera (test aleatorizado).
    """
    ratio = log_p - log_q
    order = np.lexsort((np.arange(ratio.size), -ratio))
    log_p, log_q = log_p[order], log_q[order]

    target = 1.0 - eps
    cum = np.cumsum(np.exp(log_p))
    j = int(np.searchsorted(cum, target, side='left'))
    j = min(j, cum.size - 1)
    before = cum[j - 1] if j > 0 else 0.0
    frac = min(1.0, max(0.0, (target - before) / math.exp(log_p[j])))

    terms = list(log_q[:j])
    if frac > 0:
        terms.append(math.log(frac) + log_q[j])
    if not terms:
        return math.inf
    return -float(logsumexp(terms)) / math.log(2.0)


def classical_dmin_eps_exact(p: Sequence[float], q: Sequence[float], eps: float, n: int) -> float:
    """
    D_min^ε(p^⊗n‖q^⊗n) exacto por agregación en clases de tipos

    Args:
        p, q: Distribuciones estrictamente positivas (hasta 4 resultados)
        eps: Error de tipo I en [0, 1)
        n: Número de copias (≤ 5000 para binarias)

    Returns:
        Valor en bits
    """
    p, q = _check_distributions(p, q)
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"ε fuera de [0, 1): {eps}")
    if n < 1 or (p.size == 2 and n > 5000):
        raise DomainError(f"n fuera de rango: {n}")
    if p.size > 2 and math.comb(n + p.size - 1, p.size - 1) > 500000:
        raise DomainError(f"Demasiadas clases de tipos para n={n}, k={p.size}")

    types = _compositions(int(n), p.size)
    log_count = gammaln(n + 1) - np.sum(gammaln(types + 1), axis=1)
    log_p = log_count + types @ np.log(p)
    log_q = log_count + types @ np.log(q)
    return _neyman_pearson(log_p, log_q, eps)


def classical_dmin_eps_enumerate(p: Sequence[float], q: Sequence[float], eps: float, n: int) -> float:
    """D_min^ε(p^⊗n‖q^⊗n) por enumeración directa de las k^n secuencias (n ≤ 16)"""
    p, q = _check_distributions(p, q)
    if not 1 <= n <= 16:
        raise DomainError(f"La enumeración directa admite 1 ≤ n ≤ 16, recibido {n}")
    seqs = np.array(list(itertools.product(range(p.size), repeat=n)))
    log_p = np.sum(np.log(p)[seqs], axis=1)
    log_q = np.sum(np.log(q)[seqs], axis=1)
    return _neyman_pearson(log_p, log_q, eps)


def _diagonal(state, name: str) -> np.ndarray:
    m = matrix_of(state)
    off = m - np.diag(np.diag(m))
    if np.max(np.abs(off)) > 1e-12:
        raise DomainError(f"{name} no es diagonal")
    return np.real(np.diag(m))


def classical_box_error_exact(source: Box, target: Box) -> float:
    """
    Error mínimo de transformación entre cajas diagonales por programación
    lineal sobre matrices estocásticas por columnas

    min Σu  s.a.  u ≥ t − Tp,  Tq = w,  1ᵀT = 1ᵀ,  T, u ≥ 0
    """
    p = _diagonal(source.first, 'ρ')
    q = _diagonal(source.second, 'σ')
    t = _diagonal(target.first, 'τ')
    w = _diagonal(target.second, 'ω')
    d_in, d_out = p.size, t.size
    n_t = d_out * d_in

    # variables: T fila a fila (T[i, j] en i*d_in + j), luego u
    c = np.concatenate([np.zeros(n_t), np.ones(d_out)])
    A_ub = np.zeros((d_out, n_t + d_out))
    for i in range(d_out):
        A_ub[i, i * d_in:(i + 1) * d_in] = -p
        A_ub[i, n_t + i] = -1.0
    b_ub = -t

    A_eq = np.zeros((d_out + d_in, n_t + d_out))
    for i in range(d_out):
        A_eq[i, i * d_in:(i + 1) * d_in] = q
    for j in range(d_in):
        A_eq[d_out + j, j:n_t:d_in] = 1.0
    b_eq = np.concatenate([w, np.ones(d_in)])

    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method='highs')
    if res.status != 0:
        raise NumericalFailure(f"linprog terminó con estado {res.status}: {res.message}")
    return float(min(1.0, max(0.0, res.fun)))


def classical_smooth_dmax_grid(p: Sequence[float], q: Sequence[float], eps: float, points: int = 2001) -> float:
    """
    D_max^ε para un par clásico binario por barrido sobre suavizados (x, 1 − x)
    con |x − p₀| ≤ ε
    """
    p, q = _check_distributions(p, q, max_len=2)
    lo, hi = max(0.0, p[0] - eps), min(1.0, p[0] + eps)
    grid = np.linspace(lo, hi, int(points))
    grid = np.append(grid, min(hi, max(lo, q[0])))
    values = np.maximum(grid / q[0], (1.0 - grid) / q[1])
    return float(math.log2(np.min(values)))
