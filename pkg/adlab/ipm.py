"""
Método de punto interior primal-dual denso (dirección HKM, predictor-corrector)

Forma estándar (todas las matrices reales simétricas):

    primal:  min  Σ_j ⟨C_j, X_j⟩ + c_uᵀu   s.a.  Σ_j ⟨A_ij, X_j⟩ + (B u)_i = b_i,  X_j ⪰ 0
    dual:    max  bᵀy                      s.a.  Σ_i y_i A_ij + Z_j = C_j,  Bᵀy = c_u,  Z_j ⪰ 0

Los escalares no negativos son bloques 1×1. Un solo hilo y orden de
iteración fijo: la misma entrada produce siempre la misma salida.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg

from .config import Config

logger = logging.getLogger(__name__)


@dataclass
class StandardForm:
    """
    Programa cónico en forma estándar

    Args:
        sizes: Tamaño de cada bloque PSD real
        A: Coeficientes por bloque, arrays de forma (m, n_j, n_j)
        B: Coeficientes de las variables libres (m, k)
        b: Lado derecho (m,)
        C: Objetivo por bloque (n_j, n_j)
        c_free: Objetivo de las variables libres (k,)
    """
    sizes: List[int]
    A: List[np.ndarray]
    B: np.ndarray
    b: np.ndarray
    C: List[np.ndarray]
    c_free: np.ndarray

    @property
    def m(self) -> int:
        return int(self.b.size)

    @property
    def n_free(self) -> int:
        return int(self.c_free.size)

    def a_map(self, X: List[np.ndarray]) -> np.ndarray:
        out = np.zeros(self.m)
        for A_j, X_j in zip(self.A, X):
            out += np.einsum('kab,ab->k', A_j, X_j)
        return out

    def a_adjoint(self, y: np.ndarray) -> List[np.ndarray]:
        return [np.einsum('k,kab->ab', y, A_j) for A_j in self.A]


@dataclass
class IpmResult:
    status: str
    X: List[np.ndarray]
    Z: List[np.ndarray]
    y: np.ndarray
    u: np.ndarray
    primal_objective: float
    dual_objective: float
    primal_infeasibility: float
    dual_infeasibility: float
    iterations: int
    history: List[dict] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return abs(self.primal_objective - self.dual_objective)


def _inner(X: List[np.ndarray], Z: List[np.ndarray]) -> float:
    return float(sum(np.sum(x * z) for x, z in zip(X, Z)))


def _sym(K: np.ndarray) -> np.ndarray:
    return 0.5 * (K + K.T)


def _max_step(X: np.ndarray, dX: np.ndarray) -> float:
    """Mayor α con X + α dX ⪰ 0 (infinito si dX no reduce el cono)"""
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    W = scipy.linalg.solve_triangular(L, dX, lower=True)
    W = scipy.linalg.solve_triangular(L, W.T, lower=True)
    lam_min = float(np.linalg.eigvalsh(_sym(W))[0])
    if lam_min >= 0:
        return np.inf
    return -1.0 / lam_min


def _initial_point(sf: StandardForm):
    """Punto inicial infactible al estilo SDPT3 (múltiplos de la identidad)"""
    X, Z = [], []
    for n, A_j, C_j in zip(sf.sizes, sf.A, sf.C):
        norms = np.sqrt(np.einsum('kab,kab->k', A_j, A_j)) if sf.m else np.zeros(0)
        ratio = np.max((1.0 + np.abs(sf.b)) / (1.0 + norms)) if sf.m else 1.0
        xi = max(10.0, np.sqrt(n), n * ratio)
        eta = max(10.0, np.sqrt(n), np.linalg.norm(C_j), np.max(norms) if norms.size else 0.0)
        X.append(xi * np.eye(n))
        Z.append(eta * np.eye(n))
    return X, Z, np.zeros(sf.m), np.zeros(sf.n_free)


def _solve_saddle(M: np.ndarray, B: np.ndarray, h: np.ndarray, r_u: np.ndarray):
    m, k = B.shape
    if k == 0:
        try:
            return np.linalg.solve(M, h), np.zeros(0)
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(M, h, rcond=None)[0], np.zeros(0)

    K = np.zeros((m + k, m + k))
    K[:m, :m] = M
    K[:m, m:] = B
    K[m:, :m] = B.T
    rhs = np.concatenate([h, r_u])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:m], sol[m:]


def solve_standard_form(sf: StandardForm, tol: Optional[float] = None,
                        max_iter: Optional[int] = None) -> IpmResult:
    """
    Resuelve un programa en forma estándar con el método HKM de Mehrotra

    Args:
        sf: Programa en forma estándar
        tol: Tolerancia relativa de parada (brecha e infactibilidades)
        max_iter: Iteraciones máximas

    Returns:
        IpmResult con el mejor iterado encontrado y un estado preliminar
        ('optimal', 'infeasible', 'unbounded' o 'numerical_failure')
    """
    tol = Config.SOLVER['inner_tol'] if tol is None else tol
    max_iter = Config.SOLVER['max_iter'] if max_iter is None else max_iter

    X, Z, y, u = _initial_point(sf)
    n_total = sum(sf.sizes)
    norm_b = np.linalg.norm(sf.b)
    norm_c = np.sqrt(sum(np.sum(c * c) for c in sf.C) + np.sum(sf.c_free ** 2))

    best = None
    best_score = np.inf
    history = []
    status = 'numerical_failure'

    for it in range(max_iter + 1):
        ATy = sf.a_adjoint(y)
        rp = sf.b - sf.a_map(X) - sf.B @ u
        Rd = [c - z - a for c, z, a in zip(sf.C, Z, ATy)]
        r_u = sf.c_free - sf.B.T @ y

        pobj = _inner(sf.C, X) + float(sf.c_free @ u)
        dobj = float(sf.b @ y)
        mu = _inner(X, Z) / n_total

        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(rp) / (1.0 + norm_b)
        dinf = np.sqrt(sum(np.sum(r * r) for r in Rd) + np.sum(r_u ** 2)) / (1.0 + norm_c)

        history.append({'iter': it, 'pobj': pobj, 'dobj': dobj, 'relgap': relgap,
                        'pinf': pinf, 'dinf': dinf, 'mu': mu})
        logger.debug(f"ipm it={it:3d} pobj={pobj:+.10e} dobj={dobj:+.10e} "
                     f"gap={relgap:.2e} pinf={pinf:.2e} dinf={dinf:.2e}")

        score = max(relgap, pinf, dinf)
        if score < best_score:
            best_score = score
            best = ([x.copy() for x in X], [z.copy() for z in Z], y.copy(), u.copy(),
                    pobj, dobj, pinf, dinf, it)

        if score <= tol:
            status = 'optimal'
            break

        # Certificados heurísticos de infactibilidad
        if dobj > 1e8 * (1.0 + norm_c) and pinf > tol:
            status = 'infeasible'
            break
        if pobj < -1e8 * (1.0 + norm_b) and dinf > tol:
            status = 'unbounded'
            break

        if it == max_iter:
            break

        try:
            Zinv = [np.linalg.inv(z) for z in Z]
        except np.linalg.LinAlgError:
            logger.warning("ipm: Z singular, se detiene la iteración")
            break

        # Matriz de Schur M_ik = Tr(A_i X A_k Z⁻¹)
        M = np.zeros((sf.m, sf.m))
        for A_j, X_j, Zi_j in zip(sf.A, X, Zinv):
            G = np.einsum('ab,kbc,cd->kad', X_j, A_j, Zi_j)
            M += np.einsum('iab,kba->ik', A_j, G)
        M = _sym(M)

        def direction(Rc):
            h = rp - sf.a_map(Rc) + sf.a_map([x @ r @ zi for x, r, zi in zip(X, Rd, Zinv)])
            dy, du = _solve_saddle(M, sf.B, h, r_u)
            ATdy = sf.a_adjoint(dy)
            dZ = [r - a for r, a in zip(Rd, ATdy)]
            dX = [rc - _sym(x @ dz @ zi) for rc, x, dz, zi in zip(Rc, X, dZ, Zinv)]
            return dX, dy, du, dZ

        def steps(dX, dZ):
            ap = min([_max_step(x, d) for x, d in zip(X, dX)] + [np.inf])
            ad = min([_max_step(z, d) for z, d in zip(Z, dZ)] + [np.inf])
            return ap, ad

        # Predictor
        dX, dy, du, dZ = direction([-x for x in X])
        ap, ad = steps(dX, dZ)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = _inner([x + ap * d for x, d in zip(X, dX)],
                        [z + ad * d for z, d in zip(Z, dZ)]) / n_total
        expon = max(1.0, 3.0 * min(ap, ad) ** 2)
        sigma = min(1.0, (max(mu_aff, 0.0) / mu) ** expon) if mu > 0 else 0.0

        # Corrector
        Rc = [sigma * mu * zi - x - _sym(dx @ dz @ zi)
              for zi, x, dx, dz in zip(Zinv, X, dX, dZ)]
        gamma = 0.9 + 0.09 * min(ap, ad)
        dX, dy, du, dZ = direction(Rc)
        ap, ad = steps(dX, dZ)
        ap, ad = min(1.0, gamma * ap), min(1.0, gamma * ad)

        if ap < 1e-10 and ad < 1e-10:
            logger.debug("ipm: paso nulo, estancado")
            break

        X = [_sym(x + ap * d) for x, d in zip(X, dX)]
        u = u + ap * du
        y = y + ad * dy
        Z = [_sym(z + ad * d) for z, d in zip(Z, dZ)]

    X, Z, y, u, pobj, dobj, pinf, dinf, it = best
    return IpmResult(status, X, Z, y, u, pobj, dobj, pinf, dinf, it, history)
