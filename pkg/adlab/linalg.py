"""
Álgebra lineal hermítica densa y mecánica de canales (representación de Choi)

Convención de Choi: J = Σ_{a,a'} |a⟩⟨a'| ⊗ N(|a⟩⟨a'|), con la entrada primero.
Así N(ρ) = Tr_R[(ρᵀ ⊗ I) J] y Tr_B J = I para canales que preservan la traza.
"""

import logging
from typing import Sequence, Tuple, Union

import numpy as np

from .config import Config
from .errors import DimensionError, DomainError, NumericalFailure

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence]


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex, copy=True)
    m.setflags(write=False)
    return m


class HermitianOperator:
    """
    Operador hermítico denso e inmutable

    La simetrización (A + A†)/2 se aplica al construir, de modo que
    entries[i][j] == conj(entries[j][i]) exactamente.
    """

    __slots__ = ('_m',)

    def __init__(self, entries: ArrayLike):
        m = np.asarray(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"Se esperaba una matriz cuadrada, recibido shape={m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("La matriz contiene NaN o infinitos")
        self._m = _frozen((m + m.conj().T) / 2)

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Matriz (solo lectura)"""
        return self._m

    def trace(self) -> float:
        return float(np.real(np.trace(self._m)))

    def __add__(self, other):
        return HermitianOperator(self._m + matrix_of(other))

    def __sub__(self, other):
        return HermitianOperator(self._m - matrix_of(other))

    def __mul__(self, scalar: float):
        return HermitianOperator(self._m * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


class State:
    """
    Estado cuántico: operador hermítico PSD de traza uno

    Args:
        entries: Matriz densa (o HermitianOperator)
        psd_tol: Autovalor mínimo admitido (por defecto Config)
        trace_tol: Desviación de traza admitida (por defecto Config)
    """

    __slots__ = ('base',)

    def __init__(self, entries, psd_tol: float = None, trace_tol: float = None):
        base = entries if isinstance(entries, HermitianOperator) else HermitianOperator(matrix_of(entries))
        psd_tol = Config.TOLERANCES['psd_tol'] if psd_tol is None else psd_tol
        trace_tol = Config.TOLERANCES['trace_tol'] if trace_tol is None else trace_tol

        tr = base.trace()
        if abs(tr - 1.0) > trace_tol:
            raise DomainError(f"Traza {tr:.3e} fuera de 1 ± {trace_tol:g}")
        lam_min = float(np.linalg.eigvalsh(base.matrix)[0])
        if lam_min < -psd_tol:
            raise DomainError(f"Autovalor mínimo {lam_min:.3e} < −{psd_tol:g}")
        self.base = base

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.base.matrix

    def __repr__(self) -> str:
        return f"State(dim={self.dim})"


class Channel:
    """
    Canal cuántico (CPTP) en representación de Choi

    Args:
        dim_in: Dimensión de entrada
        dim_out: Dimensión de salida
        choi: Operador de Choi J_RB de dimensión dim_in·dim_out
    """

    __slots__ = ('dim_in', 'dim_out', 'choi')

    def __init__(self, dim_in: int, dim_out: int, choi):
        choi = choi if isinstance(choi, HermitianOperator) else HermitianOperator(choi)
        if dim_in < 1 or dim_out < 1 or choi.dim != dim_in * dim_out:
            raise DimensionError(
                f"Choi de dimensión {choi.dim} incompatible con {dim_in}→{dim_out}"
            )

        scale = max(1.0, float(np.max(np.abs(choi.matrix))))
        lam_min = float(np.linalg.eigvalsh(choi.matrix)[0])
        if lam_min < -Config.TOLERANCES['psd_tol'] * scale:
            raise DomainError(f"Choi no PSD (autovalor mínimo {lam_min:.3e})")

        t = partial_trace(choi, (dim_in, dim_out), keep='A').matrix
        drift = float(np.max(np.abs(t - np.eye(dim_in))))
        if drift > Config.TOLERANCES['choi_tp_tol']:
            raise DomainError(f"El canal no preserva la traza (desvío {drift:.3e})")

        self.dim_in = dim_in
        self.dim_out = dim_out
        self.choi = choi

    def __repr__(self) -> str:
        return f"Channel({self.dim_in}→{self.dim_out})"


class Box:
    """Par ordenado de estados de igual dimensión (ρ, σ)"""

    __slots__ = ('first', 'second')

    def __init__(self, first: State, second: State):
        if not isinstance(first, State):
            first = State(first)
        if not isinstance(second, State):
            second = State(second)
        if first.dim != second.dim:
            raise DimensionError(f"Caja con dimensiones distintas: {first.dim} y {second.dim}")
        self.first = first
        self.second = second

    @property
    def dim(self) -> int:
        return self.first.dim

    def __iter__(self):
        yield self.first
        yield self.second

    def __repr__(self) -> str:
        return f"Box(dim={self.dim})"


def matrix_of(x) -> np.ndarray:
    """Devuelve la matriz densa de un State, HermitianOperator o array"""
    if isinstance(x, (State, HermitianOperator)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def check_same_dim(*ops):
    dims = {matrix_of(o).shape[0] for o in ops}
    if len(dims) != 1:
        raise DimensionError(f"Dimensiones incompatibles: {sorted(dims)}")


# ---------------------------------------------------------------------------
# Espectro y funciones matriciales
# ---------------------------------------------------------------------------

def eigh(A) -> Tuple[np.ndarray, np.ndarray]:
    """
    Descomposición espectral con autovalores en orden descendente

    Args:
        A: Operador hermítico

    Returns:
        Tupla (autovalores reales descendentes, autovectores en columnas)
    """
    m = matrix_of(A)
    try:
        lam, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"eigh no convergió: {e}") from e
    return lam[::-1].copy(), vecs[:, ::-1].copy()


def _support_mask(lam: np.ndarray, rank_tol: float) -> np.ndarray:
    lam_max = float(np.max(lam)) if lam.size else 0.0
    if lam_max <= 0:
        return np.zeros(lam.shape, dtype=bool)
    return lam > rank_tol * lam_max


def support_projector(rho, rank_tol: float = None) -> HermitianOperator:
    """
    Proyector sobre el soporte de ρ

    Args:
        rho: Estado u operador PSD
        rank_tol: Corte relativo respecto de λ_max

    Returns:
        Proyector Π con rank(Π) = #{λ > rank_tol·λ_max}
    """
    rank_tol = Config.TOLERANCES['rank_tol'] if rank_tol is None else rank_tol
    lam, vecs = eigh(rho)
    mask = _support_mask(lam, rank_tol)
    v = vecs[:, mask]
    return HermitianOperator(v @ v.conj().T)


def support_isometry(rho, rank_tol: float = None) -> np.ndarray:
    """Columnas ortonormales (d × rank) que generan el soporte de ρ"""
    rank_tol = Config.TOLERANCES['rank_tol'] if rank_tol is None else rank_tol
    lam, vecs = eigh(rho)
    return vecs[:, _support_mask(lam, rank_tol)]


def rank(rho, rank_tol: float = None) -> int:
    rank_tol = Config.TOLERANCES['rank_tol'] if rank_tol is None else rank_tol
    lam, _ = eigh(rho)
    return int(np.count_nonzero(_support_mask(lam, rank_tol)))


def matrix_fn(A, fn, support_only: bool = True, rank_tol: float = None) -> HermitianOperator:
    """
    Aplica una función escalar a los autovalores de A

    Args:
        A: Operador hermítico PSD
        fn: 'log2' o ('pow', t)
        support_only: Aplicar solo sobre autovalores > rank_tol·λ_max (cero fuera)
        rank_tol: Corte relativo del soporte

    Returns:
        V fn(diag(λ)) V†
    """
    rank_tol = Config.TOLERANCES['rank_tol'] if rank_tol is None else rank_tol
    lam, vecs = eigh(A)
    lam = np.clip(lam, 0.0, None)

    if fn == 'log2':
        kind, t = 'log2', None
    elif isinstance(fn, tuple) and len(fn) == 2 and fn[0] == 'pow':
        kind, t = 'pow', float(fn[1])
    else:
        raise DomainError(f"Función matricial desconocida: {fn!r}")

    singular = kind == 'log2' or t < 0
    if support_only:
        mask = _support_mask(lam, rank_tol)
    elif singular:
        if np.any(lam <= 0):
            raise DomainError(f"{kind} de un operador con autovalor nulo fuera del soporte")
        mask = np.ones(lam.shape, dtype=bool)
    else:
        mask = np.ones(lam.shape, dtype=bool)

    out = np.zeros_like(lam)
    if kind == 'log2':
        out[mask] = np.log2(lam[mask])
    elif t == 0:
        out[mask] = 1.0
    else:
        out[mask] = np.power(lam[mask], t)
    return HermitianOperator((vecs * out) @ vecs.conj().T)


def log2m(A, support_only: bool = True) -> HermitianOperator:
    return matrix_fn(A, 'log2', support_only)


def powm(A, t: float, support_only: bool = True) -> HermitianOperator:
    return matrix_fn(A, ('pow', t), support_only)


def sqrtm_psd(A) -> np.ndarray:
    """Raíz cuadrada de un operador PSD (autovalores negativos recortados a cero)"""
    lam, vecs = eigh(A)
    return (vecs * np.sqrt(np.clip(lam, 0.0, None))) @ vecs.conj().T


def trace_norm(A) -> float:
    """‖A‖₁ para A hermítico"""
    return float(np.sum(np.abs(np.linalg.eigvalsh(matrix_of(A)))))


def is_psd(A, tol: float = None) -> bool:
    tol = Config.TOLERANCES['psd_tol'] if tol is None else tol
    return float(np.linalg.eigvalsh(matrix_of(A))[0]) >= -tol


def min_eigenvalue(A) -> float:
    return float(np.linalg.eigvalsh(matrix_of(A))[0])


# ---------------------------------------------------------------------------
# Sistemas compuestos
# ---------------------------------------------------------------------------

def partial_trace(X, dims: Tuple[int, int], keep: str = 'A') -> HermitianOperator:
    """
    Traza parcial sobre un sistema bipartito A⊗B

    Args:
        X: Operador sobre A⊗B
        dims: (dim_A, dim_B)
        keep: Subsistema que se conserva ('A' o 'B')

    Returns:
        Operador reducido
    """
    m = matrix_of(X)
    d_a, d_b = int(dims[0]), int(dims[1])
    if d_a < 1 or d_b < 1 or d_a * d_b != m.shape[0]:
        raise DimensionError(f"Dimensión {m.shape[0]} no factoriza como {d_a}·{d_b}")
    t = m.reshape(d_a, d_b, d_a, d_b)
    if keep.upper() == 'A':
        return HermitianOperator(np.einsum('ijkj->ik', t))
    if keep.upper() == 'B':
        return HermitianOperator(np.einsum('ijil->jl', t))
    raise DomainError(f"Subsistema desconocido: {keep!r}")


def tensor(*ops):
    """
    Producto tensorial (Kronecker) de operadores

    Returns:
        State si todos los factores son estados, HermitianOperator en otro caso
    """
    if not ops:
        raise DomainError("tensor() requiere al menos un factor")
    m = matrix_of(ops[0])
    for op in ops[1:]:
        m = np.kron(m, matrix_of(op))
    if all(isinstance(op, State) for op in ops):
        return State(m, trace_tol=max(Config.TOLERANCES['trace_tol'], 1e-10 * len(ops)))
    return HermitianOperator(m)


def tensor_power(rho, n: int):
    if n < 1:
        raise DomainError(f"Potencia tensorial inválida: {n}")
    return tensor(*([rho] * n))


def pinch(rho, sigma, degeneracy_tol: float = None) -> Tuple[State, int]:
    """
    Canal de pinching respecto de los autoespacios de σ

    Args:
        rho: Estado a pinchar
        sigma: Estado que define los autoespacios
        degeneracy_tol: Agrupación relativa de autovalores (respecto de λ_max)

    Returns:
        Tupla (E_σ(ρ), número de autovalores distintos de σ incluyendo el cero)
    """
    check_same_dim(rho, sigma)
    degeneracy_tol = Config.TOLERANCES['degeneracy_tol'] if degeneracy_tol is None else degeneracy_tol

    lam, vecs = eigh(sigma)
    scale = max(float(np.max(np.abs(lam))), np.finfo(float).tiny)

    groups = []
    start = 0
    for i in range(1, lam.size + 1):
        if i == lam.size or abs(lam[i] - lam[start]) > degeneracy_tol * scale:
            groups.append((start, i))
            start = i

    r = matrix_of(rho)
    out = np.zeros_like(r)
    for lo, hi in groups:
        v = vecs[:, lo:hi]
        proj = v @ v.conj().T
        out += proj @ r @ proj

    logger.debug(f"pinch: {len(groups)} autoespacios en dimensión {lam.size}")
    return State(out), len(groups)


# ---------------------------------------------------------------------------
# Estados de referencia
# ---------------------------------------------------------------------------

def ket(i: int, d: int) -> np.ndarray:
    if not 0 <= i < d:
        raise DimensionError(f"Índice {i} fuera de la dimensión {d}")
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def basis_state(i: int, d: int) -> State:
    v = ket(i, d)
    return State(np.outer(v, v.conj()))


def pure_state(psi: ArrayLike) -> State:
    v = np.asarray(psi, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return State(np.outer(v, v.conj()))


def maximally_mixed(d: int) -> State:
    return State(np.eye(d) / d)


def pi_state(M: float) -> State:
    """
    π_M = (1/M)|0⟩⟨0| + (1−1/M)|1⟩⟨1|, con M ≥ 1 real

    π_2 es el estado maximalmente mezclado de un qubit.
    """
    M = float(M)
    if not np.isfinite(M) or M < 1.0:
        raise DomainError(f"π_M requiere M ≥ 1, recibido {M}")
    return State(np.diag([1.0 / M, 1.0 - 1.0 / M]))


# ---------------------------------------------------------------------------
# Canales
# ---------------------------------------------------------------------------

def _reshape_choi(channel: Channel) -> np.ndarray:
    d_in, d_out = channel.dim_in, channel.dim_out
    return channel.choi.matrix.reshape(d_in, d_out, d_in, d_out)


def apply_operator(channel: Channel, X) -> HermitianOperator:
    """Aplica el canal a un operador hermítico arbitrario (extensión lineal)"""
    m = matrix_of(X)
    if m.shape[0] != channel.dim_in:
        raise DimensionError(f"Entrada de dimensión {m.shape[0]}, el canal espera {channel.dim_in}")
    return HermitianOperator(np.einsum('aA,acAC->cC', m, _reshape_choi(channel)))


def apply(channel: Channel, rho) -> State:
    """
    Aplica el canal a un estado: N(ρ) = Tr_R[(ρᵀ ⊗ I) J]

    Args:
        channel: Canal en representación de Choi
        rho: Estado de entrada (dim = dim_in)

    Returns:
        Estado de salida
    """
    out = apply_operator(channel, rho)
    return State(out, trace_tol=max(Config.TOLERANCES['trace_tol'], Config.TOLERANCES['choi_tp_tol']))


def compose(outer: Channel, inner: Channel) -> Channel:
    """
    Composición outer∘inner mediante el producto de enlace de los Choi

    Args:
        outer: Canal aplicado en segundo lugar
        inner: Canal aplicado primero

    Returns:
        Canal compuesto
    """
    if inner.dim_out != outer.dim_in:
        raise DimensionError(f"No se puede componer {inner!r} con {outer!r}")
    j = np.einsum('abAB,bcBC->acAC', _reshape_choi(inner), _reshape_choi(outer))
    d = inner.dim_in * outer.dim_out
    return Channel(inner.dim_in, outer.dim_out, j.reshape(d, d))


def identity_channel(d: int) -> Channel:
    gamma = np.eye(d, dtype=complex).ravel()
    return Channel(d, d, np.outer(gamma, gamma))


def replacer_channel(dim_in: int, tau) -> Channel:
    """Canal que descarta la entrada y prepara τ"""
    t = matrix_of(tau)
    return Channel(dim_in, t.shape[0], np.kron(np.eye(dim_in), t))


def measure_prepare_channel(povm: Sequence, outputs: Sequence) -> Channel:
    """
    Canal de medida y preparación ω ↦ Σ_x Tr[E_x ω] ω_x

    Args:
        povm: Elementos E_x (deben sumar la identidad)
        outputs: Estados ω_x preparados para cada resultado

    Returns:
        Canal con Choi Σ_x E_xᵀ ⊗ ω_x
    """
    if len(povm) != len(outputs) or not povm:
        raise DimensionError("POVM y salidas deben tener la misma longitud")
    d_in = matrix_of(povm[0]).shape[0]
    d_out = matrix_of(outputs[0]).shape[0]
    j = sum(np.kron(matrix_of(e).T, matrix_of(w)) for e, w in zip(povm, outputs))
    return Channel(d_in, d_out, j)


def channel_from_kraus(kraus: Sequence) -> Channel:
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    d_out, d_in = ops[0].shape
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k in ops:
        v = k.T.ravel()
        j += np.outer(v, v.conj())
    return Channel(d_in, d_out, j)


def isometry_channel(U: ArrayLike) -> Channel:
    """Canal isométrico θ ↦ UθU†"""
    return channel_from_kraus([np.asarray(U, dtype=complex)])


def channel_from_choi(choi: ArrayLike, dim_in: int, dim_out: int, sanitize: bool = False) -> Channel:
    """
    Construye un canal a partir de un Choi, opcionalmente saneándolo

    El saneado simetriza, recorta autovalores negativos y restaura la
    preservación de traza con (T^{-1/2} ⊗ I) J (T^{-1/2} ⊗ I), T = Tr_B J.

    Args:
        choi: Matriz de Choi
        dim_in: Dimensión de entrada
        dim_out: Dimensión de salida
        sanitize: Aplicar el saneado (para Choi extraídos de un solver)

    Returns:
        Canal válido
    """
    j = matrix_of(choi)
    if not sanitize:
        return Channel(dim_in, dim_out, j)

    original = (j + j.conj().T) / 2
    lam, vecs = np.linalg.eigh(original)
    fixed = (vecs * np.clip(lam, 0.0, None)) @ vecs.conj().T

    t = partial_trace(fixed, (dim_in, dim_out), keep='A').matrix
    t_lam, t_vecs = np.linalg.eigh(t)
    if np.min(t_lam) <= 0:
        raise NumericalFailure("Choi extraído con traza parcial singular")
    t_inv_sqrt = (t_vecs / np.sqrt(t_lam)) @ t_vecs.conj().T
    left = np.kron(t_inv_sqrt, np.eye(dim_out))
    fixed = left @ fixed @ left.conj().T

    drift = float(np.max(np.abs(fixed - original)))
    if drift > Config.SOLVER['channel_drift']:
        logger.warning(f"Saneado del Choi con deriva {drift:.2e} > {Config.SOLVER['channel_drift']:g}")
    else:
        logger.debug(f"Saneado del Choi con deriva {drift:.2e}")
    return Channel(dim_in, dim_out, fixed)
