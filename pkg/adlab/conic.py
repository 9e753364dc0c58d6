"""
Capa de modelado cónico: variables hermíticas PSD, escalares libres y no
negativos, restricciones lineales escalares y matriciales, realificación
y despacho al solver (IPM propio o adaptador cvxpy).

Las restricciones matriciales L(X) = R se imponen contra una base hermítica
ortonormal E_k de la dimensión de salida: Tr[E_k L(X)] = Tr[E_k R].
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import Config
from .errors import DomainError
from .ipm import IpmResult, StandardForm, solve_standard_form

logger = logging.getLogger(__name__)

STATUSES = ('optimal', 'infeasible', 'unbounded', 'numerical_failure')


# ---------------------------------------------------------------------------
# Realificación
# ---------------------------------------------------------------------------

def realify(X) -> np.ndarray:
    """
    Embebe una matriz hermítica compleja d×d en una simétrica real 2d×2d

    X ⪰ 0  ⇔  [[Re X, −Im X], [Im X, Re X]] ⪰ 0
    """
    X = np.asarray(X, dtype=complex)
    re, im = X.real, X.imag
    return np.block([[re, -im], [im, re]])


def derealify(Y: np.ndarray) -> np.ndarray:
    """
    Inversa de realify; acepta bloques reales sin la estructura del embebido
    (proyecta sobre ella)
    """
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0] // 2
    re = 0.5 * (Y[:n, :n] + Y[n:, n:])
    im = 0.5 * (Y[n:, :n] - Y[:n, n:])
    X = re + 1j * im
    return 0.5 * (X + X.conj().T)


def realify_functional(F) -> np.ndarray:
    """
    Coeficiente real G tal que Tr[G realify(X)] = Re Tr[F X]

    El factor ½ compensa la duplicación de la traza del embebido.
    """
    F = np.asarray(F, dtype=complex)
    F = 0.5 * (F + F.conj().T)
    return 0.5 * realify(F)


@functools.lru_cache(maxsize=1)
def cvxpy_available() -> bool:
    """True si cvxpy se puede importar"""
    try:
        import cvxpy  # noqa: F401
    except ImportError:
        return False
    return True


@functools.lru_cache(maxsize=64)
def _hermitian_basis(n: int) -> np.ndarray:
    basis = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    s = 1.0 / math.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = E[j, i] = s
            basis.append(E)
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1j * s
            E[j, i] = -1j * s
            basis.append(E)
    out = np.array(basis)
    out.setflags(write=False)
    return out


def hermitian_basis(n: int) -> np.ndarray:
    """Base ortonormal (Tr[E_k E_l] = δ_kl) de las matrices hermíticas n×n, forma (n², n, n)"""
    return _hermitian_basis(int(n))


# ---------------------------------------------------------------------------
# Variables y expresiones
# ---------------------------------------------------------------------------

class PsdVar:
    """Bloque PSD hermítico complejo (o simétrico real si complex=False)"""

    def __init__(self, index: int, name: str, n: int, is_complex: bool):
        self.index = index
        self.name = name
        self.n = n
        self.is_complex = is_complex

    @property
    def real_size(self) -> int:
        return 2 * self.n if self.is_complex else self.n

    def __repr__(self):
        return f"PsdVar({self.name}, n={self.n}, complex={self.is_complex})"


class FreeVar:
    def __init__(self, index: int, name: str):
        self.index = index
        self.name = name

    def __repr__(self):
        return f"FreeVar({self.name})"


class HermVar:
    """Matriz hermítica libre X = Σ_g u_g G_g sobre la base ortonormal"""

    def __init__(self, name: str, n: int, components: List[FreeVar]):
        self.name = name
        self.n = n
        self.components = components

    def __repr__(self):
        return f"HermVar({self.name}, n={self.n})"


Var = Union[PsdVar, FreeVar, HermVar]


class Affine:
    """
    Expresión afín escalar real

    Para variables matriciales el coeficiente F representa Re Tr[F X];
    para escalares libres es un real.
    """

    def __init__(self, terms: Optional[dict] = None, const: float = 0.0):
        self.terms = dict(terms or {})
        self.const = float(const)

    @staticmethod
    def _coerce(other) -> 'Affine':
        if isinstance(other, Affine):
            return other
        if isinstance(other, FreeVar) or (isinstance(other, PsdVar) and other.n == 1 and not other.is_complex):
            return scalar(other)
        return Affine(const=float(other))

    def __add__(self, other):
        other = Affine._coerce(other)
        terms = dict(self.terms)
        for var, coef in other.terms.items():
            terms[var] = terms[var] + coef if var in terms else coef
        return Affine(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return Affine({v: -c for v, c in self.terms.items()}, -self.const)

    def __sub__(self, other):
        return self + (-Affine._coerce(other))

    def __rsub__(self, other):
        return Affine._coerce(other) + (-self)

    def __mul__(self, scalar: float):
        s = float(scalar)
        return Affine({v: c * s for v, c in self.terms.items()}, self.const * s)

    __rmul__ = __mul__


def tr(F, X: Union[PsdVar, HermVar]) -> Affine:
    """Re Tr[F X]"""
    return Affine({X: np.asarray(F, dtype=complex)})


def trace(X: Union[PsdVar, HermVar]) -> Affine:
    return tr(np.eye(X.n), X)


def scalar(u: Union[FreeVar, PsdVar], coef: float = 1.0) -> Affine:
    """Expresión coef·u para un escalar libre o no negativo"""
    if isinstance(u, PsdVar):
        return Affine({u: np.full((1, 1), float(coef), dtype=complex)})
    return Affine({u: float(coef)})


MatrixMap = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, None]


@dataclass
class _Group:
    name: str
    rows: List[int]
    kind: str                       # 'scalar' o 'matrix'
    dim: int = 1


@dataclass
class Layout:
    psd: List[PsdVar]
    free: List[FreeVar]
    herm: List[HermVar]
    groups: List[_Group]
    sign: float
    const: float
    kept_rows: np.ndarray
    m_total: int


@dataclass
class SolveResult:
    """
    Resultado de un solve con certificado de brecha

    Args:
        status: 'optimal', 'infeasible', 'unbounded' o 'numerical_failure'
        primal_value: Valor del programa tal como fue modelado (min o max)
        dual_value: Valor del dual
        gap: |primal − dual|
        primal_solution: nombre de variable → matriz o escalar
        dual_solution: nombre de restricción o bloque → multiplicador
    """
    status: str
    primal_value: float
    dual_value: float
    gap: float
    primal_solution: Dict[str, object] = field(default_factory=dict)
    dual_solution: Dict[str, object] = field(default_factory=dict)
    backend: str = 'ipm'
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == 'optimal'


class ConicProgram:
    """
    Programa semidefinido sobre bloques hermíticos

    Ejemplo:
        p = ConicProgram('traza', sense='max')
        L = p.hermitian_psd('Lambda', d)
        S = p.hermitian_psd('S', d)
        p.add_matrix_equality([(L, None), (S, None)], np.eye(d), 'Lambda+S=I')
        p.set_objective(tr(rho - sigma, L))
    """

    def __init__(self, name: str = 'program', sense: str = 'min'):
        if sense not in ('min', 'max'):
            raise DomainError(f"Sentido de optimización inválido: {sense}")
        self.name = name
        self.sense = sense
        self.psd: List[PsdVar] = []
        self.free: List[FreeVar] = []
        self.herm: List[HermVar] = []
        self.objective = Affine()
        self._rows: List[Tuple[dict, float]] = []
        self._groups: List[_Group] = []
        self._slack_count = 0

    # -- variables ---------------------------------------------------------

    def hermitian_psd(self, name: str, n: int) -> PsdVar:
        var = PsdVar(len(self.psd), name, int(n), True)
        self.psd.append(var)
        return var

    def symmetric_psd(self, name: str, n: int) -> PsdVar:
        var = PsdVar(len(self.psd), name, int(n), False)
        self.psd.append(var)
        return var

    def nonneg(self, name: str) -> PsdVar:
        return self.symmetric_psd(name, 1)

    def free_scalar(self, name: str) -> FreeVar:
        var = FreeVar(len(self.free), name)
        self.free.append(var)
        return var

    def free_hermitian(self, name: str, n: int) -> HermVar:
        comps = [self.free_scalar(f"{name}#{g}") for g in range(int(n) ** 2)]
        var = HermVar(name, int(n), comps)
        self.herm.append(var)
        return var

    # -- restricciones -----------------------------------------------------

    def _expand(self, expr: Affine) -> dict:
        """Expande HermVar en sus componentes escalares"""
        out = {}
        for var, coef in expr.terms.items():
            if isinstance(var, HermVar):
                basis = hermitian_basis(var.n)
                F = np.asarray(coef, dtype=complex)
                vals = np.real(np.einsum('ab,gba->g', F, basis))
                for comp, v in zip(var.components, vals):
                    out[comp] = out.get(comp, 0.0) + float(v)
            elif isinstance(var, PsdVar):
                F = np.asarray(coef, dtype=complex).reshape(var.n, var.n)
                out[var] = out[var] + F if var in out else F
            else:
                out[var] = out.get(var, 0.0) + float(coef)
        return out

    def add_equality(self, expr: Affine, rhs: float = 0.0, name: Optional[str] = None):
        expr = Affine._coerce(expr)
        row = len(self._rows)
        self._rows.append((self._expand(expr), float(rhs) - expr.const))
        self._groups.append(_Group(name or f"eq{row}", [row], 'scalar'))

    def add_inequality(self, expr: Affine, sense: str, rhs: float = 0.0, name: Optional[str] = None):
        """expr ≥ rhs o expr ≤ rhs mediante una holgura no negativa"""
        slack = self.nonneg(f"_s{self._slack_count}")
        self._slack_count += 1
        sign = -1.0 if sense == '>=' else 1.0
        if sense not in ('>=', '<='):
            raise DomainError(f"Sentido de desigualdad inválido: {sense}")
        self.add_equality(Affine._coerce(expr) + scalar(slack, sign), rhs, name)

    def add_matrix_equality(self, terms: Sequence[Tuple[Var, MatrixMap]], rhs, name: Optional[str] = None):
        """
        Impone Σ_t L_t(X_t) = R

        Args:
            terms: Pares (variable, mapa). Para PsdVar/HermVar el mapa es un
                callable lineal (None = identidad); para escalares es la
                matriz que multiplica al escalar.
            rhs: Matriz hermítica R
            name: Nombre del grupo de restricciones
        """
        R = np.asarray(rhs, dtype=complex)
        m = R.shape[0]
        E = hermitian_basis(m)
        n_rows = m * m
        rows = [dict() for _ in range(n_rows)]

        for var, fmap in terms:
            if not isinstance(var, FreeVar) and (fmap is None or callable(fmap)):
                fn = (lambda x: x) if fmap is None else fmap
                G = hermitian_basis(var.n)
                outs = np.array([np.asarray(fn(g), dtype=complex) for g in G])
                if outs.shape[1:] != (m, m):
                    raise DomainError(f"El mapa de {var!r} produce {outs.shape[1:]}, se esperaba {(m, m)}")
                T = np.real(np.einsum('kab,gba->kg', E, outs))
                if isinstance(var, HermVar):
                    for k in range(n_rows):
                        for comp, v in zip(var.components, T[k]):
                            if v != 0.0:
                                rows[k][comp] = rows[k].get(comp, 0.0) + float(v)
                else:
                    F = np.einsum('kg,gab->kab', T, G)
                    for k in range(n_rows):
                        rows[k][var] = rows[k][var] + F[k] if var in rows[k] else F[k]
            else:
                M = np.asarray(fmap, dtype=complex)
                vals = np.real(np.einsum('kab,ba->k', E, M))
                for k in range(n_rows):
                    if vals[k] == 0.0:
                        continue
                    if isinstance(var, PsdVar):
                        c = np.full((1, 1), vals[k], dtype=complex)
                        rows[k][var] = rows[k][var] + c if var in rows[k] else c
                    else:
                        rows[k][var] = rows[k].get(var, 0.0) + float(vals[k])

        rhs_vals = np.real(np.einsum('kab,ba->k', E, R))
        start = len(self._rows)
        for k in range(n_rows):
            self._rows.append((rows[k], float(rhs_vals[k])))
        self._groups.append(_Group(name or f"meq{start}", list(range(start, start + n_rows)), 'matrix', m))

    def add_matrix_inequality(self, terms: Sequence[Tuple[Var, MatrixMap]], sense: str, rhs,
                              name: Optional[str] = None) -> PsdVar:
        """
        Σ_t L_t(X_t) ⪯ R (sense='<=') o ⪰ R (sense='>='), con holgura PSD

        Returns:
            Variable de holgura
        """
        R = np.asarray(rhs, dtype=complex)
        slack = self.hermitian_psd(f"_S{self._slack_count}", R.shape[0])
        self._slack_count += 1
        if sense == '<=':
            self.add_matrix_equality(list(terms) + [(slack, None)], R, name)
        elif sense == '>=':
            self.add_matrix_equality(list(terms) + [(slack, lambda x: -x)], R, name)
        else:
            raise DomainError(f"Sentido de desigualdad inválido: {sense}")
        return slack

    def set_objective(self, expr: Affine, sense: Optional[str] = None):
        if sense is not None:
            if sense not in ('min', 'max'):
                raise DomainError(f"Sentido de optimización inválido: {sense}")
            self.sense = sense
        self.objective = Affine._coerce(expr)

    # -- ensamblado --------------------------------------------------------

    @staticmethod
    def _block_coef(var: PsdVar, F) -> np.ndarray:
        F = np.asarray(F, dtype=complex)
        if var.is_complex:
            return realify_functional(F)
        return np.real(0.5 * (F + F.conj().T))

    def build(self) -> Tuple[StandardForm, Layout]:
        """Ensambla la forma estándar real (sentido min) y poda filas dependientes"""
        sizes = [v.real_size for v in self.psd]
        total = sum(sizes)
        if total > Config.SOLVER['max_psd_dim']:
            raise DomainError(f"Dimensión PSD total {total} > {Config.SOLVER['max_psd_dim']}")

        m = len(self._rows)
        k = len(self.free)
        A = [np.zeros((m, n, n)) for n in sizes]
        B = np.zeros((m, k))
        b = np.zeros(m)
        for i, (row, rhs) in enumerate(self._rows):
            b[i] = rhs
            for var, coef in row.items():
                if isinstance(var, PsdVar):
                    A[var.index][i] += self._block_coef(var, coef)
                else:
                    B[i, var.index] += coef

        sign = 1.0 if self.sense == 'min' else -1.0
        obj = self._expand(self.objective)
        C = [np.zeros((n, n)) for n in sizes]
        c_free = np.zeros(k)
        for var, coef in obj.items():
            if isinstance(var, PsdVar):
                C[var.index] += sign * self._block_coef(var, coef)
            else:
                c_free[var.index] += sign * coef

        kept = _independent_rows(A, B, b)
        sf = StandardForm(sizes, [a[kept] for a in A], B[kept], b[kept], C, c_free)
        layout = Layout(list(self.psd), list(self.free), list(self.herm), list(self._groups),
                        sign, self.objective.const, kept, m)
        return sf, layout

    def dump(self) -> str:
        """
        Volcado textual en tripletes dispersos

        Formato (índices de bloque y de fila/columna desde 1, triángulo superior):
            sense <min|max>
            blocks <n_1> ... <n_J>        tamaños reales de los bloques
            free <k>
            constraints <m>
            0 <bloque> <fila> <col> <valor>   términos del objetivo
            <i> <bloque> <fila> <col> <valor> términos de la restricción i
            <i> f <índice> <valor>            término de una variable libre
            <i> rhs <valor>
        """
        sf, layout = self.build()
        sign = layout.sign
        lines = [f"# adlab conic program: {self.name}",
                 f"sense {self.sense}",
                 "blocks " + " ".join(str(n) for n in sf.sizes),
                 f"free {sf.n_free}",
                 f"constraints {sf.m}"]

        def triplets(tag: int, mats: List[np.ndarray], scale: float = 1.0):
            for j, M in enumerate(mats):
                rows, cols = np.nonzero(np.triu(M))
                for r, c in zip(rows, cols):
                    lines.append(f"{tag} {j + 1} {r + 1} {c + 1} {float(scale * M[r, c])!r}")

        triplets(0, sf.C, sign)
        for idx, v in enumerate(sf.c_free):
            if v != 0.0:
                lines.append(f"0 f {idx + 1} {float(sign * v)!r}")
        for i in range(sf.m):
            triplets(i + 1, [a[i] for a in sf.A])
            for idx in np.nonzero(sf.B[i])[0]:
                lines.append(f"{i + 1} f {idx + 1} {float(sf.B[i, idx])!r}")
            lines.append(f"{i + 1} rhs {float(sf.b[i])!r}")
        return "\n".join(lines) + "\n"


def _independent_rows(A: List[np.ndarray], B: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Filas linealmente independientes de [A | B] (QR con pivoteo)

    Lanza InconsistentConstraints si alguna fila descartada contradice b.
    """
    m = b.size
    if m == 0:
        return np.arange(0)
    rows = np.hstack([a.reshape(m, -1) for a in A] + [B])
    norms = np.linalg.norm(rows, axis=1)
    nonzero = norms > 0
    if np.any(~nonzero & (np.abs(b) > 1e-12)):
        raise InconsistentConstraints("Restricción 0 = b ≠ 0")

    idx = np.nonzero(nonzero)[0]
    if idx.size == 0:
        return idx
    sub = rows[idx] / norms[idx, None]
    _, R, piv = scipy.linalg.qr(sub.T, mode='economic', pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.count_nonzero(diag > 1e-10 * max(diag[0], 1.0)))
    kept = np.sort(idx[piv[:rank]])

    if rank < idx.size:
        dropped = np.setdiff1d(idx, kept)
        base = rows[kept]
        coeffs, *_ = np.linalg.lstsq(base.T, rows[dropped].T, rcond=None)
        residual = np.abs(coeffs.T @ b[kept] - b[dropped])
        if np.max(residual) > 1e-8 * (1.0 + np.max(np.abs(b))):
            raise InconsistentConstraints(
                f"{dropped.size} restricciones dependientes con lado derecho incompatible"
            )
        logger.debug(f"Poda de {dropped.size} restricciones dependientes")
    return kept


class InconsistentConstraints(DomainError):
    """Las restricciones de igualdad no admiten solución"""


# ---------------------------------------------------------------------------
# Solve
# ---------------------------------------------------------------------------

def _residuals(sf: StandardForm, X, Z, y, u) -> Tuple[float, float, float, float]:
    rp = sf.b - sf.a_map(X) - sf.B @ u
    ATy = sf.a_adjoint(y)
    Rd = [c - z - a for c, z, a in zip(sf.C, Z, ATy)]
    r_u = sf.c_free - sf.B.T @ y
    norm_c = math.sqrt(sum(float(np.sum(c * c)) for c in sf.C) + float(np.sum(sf.c_free ** 2)))
    pinf = float(np.linalg.norm(rp)) / (1.0 + float(np.linalg.norm(sf.b)))
    dinf = math.sqrt(sum(float(np.sum(r * r)) for r in Rd) + float(np.sum(r_u ** 2))) / (1.0 + norm_c)
    pobj = sum(float(np.sum(c * x)) for c, x in zip(sf.C, X)) + float(sf.c_free @ u)
    dobj = float(sf.b @ y)
    return pobj, dobj, pinf, dinf


def _solve_cvxpy(sf: StandardForm) -> IpmResult:
    """
    Adaptador cvxpy: resuelve el primal y el dual estándar como dos problemas
    separados, de modo que no dependemos de la convención de signos de los
    multiplicadores de cvxpy.
    """
    import cvxpy as cp

    Xs = [cp.Variable((n, n), symmetric=True) for n in sf.sizes]
    cons = [X >> 0 for X in Xs]
    lhs = 0
    for A_j, X in zip(sf.A, Xs):
        lhs = lhs + A_j.reshape(sf.m, -1) @ cp.vec(X)
    obj = sum(cp.trace(C_j @ X) for C_j, X in zip(sf.C, Xs))
    u = None
    if sf.n_free:
        u = cp.Variable(sf.n_free)
        lhs = lhs + sf.B @ u
        obj = obj + sf.c_free @ u
    if sf.m:
        cons.append(lhs == sf.b)
    primal = cp.Problem(cp.Minimize(obj), cons)

    y = cp.Variable(sf.m)
    Zs = [cp.Variable((n, n), symmetric=True) for n in sf.sizes]
    dcons = [Z >> 0 for Z in Zs]
    for A_j, C_j, Z in zip(sf.A, sf.C, Zs):
        dcons.append(cp.vec(Z) == C_j.reshape(-1) - A_j.reshape(sf.m, -1).T @ y)
    if sf.n_free:
        dcons.append(sf.B.T @ y == sf.c_free)
    dual = cp.Problem(cp.Maximize(sf.b @ y), dcons)

    for prob in (primal, dual):
        try:
            prob.solve(solver=cp.CLARABEL)
        except (cp.error.SolverError, ValueError):
            prob.solve()

    if primal.status in ('infeasible', 'infeasible_inaccurate') or dual.status in ('unbounded',):
        status = 'infeasible'
    elif primal.status in ('unbounded',) or dual.status in ('infeasible', 'infeasible_inaccurate'):
        status = 'unbounded'
    elif primal.status == 'optimal' and dual.status == 'optimal':
        status = 'optimal'
    else:
        status = 'numerical_failure'

    if status != 'optimal':
        return IpmResult(status, [], [], np.zeros(sf.m), np.zeros(sf.n_free),
                         math.nan, math.nan, math.inf, math.inf, 0)

    X = [0.5 * (np.asarray(v.value) + np.asarray(v.value).T) for v in Xs]
    Z = [0.5 * (np.asarray(v.value) + np.asarray(v.value).T) for v in Zs]
    yv = np.asarray(y.value).reshape(-1) if sf.m else np.zeros(0)
    uv = np.asarray(u.value).reshape(-1) if u is not None else np.zeros(0)
    pobj, dobj, pinf, dinf = _residuals(sf, X, Z, yv, uv)
    return IpmResult('optimal', X, Z, yv, uv, pobj, dobj, pinf, dinf, 0)


def _run_backend(sf: StandardForm, backend: str) -> Tuple[IpmResult, str]:
    if backend == 'cvxpy':
        try:
            res = _solve_cvxpy(sf)
            if res.status == 'optimal' and _meets_contract(res):
                return res, 'cvxpy'
            logger.warning(f"cvxpy devolvió estado {res.status}; se recurre al IPM propio")
        except ImportError:
            logger.warning("cvxpy no está instalado; se usa el IPM propio")
        except Exception as e:
            logger.warning(f"Error en el adaptador cvxpy ({e}); se usa el IPM propio")
    elif backend != 'ipm':
        raise DomainError(f"Backend desconocido: {backend}")
    return solve_standard_form(sf), 'ipm'


def _meets_contract(res: IpmResult) -> bool:
    return (res.gap <= Config.SOLVER['gap_tol']
            and res.primal_infeasibility <= Config.SOLVER['feas_tol']
            and res.dual_infeasibility <= Config.SOLVER['feas_tol'])


def solve(program: ConicProgram, backend: Optional[str] = None) -> SolveResult:
    """
    Resuelve un ConicProgram

    Args:
        program: Programa a resolver
        backend: 'ipm' o 'cvxpy' (por defecto Config.SOLVER['backend'])

    Returns:
        SolveResult; status='optimal' solo si brecha e infactibilidades
        están dentro de gap_tol / feas_tol
    """
    backend = (backend or Config.SOLVER['backend']).lower()
    try:
        sf, layout = program.build()
    except InconsistentConstraints as e:
        logger.info(f"{program.name}: restricciones inconsistentes ({e})")
        return SolveResult('infeasible', math.nan, math.nan, math.inf, backend=backend)

    res, used = _run_backend(sf, backend)

    if res.status in ('infeasible', 'unbounded'):
        status = res.status
    elif _meets_contract(res):
        status = 'optimal'
    else:
        status = 'numerical_failure'
        logger.warning(
            f"{program.name}: sin certificado (brecha {res.gap:.2e}, "
            f"pinf {res.primal_infeasibility:.2e}, dinf {res.dual_infeasibility:.2e})"
        )

    if not res.X:
        return SolveResult(status, math.nan, math.nan, math.inf, backend=used)

    sign = layout.sign
    primal_value = sign * res.primal_objective + layout.const
    dual_value = sign * res.dual_objective + layout.const

    primal_solution: Dict[str, object] = {}
    dual_solution: Dict[str, object] = {}
    for var in layout.psd:
        X = res.X[var.index]
        Zb = res.Z[var.index]
        if var.is_complex:
            primal_solution[var.name] = derealify(X)
            dual_solution[var.name] = 2.0 * derealify(Zb)
        elif var.n == 1:
            primal_solution[var.name] = float(X[0, 0])
            dual_solution[var.name] = float(Zb[0, 0])
        else:
            primal_solution[var.name] = X.copy()
            dual_solution[var.name] = Zb.copy()
    for var in layout.free:
        primal_solution[var.name] = float(res.u[var.index])
    for hv in layout.herm:
        coeffs = np.array([primal_solution[c.name] for c in hv.components])
        primal_solution[hv.name] = np.einsum('g,gab->ab', coeffs, hermitian_basis(hv.n))

    y_full = np.zeros(layout.m_total)
    y_full[layout.kept_rows] = sign * res.y
    for group in layout.groups:
        if group.kind == 'scalar':
            dual_solution[group.name] = float(y_full[group.rows[0]])
        else:
            dual_solution[group.name] = np.einsum('k,kab->ab', y_full[group.rows], hermitian_basis(group.dim))

    logger.debug(f"{program.name}: {status} primal={primal_value:.10g} dual={dual_value:.10g} "
                 f"backend={used} it={res.iterations}")
    return SolveResult(status, primal_value, dual_value, abs(primal_value - dual_value),
                       primal_solution, dual_solution, used, res.iterations)
