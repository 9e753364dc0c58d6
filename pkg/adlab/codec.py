"""
Formatos de archivo: StateFile (JSON canónico) y reportes key=value + bloque JSON
"""

import json
import logging
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from .config import Config
from .divergences import DivergenceValue
from .errors import DomainError, StateFileError
from .linalg import State

logger = logging.getLogger(__name__)

INF_TOKEN = 'inf'
REPORT_SEPARATOR = '---'


def _plain(x: float) -> float:
    """Normaliza −0.0 a 0.0"""
    return float(x) + 0.0


@dataclass(frozen=True)
class StateFile:
    """
    Estado con etiqueta opcional tal como se guarda en disco

    Formato: {"dim": d, "entries": [[re, im], ...] fila a fila, "label": "..."}
    """
    state: State
    label: Optional[str] = None

    @property
    def dim(self) -> int:
        return self.state.dim

    def to_payload(self) -> Dict[str, Any]:
        m = self.state.matrix
        payload = {
            'dim': int(m.shape[0]),
            'entries': [[_plain(z.real), _plain(z.imag)] for z in m.ravel()],
        }
        if self.label is not None:
            payload['label'] = self.label
        return payload

    def dumps(self) -> str:
        return json.dumps(self.to_payload(), indent=2, sort_keys=True) + '\n'

    def save(self, path: str):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w') as f:
            f.write(self.dumps())

    @classmethod
    def from_payload(cls, payload: Any) -> 'StateFile':
        """
        Valida y convierte un objeto JSON ya decodificado

        Raises:
            StateFileError: con el invariante violado ('format', 'dim',
                'hermiticity', 'psd' o 'trace')
        """
        if not isinstance(payload, dict) or 'dim' not in payload or 'entries' not in payload:
            raise StateFileError('format', "se esperaba un objeto con 'dim' y 'entries'")
        dim = payload['dim']
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise StateFileError('dim', f"dimensión inválida: {dim!r}")
        label = payload.get('label')
        if label is not None and not isinstance(label, str):
            raise StateFileError('format', "la etiqueta debe ser texto")

        entries = payload['entries']
        if not isinstance(entries, list) or len(entries) != dim * dim:
            raise StateFileError('dim', f"se esperaban {dim * dim} entradas para dim={dim}")
        try:
            pairs = np.array(entries, dtype=float)
        except (TypeError, ValueError) as e:
            raise StateFileError('format', f"entradas no numéricas: {e}")
        if pairs.shape != (dim * dim, 2) or not np.all(np.isfinite(pairs)):
            raise StateFileError('format', "cada entrada debe ser un par finito [re, im]")

        m = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > Config.TOLERANCES['hermiticity_tol']:
            raise StateFileError('hermiticity', f"asimetría {asym:.3e} > {Config.TOLERANCES['hermiticity_tol']:g}")
        tr = float(np.real(np.trace(m)))
        if abs(tr - 1.0) > Config.TOLERANCES['trace_tol']:
            raise StateFileError('trace', f"traza {tr:.12g} ≠ 1")
        try:
            state = State(m)
        except DomainError as e:
            raise StateFileError('psd', str(e))
        return cls(state, label)

    @classmethod
    def loads(cls, text: str) -> 'StateFile':
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise StateFileError('format', f"JSON inválido: {e}")
        return cls.from_payload(payload)

    @classmethod
    def load(cls, path: str) -> 'StateFile':
        try:
            with open(path, 'r') as f:
                text = f.read()
        except OSError as e:
            raise StateFileError('format', f"no se pudo leer {path}: {e}")
        return cls.loads(text)


def load_state(path: str) -> State:
    return StateFile.load(path).state


def save_state(path: str, state: State, label: Optional[str] = None):
    StateFile(state, label).save(path)


# ---------------------------------------------------------------------------
# Reportes
# ---------------------------------------------------------------------------

def to_jsonable(value: Any) -> Any:
    """Convierte valores del dominio a JSON con 'inf' como token de infinito"""
    if isinstance(value, DivergenceValue):
        return INF_TOKEN if value.infinite else _plain(value.value)
    if isinstance(value, State):
        return StateFile(value).to_payload()
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return INF_TOKEN if value > 0 else '-' + INF_TOKEN
        return _plain(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    return value


def format_value(value: Any) -> str:
    value = to_jsonable(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    if value is None:
        return 'none'
    return str(value).lower() if isinstance(value, bool) else str(value)


def render_report(fields: Dict[str, Any], block: Optional[Dict[str, Any]] = None,
                  seed: Optional[int] = None) -> str:
    """
    Reporte estable: líneas key=value, separador '---' y bloque JSON canónico

    Args:
        fields: Resultados principales en el orden en que se imprimen
        block: Datos estructurados adicionales
        seed: Semilla (si la ejecución la usa)

    Returns:
        Texto del reporte terminado en salto de línea
    """
    header = {'version': Config.SYSTEM['version']}
    if seed is not None:
        header['seed'] = int(seed)
    header.update(fields)

    lines = [f"{key}={format_value(value)}" for key, value in header.items()]
    full = dict(block or {})
    full['fields'] = header
    full['tolerances'] = Config.get_report_tolerances()
    lines.append(REPORT_SEPARATOR)
    lines.append(json.dumps(to_jsonable(full), indent=2, sort_keys=True))
    return '\n'.join(lines) + '\n'


def parse_report(text: str) -> Dict[str, Any]:
    """Lee un reporte: devuelve {'fields': {...}, 'block': {...}}"""
    head, sep, tail = text.partition('\n' + REPORT_SEPARATOR + '\n')
    if not sep:
        raise DomainError("Reporte sin separador '---'")
    fields = {}
    for line in head.splitlines():
        key, _, value = line.partition('=')
        fields[key] = value
    return {'fields': fields, 'block': json.loads(tail)}
