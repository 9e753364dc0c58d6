"""
adlab: teoría de recursos de la distinguibilidad asimétrica

Divergencias cuánticas, programas semidefinidos para las cantidades
suavizadas y operacionales, protocolos explícitos de destilación y dilución,
y baterías de desigualdades con instancias aleatorias reproducibles.
"""

from .config import Config
from .divergences import (
    DivergenceValue, RenyiOrder, d_max, d_min, fidelity, petz_renyi, rel_entropy,
    rel_entropy_variance, sandwiched_renyi, trace_distance
)
from .errors import AdlabError, DimensionError, DomainError, NumericalFailure, StateFileError
from .linalg import Box, Channel, HermitianOperator, State
from .sdp import SmoothingBall, box_transform_error, smooth_dmax, smooth_dmin

__version__ = Config.SYSTEM['version']

__all__ = [
    'Config', 'Box', 'Channel', 'HermitianOperator', 'State', 'DivergenceValue', 'RenyiOrder',
    'd_min', 'd_max', 'rel_entropy', 'rel_entropy_variance', 'petz_renyi', 'sandwiched_renyi',
    'trace_distance', 'fidelity', 'SmoothingBall', 'smooth_dmin', 'smooth_dmax', 'box_transform_error',
    'AdlabError', 'DomainError', 'DimensionError', 'NumericalFailure', 'StateFileError',
]
