"""
Excepciones tipadas de adlab.

Los infinitos (soporte violado) no son errores: se devuelven como valores
marcados. Estas excepciones cubren entradas fuera de dominio, dimensiones
incompatibles y fallos numéricos del solver.
"""


class AdlabError(Exception):
    """Error base de la librería"""


class DomainError(AdlabError, ValueError):
    """Parámetro fuera de su dominio (α = 1, ε fuera de rango, no isometría, ...)"""


class DimensionError(AdlabError, ValueError):
    """Dimensiones incompatibles entre operadores, canales o cajas"""


class NumericalFailure(AdlabError, RuntimeError):
    """El cálculo numérico no alcanzó la precisión exigida"""


class StateFileError(DomainError):
    """
    Archivo de estado inválido

    Args:
        invariant: Nombre del invariante violado ('format', 'dim', 'hermiticity', 'psd', 'trace')
        message: Descripción legible
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"[{invariant}] {message}")
        self.invariant = invariant
