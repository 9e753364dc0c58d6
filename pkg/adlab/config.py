"""
Archivo de configuración centralizada para adlab
Teoría de recursos de la distinguibilidad asimétrica
"""

import os
from typing import Dict, Any

import psutil


def _default_workers() -> int:
    """Número de hilos por defecto para las baterías (núcleos físicos)"""
    try:
        return max(1, psutil.cpu_count(logical=False) or psutil.cpu_count() or 1)
    except Exception:
        return 1


class Config:
    """Configuración centralizada del sistema"""

    # Tolerancias numéricas del álgebra lineal y las divergencias
    TOLERANCES = {
        'psd_tol': 1e-10,              # Autovalor mínimo admitido en un estado
        'trace_tol': 1e-10,            # Desviación admitida de Tr = 1
        'rank_tol': 1e-9,              # Corte relativo para el soporte (·λ_max)
        'degeneracy_tol': 1e-8,        # Agrupación relativa de autovalores (pinching)
        'infinity_tol': 1e-12,         # Tr[Π_ρ σ] por debajo de esto => D_min infinito
        'support_leak_tol': 1e-9,      # Tr[(I−Π_σ)ρ] por encima de esto => infinito
        'choi_tp_tol': 1e-9,           # Tr_B J = I entrada a entrada
        'isometry_tol': 1e-10,         # U†U = I
        'hermiticity_tol': 1e-9,       # Asimetría admitida al leer archivos de estado
    }

    # Configuración del solver cónico
    SOLVER = {
        'backend': 'ipm',              # 'ipm' (en árbol) o 'cvxpy'
        'gap_tol': 1e-7,               # Brecha primal-dual para declarar óptimo
        'feas_tol': 1e-7,              # Infactibilidad residual admitida
        'inner_tol': 1e-10,            # Criterio de parada interno del IPM
        'max_iter': 120,               # Iteraciones máximas del IPM
        'max_psd_dim': 512,            # Dimensión PSD total (real) admitida
        'channel_drift': 1e-7,         # Deriva admitida al sanear el Choi extraído
    }

    # Bisección sobre log2 M
    BISECTION = {
        'lo': 0.0,
        'hi': 60.0,
        'resolution': 1e-4,
        'feasibility_tol': 1e-6,
    }

    # Baterías de desigualdades
    BATTERY = {
        'margin_tol': 1e-7,            # Margen mínimo admitido (−margin_tol)
        'count': 200,                  # Instancias por suite
        'workers': _default_workers(),
        'dims': [2, 3],
        'sandwiched_alphas': [0.55, 0.75, 0.95],
        'petz_alphas': [0.3, 0.6, 0.9],
        'sandwiched_upper_alphas': [1.5, 2.0, 3.0],
        'eps_grid': [0.05, 0.1, 0.2, 0.3],
        'eps_pairs': [[0.0, 0.1], [0.1, 0.1], [0.2, 0.3], [0.05, 0.4]],
        'dp_petz_alphas': [0.3, 0.7, 1.5, 2.0],
        'dp_sandwiched_alphas': [0.5, 0.8, 1.5, 3.0],
        'operational_eps': 0.1,        # ε de las igualdades operacionales aproximadas
        'operational_tol': 1e-3,       # |operacional − entrópica| admitido tras la bisección
        'protocol_tol': 1e-6,          # |log2 M − D_min^ε| del canal de destilación aproximada
    }

    # Configuración del sistema
    SYSTEM = {
        'version': '0.1.0',
        'log_level': 'INFO',           # Nivel de logging del sistema
        'events_file': 'tmp/adlab_events.log',
    }

    @classmethod
    def get_tolerances_config(cls) -> Dict[str, Any]:
        """Obtiene las tolerancias numéricas"""
        return cls.TOLERANCES.copy()

    @classmethod
    def get_solver_config(cls) -> Dict[str, Any]:
        """Obtiene configuración del solver"""
        return cls.SOLVER.copy()

    @classmethod
    def get_bisection_config(cls) -> Dict[str, Any]:
        """Obtiene configuración de la bisección"""
        return cls.BISECTION.copy()

    @classmethod
    def get_battery_config(cls) -> Dict[str, Any]:
        """Obtiene configuración de las baterías"""
        return cls.BATTERY.copy()

    @classmethod
    def get_system_config(cls) -> Dict[str, Any]:
        """Obtiene configuración del sistema"""
        return cls.SYSTEM.copy()

    @classmethod
    def get_all_config(cls) -> Dict[str, Any]:
        """Obtiene toda la configuración"""
        return {
            'tolerances': cls.get_tolerances_config(),
            'solver': cls.get_solver_config(),
            'bisection': cls.get_bisection_config(),
            'battery': cls.get_battery_config(),
            'system': cls.get_system_config(),
        }

    @classmethod
    def get_report_tolerances(cls) -> Dict[str, Any]:
        """Tolerancias que se incluyen en cada reporte (orden estable)"""
        report = {f'tol.{k}': v for k, v in sorted(cls.TOLERANCES.items())}
        report['solver.backend'] = cls.SOLVER['backend']
        report['solver.gap_tol'] = cls.SOLVER['gap_tol']
        report['solver.feas_tol'] = cls.SOLVER['feas_tol']
        report['bisection.resolution'] = cls.BISECTION['resolution']
        report['bisection.feasibility_tol'] = cls.BISECTION['feasibility_tol']
        report['battery.margin_tol'] = cls.BATTERY['margin_tol']
        return report

    @classmethod
    def update_config(cls, section: str, key: str, value: Any) -> bool:
        """Actualiza una configuración específica"""
        try:
            if hasattr(cls, section.upper()) and key in getattr(cls, section.upper()):
                getattr(cls, section.upper())[key] = value
                return True
            return False
        except Exception:
            return False

    @classmethod
    def load_from_env(cls):
        """Carga configuración desde variables de entorno"""
        # Solver
        if os.getenv('ADLAB_GAP_TOL'):
            cls.SOLVER['gap_tol'] = float(os.getenv('ADLAB_GAP_TOL'))

        if os.getenv('ADLAB_SOLVER'):
            cls.SOLVER['backend'] = os.getenv('ADLAB_SOLVER').strip().lower()

        # Baterías
        if os.getenv('ADLAB_WORKERS'):
            cls.BATTERY['workers'] = int(os.getenv('ADLAB_WORKERS'))

        # Sistema
        if os.getenv('ADLAB_LOG_LEVEL'):
            cls.SYSTEM['log_level'] = os.getenv('ADLAB_LOG_LEVEL').upper()

        if os.getenv('ADLAB_EVENTS_FILE') is not None:
            cls.SYSTEM['events_file'] = os.getenv('ADLAB_EVENTS_FILE')

    @classmethod
    def validate_config(cls) -> Dict[str, Any]:
        """Valida la configuración y retorna errores si los hay"""
        errors = []

        for key, value in cls.TOLERANCES.items():
            if not (0.0 < value < 1e-3):
                errors.append(f"Tolerancia {key} fuera de rango: {value}")

        if cls.SOLVER['backend'] not in ('ipm', 'cvxpy'):
            errors.append(f"Backend de solver desconocido: {cls.SOLVER['backend']}")

        if cls.SOLVER['gap_tol'] <= 0 or cls.SOLVER['gap_tol'] > 1e-2:
            errors.append("Tolerancia de brecha inválida")

        if cls.SOLVER['max_iter'] < 10:
            errors.append("Iteraciones máximas del IPM demasiado bajas")

        if cls.BISECTION['lo'] >= cls.BISECTION['hi']:
            errors.append("Intervalo de bisección vacío")

        if cls.BISECTION['resolution'] <= 0:
            errors.append("Resolución de bisección inválida")

        if cls.BATTERY['workers'] < 1:
            errors.append("Número de workers inválido")

        if any(not (0.5 <= a < 1.0) for a in cls.BATTERY['sandwiched_alphas']):
            errors.append("Órdenes sandwiched fuera de [1/2, 1)")

        if any(not (0.0 < a < 1.0) for a in cls.BATTERY['petz_alphas']):
            errors.append("Órdenes de Petz fuera de (0, 1)")

        return {
            'valid': len(errors) == 0,
            'errors': errors
        }


# Cargar configuración desde variables de entorno al importar
Config.load_from_env()

# Configuración específica para desarrollo
if os.getenv('ENVIRONMENT') == 'development':
    Config.SYSTEM['log_level'] = 'DEBUG'

# Configuración específica para producción
if os.getenv('ENVIRONMENT') == 'production':
    Config.SYSTEM['log_level'] = 'WARNING'
