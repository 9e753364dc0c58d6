import json
import logging
import os
from datetime import datetime
from typing import Optional

import psutil

from .config import Config

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None):
    """
    Configura el logging del proceso

    Args:
        level: Nivel de logging (por defecto el de Config.SYSTEM)
    """
    level_name = (level or Config.SYSTEM['log_level']).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=LOG_FORMAT
    )


def get_system_metrics() -> dict:
    """
    Obtiene métricas del sistema: núcleos y memoria

    Returns:
        Diccionario con métricas del sistema
    """
    metrics = {}

    # CPU
    try:
        metrics['cpu_count'] = psutil.cpu_count()
        metrics['cpu_count_physical'] = psutil.cpu_count(logical=False)
    except Exception as e:
        logger.warning(f"No se pudo obtener métricas de CPU: {e}")
        metrics['cpu_count'] = 0
        metrics['cpu_count_physical'] = 0

    # Memoria
    try:
        memory = psutil.virtual_memory()
        metrics['memory_percent'] = memory.percent
        metrics['memory_available'] = memory.available
    except Exception as e:
        logger.warning(f"No se pudo obtener métricas de memoria: {e}")
        metrics['memory_percent'] = 0
        metrics['memory_available'] = 0

    return metrics


def log_system_event(event_type: str, message: str, details: dict = None):
    """
    Registra un evento del sistema

    Args:
        event_type: Tipo de evento (ERROR, WARNING, INFO, SUCCESS)
        message: Mensaje del evento
        details: Detalles adicionales del evento
    """
    try:
        log_file = Config.SYSTEM.get('events_file')

        if log_file:
            event = {
                'timestamp': datetime.now().isoformat(),
                'type': event_type,
                'message': message,
                'details': details or {}
            }

            directory = os.path.dirname(log_file)
            if directory:
                os.makedirs(directory, exist_ok=True)

            with open(log_file, 'a') as f:
                f.write(json.dumps(event, default=str) + '\n')

        # También loggear a consola
        if event_type == 'ERROR':
            logger.error(message)
        elif event_type == 'WARNING':
            logger.warning(message)
        else:
            logger.info(message)

    except Exception as e:
        logger.error(f"Error al registrar evento del sistema: {e}")
