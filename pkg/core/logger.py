#!/usr/bin/env python3
"""
Sistema de logging configurado
"""

import logging
import os
from typing import Optional

from core.config import settings

LOGGER_NAME = "qcorr"

def setup_logger(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    level = level or settings.LOG_LEVEL
    log_file = log_file or settings.LOG_FILE

    # Configurar formato
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    # Logger principal
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, level.upper()))

    # Re-configuración desde la CLI: no duplicar handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    # Handler para archivo
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # Handler para consola
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    return logger

logger = setup_logger()
