#!/usr/bin/env python3
"""
CPU Detection and Configuration Utilities
Detección automática del número de hilos para los kernels numéricos
"""

import os
import multiprocessing
from typing import Dict, Any

from core.logger import logger

# Variables de entorno que leen las librerías BLAS al importarse
BLAS_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

class CPUDetector:
    """Detector del número óptimo de hilos"""

    def __init__(self):
        self.cpu_count = multiprocessing.cpu_count()

    def detect_optimal_threads(self, threads_env: str = "auto") -> int:
        """
        Detectar número óptimo de hilos basado en:
        - Número de CPUs disponibles
        - Valor manual (--threads / THREADS)
        """
        if threads_env.isdigit():
            manual_threads = int(threads_env)
            if manual_threads > self.cpu_count:
                logger.warning(f"⚠️ THREADS={manual_threads} excede las CPUs ({self.cpu_count})")
            return max(1, min(manual_threads, self.cpu_count))

        if threads_env.lower() == "auto":
            return self._calculate_optimal_threads()

        logger.warning(f"⚠️ Valor inválido para THREADS: {threads_env}, usando auto-detección")
        return self._calculate_optimal_threads()

    def _calculate_optimal_threads(self) -> int:
        """Hilos óptimos: todos los cores salvo uno en máquinas grandes"""
        if self.cpu_count <= 8:
            return self.cpu_count
        return self.cpu_count - 1

def resolve_threads(threads_env: str = "auto") -> int:
    """Número de hilos efectivo para un valor de THREADS"""
    return CPUDetector().detect_optimal_threads(threads_env)

def export_blas_threads(threads: int) -> None:
    """
    Fijar los hilos de BLAS vía entorno

    Solo tiene efecto si se llama antes del primer import de numpy.
    """
    for var in BLAS_THREAD_VARS:
        os.environ[var] = str(threads)

def configure_threads(threads: int) -> Dict[str, Any]:
    """
    Aplicar el número de hilos a numba y devolver la configuración de runtime
    """
    import numba

    threads = max(1, min(threads, numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(threads)

    config = {
        "cpu_count": multiprocessing.cpu_count(),
        "threads": threads,
        "single_thread_mode": threads == 1,
        "blas_env": {var: os.environ.get(var) for var in BLAS_THREAD_VARS},
    }
    logger.info(f"🔧 Hilos: {threads} (CPUs: {config['cpu_count']})")
    return config
