#!/usr/bin/env python3
"""
Jerarquía de errores del pipeline con su código de salida de la CLI
"""

from typing import Optional

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_DIVERGENCE = 3
EXIT_IO = 4

class PipelineError(Exception):
    """Error base; la CLI lo traduce a exit_code"""
    exit_code: int = EXIT_PRECONDITION

class PreconditionError(PipelineError):
    """Entrada que viola la precondición de una operación"""

class ConfigError(PipelineError):
    """Configuración o flags inválidos"""

class MissingFeatureError(PreconditionError):
    """Máscara de features incompleta o incompatible con el modelo"""

class InsufficientDataError(PreconditionError):
    """Muy pocos registros para la operación pedida"""

class CannotEqualizeError(PreconditionError):
    """Alguna clase no tiene representantes"""

class NumericalDegeneracyError(PipelineError):
    """Resultado numérico inválido (R no PSD, Jacobi sin converger)"""
    exit_code = EXIT_DIVERGENCE

class DivergenceError(PipelineError):
    """Pérdida o activaciones no finitas durante el entrenamiento"""
    exit_code = EXIT_DIVERGENCE

    def __init__(self, message: str, epoch: Optional[int] = None, n_features: Optional[int] = None):
        self.epoch = epoch
        self.n_features = n_features
        details = []
        if epoch is not None:
            details.append(f"época {epoch}")
        if n_features is not None:
            details.append(f"n={n_features}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)

class DatasetCorruptionError(PipelineError):
    """Archivo binario inconsistente con su cabecera"""
    exit_code = EXIT_IO
