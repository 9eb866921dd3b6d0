#!/usr/bin/env python3
"""
Modelos de datos del pipeline
"""

# Estados y correlaciones
from .quantum import ClassLabel, QuantRecord, StateSeed, CLASS_NAMES, N_CLASSES

# Medidas colectivas
from .features import (
    MinimalBasis,
    FeatureVector,
    ReductionPlan,
    FEATURE_NAMES,
    FEATURE_PAIRS,
    N_FEATURES,
)

# Dataset
from .dataset import SampleRecord, DatasetHeader, DatasetSummary

# Entrenamiento
from .training import TrainConfig, EpochRecord, TrainHistory, EvaluationResult

# Métricas
from .metrics import ConfusionMatrix, ScoreReport

# Barrido y selftest
from .reports import SweepEntry, SweepReport, CheckResult

# Manifiesto de corrida
from .manifest import ArtifactEntry, RunManifest

__all__ = [
    # Quantum Models
    "ClassLabel",
    "QuantRecord",
    "StateSeed",
    "CLASS_NAMES",
    "N_CLASSES",

    # Feature Models
    "MinimalBasis",
    "FeatureVector",
    "ReductionPlan",
    "FEATURE_NAMES",
    "FEATURE_PAIRS",
    "N_FEATURES",

    # Dataset Models
    "SampleRecord",
    "DatasetHeader",
    "DatasetSummary",

    # Training Models
    "TrainConfig",
    "EpochRecord",
    "TrainHistory",
    "EvaluationResult",

    # Metrics Models
    "ConfusionMatrix",
    "ScoreReport",

    # Report Models
    "SweepEntry",
    "SweepReport",
    "CheckResult",

    # Manifest Models
    "ArtifactEntry",
    "RunManifest",
]
