#!/usr/bin/env python3
"""
Matrices de confusión, recall/precisión/F1 y exactitud con incertidumbre por subconjuntos
"""

from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix

from core.exceptions import InsufficientDataError, PreconditionError
from models.metrics import ConfusionMatrix, ScoreReport
from models.quantum import CLASS_NAMES, N_CLASSES, ClassLabel
from services.states import make_generator

EVAL_STREAM = 2 ** 62 + 32
MIN_PER_SUBSET = 25

# Celdas {sep, ent} × {sep, ent}: la negatividad no es accesible desde R
_RELAXED = np.zeros((N_CLASSES, N_CLASSES), dtype=bool)
_RELAXED[np.diag_indices(N_CLASSES)] = True
_RELAXED[ClassLabel.SEP, ClassLabel.ENT] = True
_RELAXED[ClassLabel.ENT, ClassLabel.SEP] = True

def confusion(true_labels: Sequence[int], predicted: Sequence[int]) -> ConfusionMatrix:
    """counts[c][c'] = #{k : true_k = c y pred_k = c'}"""
    true_labels = np.asarray(true_labels, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if true_labels.shape != predicted.shape:
        raise PreconditionError(
            f"Longitudes distintas: {len(true_labels)} etiquetas vs {len(predicted)} predicciones"
        )
    if len(true_labels) == 0:
        return ConfusionMatrix(counts=np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64))
    counts = confusion_matrix(true_labels, predicted, labels=list(range(N_CLASSES)))
    return ConfusionMatrix(counts=counts)

def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(num.shape, dtype=np.float64)
    np.divide(num, den, out=out, where=den > 0)
    return out

def _per_class(counts: np.ndarray):
    diag = np.diag(counts).astype(np.float64)
    rows = counts.sum(axis=1).astype(np.float64)
    cols = counts.sum(axis=0).astype(np.float64)
    recall = _safe_ratio(diag, rows)
    precision = _safe_ratio(diag, cols)
    # 0/0 → 0
    f1 = _safe_ratio(2.0 * recall * precision, recall + precision)
    total = float(counts.sum())
    accuracy = float(diag.sum()) / total
    relaxed = float(counts[_RELAXED].sum()) / total
    return recall, precision, f1, accuracy, relaxed

def scores(cm: ConfusionMatrix) -> ScoreReport:
    """
    A = Tr/Σ, recall por fila, precisión por columna, F1 armónica

    Filas o columnas vacías dan recall/precisión 0 y quedan marcadas.
    """
    counts = cm.counts
    if counts.sum() <= 0:
        raise PreconditionError("Matriz de confusión vacía")
    recall, precision, f1, accuracy, relaxed = _per_class(counts)
    return ScoreReport(
        recall=recall.tolist(),
        precision=precision.tolist(),
        f1=f1.tolist(),
        accuracy=accuracy,
        relaxed_accuracy=relaxed,
        macro_recall=float(recall.mean()),
        macro_precision=float(precision.mean()),
        macro_f1=float(f1.mean()),
        error_rate=1.0 - accuracy,
        relaxed_error_rate=1.0 - relaxed,
        empty_rows=[int(c) for c in np.flatnonzero(counts.sum(axis=1) == 0)],
        empty_columns=[int(c) for c in np.flatnonzero(counts.sum(axis=0) == 0)],
    )

def subset_scores(true_labels: Sequence[int], predicted: Sequence[int],
                  k: int = 12, seed: int = 0) -> ScoreReport:
    """
    Media y desviación estándar muestral sobre k subconjuntos contiguos
    (tras una permutación con semilla) del conjunto de test
    """
    true_labels = np.asarray(true_labels, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if true_labels.shape != predicted.shape:
        raise PreconditionError("Etiquetas y predicciones con longitudes distintas")
    if k < 1:
        raise PreconditionError(f"k debe ser ≥ 1, recibido {k}")
    if len(true_labels) < k * MIN_PER_SUBSET:
        raise InsufficientDataError(
            f"Se requieren ≥ {k * MIN_PER_SUBSET} estados de test para k={k}, hay {len(true_labels)}"
        )

    order = make_generator(seed, EVAL_STREAM).permutation(len(true_labels))
    shards = np.array_split(order, k)
    matrices = [confusion(true_labels[idx], predicted[idx]).counts for idx in shards]
    per_shard = [_per_class(m) for m in matrices]

    recall = np.array([s[0] for s in per_shard])
    precision = np.array([s[1] for s in per_shard])
    f1 = np.array([s[2] for s in per_shard])
    accuracy = np.array([s[3] for s in per_shard])
    relaxed = np.array([s[4] for s in per_shard])
    stack = np.stack(matrices).astype(np.float64)
    full = np.sum(matrices, axis=0)

    def std(values: np.ndarray) -> Optional[np.ndarray]:
        return values.std(axis=0, ddof=1) if k >= 2 else None

    def as_list(values: Optional[np.ndarray]):
        return None if values is None else values.tolist()

    return ScoreReport(
        recall=recall.mean(axis=0).tolist(),
        precision=precision.mean(axis=0).tolist(),
        f1=f1.mean(axis=0).tolist(),
        accuracy=float(accuracy.mean()),
        relaxed_accuracy=float(relaxed.mean()),
        macro_recall=float(recall.mean()),
        macro_precision=float(precision.mean()),
        macro_f1=float(f1.mean()),
        error_rate=1.0 - float(accuracy.mean()),
        relaxed_error_rate=1.0 - float(relaxed.mean()),
        empty_rows=[int(c) for c in np.flatnonzero(full.sum(axis=1) == 0)],
        empty_columns=[int(c) for c in np.flatnonzero(full.sum(axis=0) == 0)],
        subsets=k,
        recall_std=as_list(std(recall)),
        precision_std=as_list(std(precision)),
        f1_std=as_list(std(f1)),
        accuracy_std=None if k < 2 else float(accuracy.std(ddof=1)),
        relaxed_accuracy_std=None if k < 2 else float(relaxed.std(ddof=1)),
        cm_mean=stack.mean(axis=0).tolist(),
        cm_std=as_list(std(stack)),
    )

# ===== SALIDAS =====

def report_frame(report: ScoreReport) -> pd.DataFrame:
    """Una fila por clase más la fila 'overall' (A y medias macro)"""
    rows = []
    for c, name in enumerate(CLASS_NAMES):
        rows.append({
            "class": name,
            "recall": report.recall[c],
            "recall_std": report.recall_std[c] if report.recall_std else None,
            "precision": report.precision[c],
            "precision_std": report.precision_std[c] if report.precision_std else None,
            "f1": report.f1[c],
            "f1_std": report.f1_std[c] if report.f1_std else None,
        })
    rows.append({
        "class": "overall",
        "recall": report.macro_recall,
        "precision": report.macro_precision,
        "f1": report.macro_f1,
        "accuracy": report.accuracy,
        "accuracy_std": report.accuracy_std,
        "relaxed_accuracy": report.relaxed_accuracy,
        "relaxed_accuracy_std": report.relaxed_accuracy_std,
    })
    return pd.DataFrame(rows)

def confusion_frame(cm: ConfusionMatrix) -> pd.DataFrame:
    """Grilla 5×5 (filas = verdadera, columnas = predicha) para heatmaps"""
    return pd.DataFrame(cm.counts, index=list(CLASS_NAMES), columns=list(CLASS_NAMES))

def _pct(value: float, spread: Optional[float]) -> str:
    if spread is None:
        return f"{100 * value:6.2f}"
    return f"{100 * value:6.2f} ± {100 * spread:.2f}"

def format_table(report: ScoreReport, title: Optional[str] = None) -> str:
    """Tabla legible en porcentajes"""
    lines: List[str] = []
    if title:
        lines.append(title)
    header = f"{'clase':<8} {'recall':>16} {'precisión':>16} {'F1':>16}"
    lines.append(header)
    lines.append("-" * len(header))
    for c, name in enumerate(CLASS_NAMES):
        lines.append(
            f"{name:<8} "
            f"{_pct(report.recall[c], report.recall_std[c] if report.recall_std else None):>16} "
            f"{_pct(report.precision[c], report.precision_std[c] if report.precision_std else None):>16} "
            f"{_pct(report.f1[c], report.f1_std[c] if report.f1_std else None):>16}"
        )
    lines.append("-" * len(header))
    lines.append(f"A = {_pct(report.accuracy, report.accuracy_std)} %   "
                 f"A relajada = {_pct(report.relaxed_accuracy, report.relaxed_accuracy_std)} %")
    if report.empty_columns:
        never = ", ".join(CLASS_NAMES[c] for c in report.empty_columns)
        lines.append(f"⚠️ Clases nunca predichas: {never}")
    if report.empty_rows:
        absent = ", ".join(CLASS_NAMES[c] for c in report.empty_rows)
        lines.append(f"⚠️ Clases sin estados verdaderos: {absent}")
    return "\n".join(lines)
