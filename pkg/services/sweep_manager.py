#!/usr/bin/env python3
"""
Barrido de reducción de features (n = 10..1) y reportes listos para graficar
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from core.exceptions import PreconditionError
from core.logger import logger
from models.features import FEATURE_NAMES, ReductionPlan
from models.metrics import ScoreReport
from models.quantum import CLASS_NAMES, N_CLASSES
from models.reports import SweepEntry, SweepReport
from models.training import TrainConfig, TrainHistory
from services import ann
from services.collective import apply_mask
from services.dataset_manager import load_split
from services.metrics import confusion, confusion_frame, report_frame, subset_scores
from utils.atomic_io import atomic_writer, read_json, write_json

PathLike = Union[str, Path]

SWEEP_PREFIX = "sweep-"
SWEEP_SUMMARY = "sweep.json"
CHANCE_ACCURACY = 1.0 / N_CLASSES
# Predicción uniforme sobre datos igualados: 5 celdas diagonales + sep↔ent
RELAXED_CHANCE_ACCURACY = 7.0 / N_CLASSES ** 2

def split_arrays(split: Dict[str, np.ndarray], retained: Sequence[int]) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """(X, y) por partición con las columnas retenidas"""
    arrays = {}
    for name, records in split.items():
        x = apply_mask(np.asarray(records["features"]), retained).astype(np.float32)
        y = np.asarray(records["label"]).astype(np.int64)
        arrays[name] = (x, y)
    return arrays

def write_frame(frame: pd.DataFrame, path: PathLike, index: bool = False) -> Path:
    with atomic_writer(path, "w") as fh:
        frame.to_csv(fh, index=index, lineterminator="\n")
    return Path(path)

def fit_split(split: Dict[str, np.ndarray], retained: Sequence[int], cfg: TrainConfig,
              init: Optional[ann.MlpModel] = None) -> Tuple[ann.MlpModel, TrainHistory]:
    """Entrenar sobre train/val de un dataset partido"""
    arrays = split_arrays(split, retained)
    x_train, y_train = arrays["train"]
    x_val, y_val = arrays["val"]
    return ann.train(x_train, y_train, x_val, y_val, cfg, model=init)

def score_split(model: ann.MlpModel, split: Dict[str, np.ndarray], retained: Sequence[int],
                subsets: int, seed: int, part: str = "test") -> Tuple[ScoreReport, np.ndarray, np.ndarray]:
    x, y = split_arrays({part: split[part]}, retained)[part]
    _, predictions = ann.evaluate(model, x, y)
    return subset_scores(y, predictions, k=subsets, seed=seed), y, predictions

class SweepManager:
    """Entrena y evalúa un modelo por cada n del plan"""

    def __init__(self, dataset: PathLike, out_dir: PathLike, cfg: TrainConfig, subsets: int = 12):
        self.dataset = Path(dataset)
        self.out_dir = Path(out_dir)
        self.cfg = cfg
        self.subsets = subsets
        self.split = load_split(self.dataset)

    def sweep_dir(self, plan: ReductionPlan) -> Path:
        return self.out_dir / f"{SWEEP_PREFIX}{plan.strategy}"

    def run_n(self, n: int, retained: Sequence[int], target: Path) -> SweepEntry:
        logger.info(f"🔍 n={n}: {[FEATURE_NAMES[k] for k in retained]}")
        # DivergenceError ya lleva n_features = n
        model, history = fit_split(self.split, retained, self.cfg)
        report, y, predictions = score_split(model, self.split, retained, self.subsets, self.cfg.seed)
        cm = confusion(y, predictions)

        target.mkdir(parents=True, exist_ok=True)
        ann.save_checkpoint(model, target / "model.qcnn")
        ann.write_history(history, target / "history.csv")
        write_frame(report_frame(report), target / "scores.csv")
        write_frame(confusion_frame(cm), target / "confusion.csv", index=True)

        entry = SweepEntry(
            n=n,
            retained=[FEATURE_NAMES[k] for k in retained],
            accuracy=report.accuracy,
            accuracy_std=report.accuracy_std,
            relaxed_accuracy=report.relaxed_accuracy,
            relaxed_accuracy_std=report.relaxed_accuracy_std,
            val_accuracy=history.best_val_acc,
            macro_f1=report.macro_f1,
            f1=report.f1,
            f1_std=report.f1_std,
            best_epoch=history.best_epoch,
            never_predicted=[CLASS_NAMES[c] for c in report.empty_columns],
        )
        logger.info(f"📊 n={n}: A={100 * entry.accuracy:.2f}% relajada={100 * entry.relaxed_accuracy:.2f}%")
        return entry

    def run(self, plan: ReductionPlan, sizes: Optional[List[int]] = None) -> SweepReport:
        """
        Barrido completo; escribe por n checkpoint, historial, scores y matriz
        de confusión, más la tabla exactitud vs n (con la fila n=0 de azar)
        """
        target = self.sweep_dir(plan)
        report = SweepReport(strategy=plan.strategy, dataset=str(self.dataset), subsets=self.subsets)
        for n in sizes or plan.sizes:
            if n not in plan.retained_sets:
                raise PreconditionError(f"El plan {plan.strategy} no define n={n}")
            report.entries.append(self.run_n(n, plan.retained_sets[n], target / f"n{n:02d}"))
        report.entries.append(baseline_entry())
        write_frame(accuracy_frame(report), target / "accuracy_vs_n.csv")
        write_json(target / SWEEP_SUMMARY, report.model_dump(mode="json"))
        logger.info(f"✅ Barrido {plan.strategy} completo: {target}")
        return report

def baseline_entry() -> SweepEntry:
    """n = 0: sin información el clasificador acierta al azar"""
    return SweepEntry(
        n=0,
        accuracy=CHANCE_ACCURACY,
        relaxed_accuracy=RELAXED_CHANCE_ACCURACY,
        macro_f1=CHANCE_ACCURACY,
        f1=[CHANCE_ACCURACY] * N_CLASSES,
    )

def accuracy_frame(report: SweepReport) -> pd.DataFrame:
    rows = [{
        "n": e.n,
        "accuracy": e.accuracy,
        "accuracy_std": e.accuracy_std,
        "relaxed_accuracy": e.relaxed_accuracy,
        "relaxed_accuracy_std": e.relaxed_accuracy_std,
        "macro_f1": e.macro_f1,
        "val_accuracy": e.val_accuracy,
        "retained": " ".join(e.retained),
    } for e in sorted(report.entries, key=lambda e: -e.n)]
    return pd.DataFrame(rows)

def f1_frame(report: SweepReport) -> pd.DataFrame:
    rows = []
    for e in sorted(report.entries, key=lambda e: -e.n):
        if e.n == 0:
            continue
        for c, name in enumerate(CLASS_NAMES):
            rows.append({
                "n": e.n,
                "class": name,
                "f1": e.f1[c],
                "f1_std": e.f1_std[c] if e.f1_std else None,
            })
    return pd.DataFrame(rows)

def monotonicity_violations(report: SweepReport, tolerance: float = 0.015) -> List[int]:
    """n cuya exactitud supera a la de n+1 por más de tolerance"""
    by_n = {e.n: e.accuracy for e in report.entries}
    return [n for n in sorted(by_n) if n + 1 in by_n and by_n[n] > by_n[n + 1] + tolerance]

# ===== REPORTE =====

def load_sweeps(out_dir: PathLike) -> Dict[str, SweepReport]:
    sweeps = {}
    for path in sorted(Path(out_dir).glob(f"{SWEEP_PREFIX}*/{SWEEP_SUMMARY}")):
        report = SweepReport.model_validate(read_json(path))
        sweeps[report.strategy] = report
    return sweeps

def build_report(out_dir: PathLike) -> List[Path]:
    """
    CSV para graficar: exactitud vs n, F1 por clase vs n, grillas de
    confusión por n y, con más de un plan, comparación de validación
    """
    out_dir = Path(out_dir)
    sweeps = load_sweeps(out_dir)
    if not sweeps:
        raise PreconditionError(f"No hay barridos en {out_dir}")
    target = out_dir / "report"
    written = []
    for strategy, report in sweeps.items():
        written.append(write_frame(accuracy_frame(report), target / f"accuracy_vs_n.{strategy}.csv"))
        written.append(write_frame(f1_frame(report), target / f"f1_vs_n.{strategy}.csv"))
        for entry in report.entries:
            source = out_dir / f"{SWEEP_PREFIX}{strategy}" / f"n{entry.n:02d}" / "confusion.csv"
            if source.exists():
                grid = pd.read_csv(source, index_col=0)
                written.append(write_frame(grid, target / f"confusion.{strategy}.n{entry.n:02d}.csv", index=True))
        violations = monotonicity_violations(report)
        if violations:
            logger.warning(f"⚠️ {strategy}: exactitud no monótona en n={violations}")
    if len(sweeps) > 1:
        sizes = sorted({e.n for r in sweeps.values() for e in r.entries if e.n > 0}, reverse=True)
        rows = []
        for n in sizes:
            row = {"n": n}
            for strategy, report in sweeps.items():
                entry = report.entry(n)
                row[strategy] = entry.val_accuracy if entry else None
            rows.append(row)
        written.append(write_frame(pd.DataFrame(rows), target / "plan_comparison.csv"))
    logger.info(f"📄 Reporte: {len(written)} archivos en {target}")
    return written
