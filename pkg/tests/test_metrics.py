#!/usr/bin/env python3
"""
Tests unitarios para matrices de confusión y métricas
"""

import numpy as np
import pytest

from core.exceptions import InsufficientDataError, PreconditionError
from models.metrics import ConfusionMatrix
from models.quantum import ClassLabel
from services.metrics import (
    confusion,
    confusion_frame,
    format_table,
    report_frame,
    scores,
    subset_scores,
)

class TestConfusion:
    """Tests para la matriz de confusión"""

    def test_hand_counted(self):
        """Test conteos a mano"""
        true = [0, 0, 1, 2, 3, 4, 4]
        pred = [0, 1, 1, 2, 4, 4, 3]
        counts = confusion(true, pred).counts
        assert counts[0, 0] == 1 and counts[0, 1] == 1
        assert counts[3, 4] == 1 and counts[4, 3] == 1
        assert counts.sum() == 7

    def test_sum_of_shards(self):
        """Test la matriz total es la suma de las de cada fragmento"""
        rng = np.random.default_rng(0)
        true = rng.integers(0, 5, 300)
        pred = rng.integers(0, 5, 300)
        total = confusion(true, pred)
        parts = confusion(true[:100], pred[:100]) + confusion(true[100:], pred[100:])
        assert np.array_equal(total.counts, parts.counts)

    def test_length_mismatch(self):
        """Test longitudes distintas → PreconditionError"""
        with pytest.raises(PreconditionError):
            confusion([0, 1], [0])

    def test_frame_labels(self):
        """Test grilla con nombres de clase"""
        frame = confusion_frame(confusion([0, 4], [0, 4]))
        assert list(frame.index) == ["sep", "ent", "FEF", "steer", "Bell"]
        assert frame.loc["Bell", "Bell"] == 1

class TestScores:
    """Tests para recall, precisión, F1 y exactitud"""

    def test_perfect_diagonal(self):
        """Test matriz diagonal → todo 1"""
        report = scores(ConfusionMatrix(counts=np.diag([10, 20, 30, 40, 50])))
        assert report.accuracy == 1.0
        assert report.f1 == [1.0] * 5
        assert report.error_rate == 0.0

    def test_single_column(self):
        """Test todo predicho como una clase → A = 1/5 y F1 = 0 en las demás"""
        counts = np.zeros((5, 5), dtype=int)
        counts[:, ClassLabel.FEF] = 10
        report = scores(ConfusionMatrix(counts=counts))
        assert report.accuracy == pytest.approx(0.2)
        assert report.recall[ClassLabel.FEF] == 1.0
        assert report.precision[ClassLabel.FEF] == pytest.approx(0.2)
        assert report.f1[ClassLabel.SEP] == 0.0
        assert report.empty_columns == [0, 1, 3, 4]

    def test_hand_computed_class(self):
        """Test recall/precisión/F1 de steer calculados a mano"""
        counts = np.diag([100] * 5)
        counts[ClassLabel.STEER, ClassLabel.STEER] = 995
        counts[ClassLabel.STEER, ClassLabel.BELL] = 5
        counts[ClassLabel.FEF, ClassLabel.STEER] = 7
        counts[ClassLabel.FEF, ClassLabel.FEF] = 93
        report = scores(ConfusionMatrix(counts=counts))
        recall = 995 / 1000
        precision = 995 / 1002
        assert report.recall[ClassLabel.STEER] == pytest.approx(recall)
        assert report.precision[ClassLabel.STEER] == pytest.approx(precision)
        assert report.f1[ClassLabel.STEER] == pytest.approx(2 * recall * precision / (recall + precision))

    def test_never_predicted_class(self):
        """Test columna FEF vacía → F1 = 0 y marcada"""
        counts = np.diag([10, 10, 0, 10, 10])
        counts[ClassLabel.FEF, ClassLabel.STEER] = 10
        report = scores(ConfusionMatrix(counts=counts))
        assert report.f1[ClassLabel.FEF] == 0.0
        assert ClassLabel.FEF in report.empty_columns
        assert "⚠️" in format_table(report)

    def test_relaxed_accuracy(self):
        """Test sep↔ent cuentan como aciertos en la exactitud relajada"""
        counts = np.diag([8, 8, 10, 10, 10])
        counts[0, 1] = 2
        counts[1, 0] = 2
        counts[2, 3] = 1
        report = scores(ConfusionMatrix(counts=counts))
        total = counts.sum()
        assert report.accuracy == pytest.approx(46 / total)
        assert report.relaxed_accuracy == pytest.approx(50 / total)
        assert report.relaxed_accuracy >= report.accuracy

    def test_empty_matrix(self):
        """Test matriz vacía → PreconditionError"""
        with pytest.raises(PreconditionError):
            scores(ConfusionMatrix(counts=np.zeros((5, 5), dtype=int)))

class TestSubsetScores:
    """Tests para la incertidumbre por subconjuntos"""

    def setup_method(self):
        rng = np.random.default_rng(1)
        self.true = rng.integers(0, 5, 1200)
        self.pred = np.where(rng.random(1200) < 0.9, self.true, rng.integers(0, 5, 1200))

    def test_mean_and_std(self):
        """Test media ≈ exactitud global y desviación definida para k = 12"""
        report = subset_scores(self.true, self.pred, k=12, seed=3)
        global_acc = float(np.mean(self.true == self.pred))
        assert report.accuracy == pytest.approx(global_acc, abs=1e-12)
        assert report.accuracy_std is not None and report.accuracy_std > 0
        assert len(report.cm_mean) == 5 and report.subsets == 12

    def test_single_subset_has_no_std(self):
        """Test k = 1 → sin desviación estándar"""
        report = subset_scores(self.true, self.pred, k=1)
        assert report.accuracy_std is None
        assert report.f1_std is None

    def test_identical_shards_zero_std(self):
        """Test predicción perfecta → desviación 0"""
        report = subset_scores(self.true, self.true, k=4)
        assert report.accuracy == 1.0
        assert report.accuracy_std == 0.0

    def test_deterministic(self):
        """Test misma semilla → mismo reporte"""
        a = subset_scores(self.true, self.pred, k=6, seed=9)
        b = subset_scores(self.true, self.pred, k=6, seed=9)
        assert a == b

    def test_insufficient_data(self):
        """Test menos de 25 estados por subconjunto → InsufficientDataError"""
        with pytest.raises(InsufficientDataError):
            subset_scores(self.true[:100], self.pred[:100], k=12)

    def test_report_frame(self):
        """Test una fila por clase más overall"""
        frame = report_frame(subset_scores(self.true, self.pred, k=4))
        assert list(frame["class"]) == ["sep", "ent", "FEF", "steer", "Bell", "overall"]
        assert frame.iloc[-1]["accuracy_std"] is not None
