#!/usr/bin/env python3
"""
Tests unitarios para el barrido, los reportes y el selftest
"""

import warnings

import pandas as pd
import pytest

from core.exceptions import PreconditionError
from models.quantum import CLASS_NAMES, StateSeed
from models.reports import SweepEntry, SweepReport
from models.training import TrainConfig
from services.collective import reduction_plan
from services.dataset_manager import equalize, generate, read_dataset, write_dataset, write_split
from services.selftest import check_gradient, check_hierarchy, check_oracle, check_werner
from services.sweep_manager import (
    CHANCE_ACCURACY,
    RELAXED_CHANCE_ACCURACY,
    SWEEP_SUMMARY,
    SweepManager,
    accuracy_frame,
    baseline_entry,
    build_report,
    f1_frame,
    monotonicity_violations,
)
from utils.atomic_io import write_json

def entry(n, accuracy, val=None):
    return SweepEntry(
        n=n, accuracy=accuracy, relaxed_accuracy=accuracy, macro_f1=accuracy,
        f1=[accuracy] * 5, val_accuracy=val,
    )

class TestSweepTables:
    """Tests para las tablas del barrido"""

    def setup_method(self):
        self.report = SweepReport(
            strategy="paper", dataset="eq.qcd", subsets=12,
            entries=[entry(10, 0.98), entry(5, 0.95), entry(4, 0.97), entry(3, 0.90), baseline_entry()],
        )

    def test_baseline(self):
        """Test n = 0 con exactitud 1/5 y relajada 7/25"""
        base = baseline_entry()
        assert base.n == 0
        assert base.accuracy == pytest.approx(CHANCE_ACCURACY)
        assert base.relaxed_accuracy == pytest.approx(0.28)
        assert RELAXED_CHANCE_ACCURACY == pytest.approx(7 / 25)

    def test_accuracy_frame_order(self):
        """Test filas de mayor a menor n terminando en 0"""
        frame = accuracy_frame(self.report)
        assert list(frame["n"]) == [10, 5, 4, 3, 0]

    def test_f1_frame_skips_baseline(self):
        """Test F1 por clase sin la fila de azar"""
        frame = f1_frame(self.report)
        assert 0 not in set(frame["n"])
        assert len(frame) == 4 * 5

    def test_monotonicity(self):
        """Test n = 4 por encima de n = 5 más allá de la tolerancia"""
        assert monotonicity_violations(self.report) == [4]
        assert monotonicity_violations(self.report, tolerance=0.05) == []

    def test_entry_lookup(self):
        """Test búsqueda de una entrada por n"""
        assert self.report.entry(5).accuracy == 0.95
        assert self.report.entry(7) is None

class TestBuildReport:
    """Tests para el reporte a partir de barridos guardados"""

    def write_sweep(self, out, strategy, entries):
        report = SweepReport(strategy=strategy, dataset="eq.qcd", subsets=2, entries=entries)
        write_json(out / f"sweep-{strategy}" / SWEEP_SUMMARY, report.model_dump(mode="json"))

    def test_no_sweeps(self, tmp_path):
        """Test directorio sin barridos → PreconditionError"""
        with pytest.raises(PreconditionError):
            build_report(tmp_path)

    def test_plan_comparison(self, tmp_path):
        """Test con dos estrategias se compara la exactitud de validación"""
        self.write_sweep(tmp_path, "paper", [entry(2, 0.8, val=0.81), baseline_entry()])
        self.write_sweep(tmp_path, "nested", [entry(2, 0.7, val=0.72), baseline_entry()])
        written = build_report(tmp_path)
        names = {p.name for p in written}
        assert {"accuracy_vs_n.paper.csv", "accuracy_vs_n.nested.csv", "plan_comparison.csv"} <= names
        frame = pd.read_csv(tmp_path / "report" / "plan_comparison.csv")
        assert frame.loc[0, "paper"] == pytest.approx(0.81)
        assert frame.loc[0, "nested"] == pytest.approx(0.72)

class TestSelftestChecks:
    """Tests para las verificaciones del selftest a tamaño reducido"""

    def test_werner(self):
        """Test umbrales de Werner"""
        assert check_werner().passed

    def test_oracle(self):
        """Test oráculo sobre 200 estados"""
        result = check_oracle(200, seed=1)
        assert result.passed, result.detail

    def test_hierarchy(self):
        """Test jerarquía sobre 2000 estados"""
        assert check_hierarchy(2000, seed=1).value == 0.0

    def test_gradient(self):
        """Test gradientes en 3 configuraciones"""
        result = check_gradient(3, seed=1)
        assert result.passed, result.detail

    def test_results_are_plain_bools(self):
        """Test passed es bool de Python sin DeprecationWarning de numpy"""
        with warnings.catch_warnings():
            warnings.filterwarnings("error", message=r"(?i).*bool", category=DeprecationWarning)
            results = [check_werner(), check_hierarchy(200, seed=2), check_gradient(1, seed=2)]
        assert all(type(r.passed) is bool for r in results)

    @pytest.mark.slow
    def test_full_selftest(self):
        """Test selftest completo (10⁴ y 10⁶ estados)"""
        from services.selftest import run_selftest

        results = run_selftest(full=True, seed=0)
        assert all(r.passed for r in results), [r.detail for r in results if not r.passed]

# Escala de escritorio: 10⁶ crudos → ≈ 3.3·10⁵ igualados
DESKTOP_RAW = 1_000_000
DESKTOP_CONFIG = dict(
    learning_rate=1e-3, batch_phase1=1024, batch_phase2=16384,
    max_epochs=300, patience=10, hidden_width=256, seed=0,
)

@pytest.fixture(scope="module")
def desktop_sweep(tmp_path_factory):
    """Barrido completo del plan por defecto sobre un dataset real igualado"""
    out = tmp_path_factory.mktemp("desktop")
    raw = out / "raw.qcd"
    generate(DESKTOP_RAW, StateSeed(seed=20240611), raw)
    header, records = read_dataset(raw)
    eq = out / "raw.eq.qcd"
    write_dataset(eq, equalize(records, seed=1), header.generator_seed, header.stream_index)
    write_split(eq, seed=1)
    manager = SweepManager(eq, out, TrainConfig(**DESKTOP_CONFIG), subsets=12)
    return manager.run(reduction_plan("paper"))

@pytest.mark.slow
class TestDesktopSweep:
    """Tests de exactitud del barrido a escala de escritorio"""

    def test_accuracy_targets(self, desktop_sweep):
        """Test A ≥ 89% (n=10), ≥ 68% (n=5), 30-40% (n=1) y relajada ≥ 97% (n=10)"""
        assert desktop_sweep.entry(10).accuracy >= 0.89
        assert desktop_sweep.entry(10).relaxed_accuracy >= 0.97
        assert desktop_sweep.entry(5).accuracy >= 0.68
        assert 0.30 <= desktop_sweep.entry(1).accuracy <= 0.40

    def test_monotone_in_n(self, desktop_sweep):
        """Test la exactitud no crece al quitar features (tolerancia 1.5 pp)"""
        assert monotonicity_violations(desktop_sweep, tolerance=0.015) == []

    def test_single_feature_never_predicts_fef(self, desktop_sweep):
        """Test con n = 1 ningún estado se predice FEF y F1 se binariza"""
        single = desktop_sweep.entry(1)
        assert "FEF" in single.never_predicted
        f1 = dict(zip(CLASS_NAMES, single.f1))
        assert f1["FEF"] == 0.0
        assert min(f1["sep"], f1["Bell"]) > max(f1["FEF"], f1["steer"])
