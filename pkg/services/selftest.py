#!/usr/bin/env python3
"""
Verificaciones de oráculo e invariantes ejecutables desde la CLI

    oracle     espectro de R colectiva vs TᵀT y cantidades desde las features
    werner     umbrales 1/3, 1/√3, 1/√2 de la familia de Werner
    hierarchy  B > 0 ⇒ S3 > 0 ⇒ FEF_w > 0 ⇒ N > 0 sobre estados aleatorios
    gradient   gradientes analíticos vs diferencias finitas
"""

from typing import Callable, Dict, List, Tuple

import numpy as np

from core.logger import logger
from models.quantum import ClassLabel, N_CLASSES, StateSeed
from models.reports import CheckResult
from services import ann
from services.collective import batch_features, batch_reconstruct_R, collective_R
from services.correlations import (
    CLASSIFICATION_EPS,
    batch_quantities,
    hierarchy_violations,
    r_matrix,
    werner_threshold,
    witnesses_from_spectrum,
)
from services.states import iter_shards, make_generator
from utils.qmath import batch_sym3_spectrum

SELFTEST_STREAM = 2 ** 62 + 48

QUICK_SIZES = {"oracle": 1_000, "hierarchy": 100_000, "gradient": 20}
FULL_SIZES = {"oracle": 10_000, "hierarchy": 1_000_000, "gradient": 20}

SPECTRUM_TOL = 1e-10
QUANTITY_TOL = 1e-8
WERNER_TOL = 1e-6
GRADIENT_TOL = 1e-4
# Distancia mínima al codo de la ReLU para que la diferencia central sea válida
RELU_MARGIN = 1e-3

WERNER_EXPECTED = {
    ClassLabel.FEF: 1.0 / 3.0,
    ClassLabel.STEER: 1.0 / np.sqrt(3.0),
    ClassLabel.BELL: 1.0 / np.sqrt(2.0),
}

def _states(count: int, seed: int) -> np.ndarray:
    return np.concatenate([rhos for _, rhos in iter_shards(count, StateSeed(seed=seed, stream_index=0))])

def check_oracle(count: int, seed: int = 0) -> CheckResult:
    rhos = _states(count, seed)
    collective = np.linalg.eigvalsh(collective_R(rhos))
    direct = np.linalg.eigvalsh(r_matrix(rhos))
    spectrum_err = float(np.max(np.abs(collective - direct)))

    eigs, trace_sqrt = batch_sym3_spectrum(batch_reconstruct_R(batch_features(rhos)))
    rebuilt = np.stack(witnesses_from_spectrum(eigs, trace_sqrt), axis=1)
    quantity_err = float(np.max(np.abs(rebuilt - batch_quantities(rhos)[:, 1:])))

    passed = spectrum_err < SPECTRUM_TOL and quantity_err < QUANTITY_TOL
    return CheckResult(
        name="oracle", passed=bool(passed), value=max(spectrum_err, quantity_err), threshold=QUANTITY_TOL,
        detail=f"{count} estados: espectro {spectrum_err:.2e}, cantidades {quantity_err:.2e}",
    )

def check_werner() -> CheckResult:
    errors = {
        label: abs(werner_threshold(label) - expected) for label, expected in WERNER_EXPECTED.items()
    }
    worst = max(errors.values())
    detail = ", ".join(f"{label.short_name}: {err:.1e}" for label, err in errors.items())
    return CheckResult(name="werner", passed=bool(worst < WERNER_TOL), value=worst, threshold=WERNER_TOL, detail=detail)

def check_hierarchy(count: int, seed: int = 0) -> CheckResult:
    violations = 0
    for _, rhos in iter_shards(count, StateSeed(seed=seed, stream_index=0)):
        violations += hierarchy_violations(batch_quantities(rhos), band=CLASSIFICATION_EPS)
    return CheckResult(
        name="hierarchy", passed=bool(violations == 0), value=float(violations), threshold=0.0,
        detail=f"{violations} violaciones en {count} estados",
    )

def random_check_case(rng: np.random.Generator) -> Tuple[ann.MlpModel, np.ndarray, np.ndarray]:
    """Modelo pequeño (H=8) con parámetros perturbados y un batch ≤ 16 lejos del codo de la ReLU"""
    n_inputs = int(rng.integers(1, 11))
    model = ann.MlpModel(
        n_inputs, hidden_width=8, bn_input=bool(rng.integers(0, 2)),
        seed=int(rng.integers(0, 2 ** 31)), dtype=np.float64,
    )
    for value in model.params.values():
        value += 0.1 * rng.standard_normal(value.shape)
    while True:
        batch = int(rng.integers(4, 17))
        x = rng.standard_normal((batch, n_inputs))
        y = rng.integers(0, N_CLASSES, batch)
        if model.relu_margin(x) > RELU_MARGIN:
            return model, x, y

def check_gradient(configs: int, seed: int = 0) -> CheckResult:
    rng = make_generator(seed, SELFTEST_STREAM)
    worst = 0.0
    for _ in range(configs):
        model, x, y = random_check_case(rng)
        worst = max(worst, ann.gradient_check(model, x, y))
    return CheckResult(
        name="gradient", passed=bool(worst < GRADIENT_TOL), value=worst, threshold=GRADIENT_TOL,
        detail=f"{configs} configuraciones, error relativo máximo {worst:.2e}",
    )

def run_selftest(full: bool = False, seed: int = 0) -> List[CheckResult]:
    sizes = FULL_SIZES if full else QUICK_SIZES
    checks: Dict[str, Callable[[], CheckResult]] = {
        "oracle": lambda: check_oracle(sizes["oracle"], seed),
        "werner": check_werner,
        "hierarchy": lambda: check_hierarchy(sizes["hierarchy"], seed),
        "gradient": lambda: check_gradient(sizes["gradient"], seed),
    }
    results = []
    for name, check in checks.items():
        result = check()
        icon = "✅" if result.passed else "❌"
        logger.info(f"{icon} {name}: {result.detail}")
        results.append(result)
    return results
