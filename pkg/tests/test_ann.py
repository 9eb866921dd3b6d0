#!/usr/bin/env python3
"""
Tests unitarios para el clasificador feed-forward
"""

import numpy as np
import pytest

from core.exceptions import DatasetCorruptionError, MissingFeatureError, PreconditionError
from models.quantum import N_CLASSES, ClassLabel, StateSeed
from models.training import TrainConfig
from services.ann import (
    MlpModel,
    batch_norm_forward,
    cross_entropy,
    evaluate,
    gradient_check,
    load_checkpoint,
    predict,
    predict_one,
    read_history,
    save_checkpoint,
    softmax,
    train,
    write_history,
)
from services.collective import features
from services.dataset_manager import equalize, generate, read_dataset, split
from services.selftest import GRADIENT_TOL, random_check_case
from services.states import make_generator, singlet

def toy_clusters(per_class, seed=0, spread=0.3):
    """Cinco nubes gaussianas bien separadas en el plano"""
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(N_CLASSES) / N_CLASSES
    centers = 5.0 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    y = np.repeat(np.arange(N_CLASSES), per_class)
    x = centers[y] + spread * rng.standard_normal((len(y), 2))
    order = rng.permutation(len(y))
    return x[order].astype(np.float32), y[order]

def small_config(**kwargs):
    base = dict(
        learning_rate=1e-2, batch_phase1=64, batch_phase2=512,
        max_epochs=60, patience=5, hidden_width=32, seed=3,
    )
    base.update(kwargs)
    return TrainConfig(**base)

class TestPieces:
    """Tests para softmax, entropía cruzada y batch-norm"""

    def test_softmax_sums_to_one(self):
        """Test filas de softmax suman 1 y son positivas"""
        logits = np.random.default_rng(1).standard_normal((10, 5)) * 50
        probs = softmax(logits)
        assert np.allclose(probs.sum(axis=1), 1.0)
        assert np.all(probs >= 0)

    def test_cross_entropy_uniform(self):
        """Test logits nulos → pérdida ln 5"""
        loss, grad = cross_entropy(np.zeros((4, 5), dtype=np.float32), np.array([0, 1, 2, 3]))
        assert loss == pytest.approx(np.log(5.0))
        assert grad.dtype == np.float32
        assert np.allclose(grad.sum(axis=1), 0.0, atol=1e-7)

    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_batch_norm_normalizes(self, dtype):
        """Test en entrenamiento la salida de BN tiene media 0 y varianza 1 por feature"""
        rng = np.random.default_rng(2)
        x = (2.5 * rng.standard_normal((512, 6)) + rng.uniform(-1, 1, 6)).astype(dtype)
        ones, zeros = np.ones(6, dtype=dtype), np.zeros(6, dtype=dtype)
        out, _ = batch_norm_forward(x, ones, zeros, 1e-5)
        assert np.all(np.abs(out.astype(np.float64).mean(axis=0)) < 1e-6)
        assert np.all(np.abs(out.astype(np.float64).var(axis=0) - 1.0) < 1e-4)

    def test_running_stats_converge(self):
        """Test las estadísticas acumuladas convergen a las del dataset"""
        rng = np.random.default_rng(4)
        model = MlpModel(6, hidden_width=16, seed=2)
        data = 3.0 + 2.0 * rng.standard_normal((20_000, 6))
        labels = rng.integers(0, 5, len(data))
        for _ in range(200):
            rows = rng.integers(0, len(data), 256)
            model.loss_and_gradients(data[rows], labels[rows])
        assert np.allclose(model.running["bn0.mean"], data.mean(axis=0), atol=0.15)
        assert np.allclose(model.running["bn0.var"], data.var(axis=0), rtol=0.1)

class TestMlpModel:
    """Tests para la arquitectura y la inferencia"""

    def setup_method(self):
        self.rng = np.random.default_rng(5)
        self.model = MlpModel(10, hidden_width=64, seed=1)

    def test_initial_output_near_uniform(self):
        """Test con la inicialización la salida es casi uniforme en promedio"""
        x = self.rng.standard_normal((256, 10))
        probs = self.model.forward(x, training=True)
        deviation = np.abs(probs - 0.2)
        assert deviation.mean() < 0.05
        assert deviation.max() < 0.2
        loss = self.model.loss(x, self.rng.integers(0, 5, 256))
        assert loss == pytest.approx(np.log(5.0), abs=0.15)

    def test_inference_deterministic(self):
        """Test misma entrada → misma salida bit a bit"""
        x = self.rng.standard_normal((8, 10))
        a = self.model.forward(x, training=False)
        b = self.model.forward(x, training=False)
        assert np.array_equal(a, b)

    def test_inference_row_independent(self):
        """Test en inferencia cada fila no depende del resto del batch"""
        x = self.rng.standard_normal((8, 10))
        full = self.model.forward(x, training=False)
        single = self.model.forward(x[3:4], training=False)
        assert np.allclose(full[3], single[0], atol=1e-6)

    def test_duplicate_rows_same_prediction(self):
        """Test filas duplicadas → predicciones idénticas"""
        x = np.repeat(self.rng.standard_normal((1, 10)), 4, axis=0)
        labels, probs = predict(self.model, x)
        assert len(set(labels.tolist())) == 1
        assert np.allclose(probs, probs[0], atol=1e-7)

    def test_training_mode_requires_batch_of_two(self):
        """Test batch 1 en entrenamiento → PreconditionError"""
        with pytest.raises(PreconditionError):
            self.model.logits(self.rng.standard_normal((1, 10)), training=True)

    def test_running_stats_updated(self):
        """Test la media acumulada se mueve hacia la del batch con momentum"""
        x = 3.0 + self.rng.standard_normal((64, 10))
        y = self.rng.integers(0, 5, 64)
        self.model.loss_and_gradients(x, y)
        mean = self.model.running["bn0.mean"]
        assert np.allclose(mean, 0.1 * x.mean(axis=0), atol=1e-5)

    def test_loss_does_not_touch_running_stats(self):
        """Test loss() no altera las estadísticas acumuladas"""
        before = self.model.snapshot()
        self.model.loss(self.rng.standard_normal((16, 10)), self.rng.integers(0, 5, 16))
        after = self.model.snapshot()
        assert all(np.array_equal(before[k], after[k]) for k in before)

    def test_wrong_width(self):
        """Test entrada con otra n → MissingFeatureError"""
        with pytest.raises(MissingFeatureError):
            self.model.forward(np.zeros((3, 9)), training=False)

    def test_argmax_tie_lower_index(self):
        """Test empate de logits → clase de índice menor"""
        model = MlpModel(2, hidden_width=4, seed=0)
        for name in ("dense3.W", "dense3.b"):
            model.params[name][...] = 0.0
        label, probs = predict_one(model, np.array([0.5, -0.5]))
        assert label == ClassLabel.SEP
        assert np.allclose(probs, 0.2)

    def test_zero_output_weights_bias_gradient(self):
        """Test W de salida nula → ∂L/∂b = media(softmax − one-hot)"""
        model = MlpModel(3, hidden_width=8, seed=2, dtype=np.float64)
        model.params["dense3.W"][...] = 0.0
        y = np.array([0, 0, 1, 4])
        _, grads = model.loss_and_gradients(self.rng.standard_normal((4, 3)), y, update_running=False)
        expected = np.full(5, 0.2) - np.bincount(y, minlength=5) / 4
        assert np.allclose(grads["dense3.b"], expected)
        assert np.allclose(grads["dense2.W"], 0.0)

    @pytest.mark.parametrize("bn_input", [True, False])
    def test_state_names_order(self, bn_input):
        """Test orden de serialización con y sin BN de entrada"""
        names = MlpModel(4, hidden_width=8, bn_input=bn_input).state_names()
        assert names[-2:] == ["dense3.W", "dense3.b"]
        assert ("bn0.gamma" in names) == bn_input

class TestGradientCheck:
    """Tests para la verificación de gradientes"""

    def test_random_configurations(self):
        """Test 5 configuraciones aleatorias con error relativo < 1e-4"""
        rng = make_generator(0, 99)
        for _ in range(5):
            model, x, y = random_check_case(rng)
            assert gradient_check(model, x, y) < GRADIENT_TOL

    def test_original_model_untouched(self):
        """Test gradient_check trabaja sobre una copia"""
        model, x, y = random_check_case(make_generator(1, 99))
        before = model.snapshot()
        gradient_check(model, x, y)
        assert all(np.array_equal(before[k], model.array(k)) for k in before)

class TestTraining:
    """Tests para el bucle de entrenamiento"""

    def test_separable_toy_problem(self):
        """Test nubes separables → exactitud ≥ 99 %"""
        x, y = toy_clusters(400, seed=1)
        xv, yv = toy_clusters(100, seed=2)
        xt, yt = toy_clusters(200, seed=3)
        model, history = train(x, y, xv, yv, small_config())
        result, predictions = evaluate(model, xt, yt)
        assert result.accuracy >= 0.99
        assert predictions.dtype == np.uint8
        assert history.best_epoch is not None

    def test_loss_decreases(self):
        """Test la pérdida de entrenamiento baja respecto a la primera época"""
        x, y = toy_clusters(200, seed=4)
        xv, yv = toy_clusters(50, seed=5)
        _, history = train(x, y, xv, yv, small_config(max_epochs=10, patience=10))
        losses = [r.train_loss for r in history.epochs]
        assert losses[-1] < losses[0]
        assert losses[0] < np.log(5.0) + 0.2

    def test_shuffled_labels_at_chance(self):
        """Test etiquetas aleatorias → exactitud ≈ 1/5 en test"""
        rng = np.random.default_rng(6)
        x = rng.standard_normal((2000, 4)).astype(np.float32)
        y = rng.integers(0, 5, 2000)
        xv = rng.standard_normal((500, 4)).astype(np.float32)
        yv = rng.integers(0, 5, 500)
        xt = rng.standard_normal((5000, 4)).astype(np.float32)
        yt = rng.integers(0, 5, 5000)
        model, _ = train(x, y, xv, yv, small_config(learning_rate=1e-3, max_epochs=20, patience=3))
        result, _ = evaluate(model, xt, yt)
        assert abs(result.accuracy - 0.2) < 0.04

    def test_deterministic(self):
        """Test misma semilla → mismos pesos"""
        x, y = toy_clusters(60, seed=7)
        xv, yv = toy_clusters(20, seed=8)
        cfg = small_config(max_epochs=3)
        a, _ = train(x, y, xv, yv, cfg)
        b, _ = train(x, y, xv, yv, cfg)
        assert all(np.array_equal(a.array(k), b.array(k)) for k in a.state_names())

    def test_max_epochs_spans_phases(self):
        """Test max_epochs cuenta ambas fases"""
        x, y = toy_clusters(60, seed=9)
        xv, yv = toy_clusters(20, seed=10)
        _, history = train(x, y, xv, yv, small_config(max_epochs=4, patience=100))
        assert len(history.epochs) == 4
        assert {r.phase for r in history.epochs} == {1}

    def test_batch_larger_than_train(self):
        """Test batch_phase1 > |train| → PreconditionError"""
        x, y = toy_clusters(5, seed=11)
        with pytest.raises(PreconditionError):
            train(x, y, x, y, small_config())

    def test_init_model_width_mismatch(self):
        """Test modelo inicial con otra n → MissingFeatureError"""
        x, y = toy_clusters(100, seed=12)
        with pytest.raises(MissingFeatureError):
            train(x, y, x, y, small_config(), model=MlpModel(3, hidden_width=32))

class TestPersistence:
    """Tests para checkpoints e historial"""

    def test_checkpoint_round_trip(self, tmp_path):
        """Test guardar y cargar reproduce las predicciones"""
        model = MlpModel(6, hidden_width=16, bn_input=False, seed=4)
        model.running["bn1.mean"][...] = 0.25
        path = save_checkpoint(model, tmp_path / "model.qcnn")
        loaded = load_checkpoint(path)
        assert loaded.n_inputs == 6 and loaded.bn_input is False
        x = np.random.default_rng(0).standard_normal((10, 6))
        assert np.array_equal(model.forward(x, training=False), loaded.forward(x, training=False))

    def test_truncated_checkpoint(self, tmp_path):
        """Test checkpoint truncado → DatasetCorruptionError"""
        path = save_checkpoint(MlpModel(2, hidden_width=4), tmp_path / "m.qcnn")
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(DatasetCorruptionError):
            load_checkpoint(path)

    def test_bad_magic(self, tmp_path):
        """Test magic inválido → DatasetCorruptionError"""
        path = tmp_path / "m.qcnn"
        path.write_bytes(b"\0" * 128)
        with pytest.raises(DatasetCorruptionError):
            load_checkpoint(path)

    def test_history_csv(self, tmp_path):
        """Test historial con una fila por época"""
        x, y = toy_clusters(40, seed=13)
        _, history = train(x, y, x, y, small_config(max_epochs=2))
        frame = read_history(write_history(history, tmp_path / "history.csv"))
        assert list(frame.columns) == ["epoch", "phase", "batch_size", "train_loss", "val_loss", "val_acc"]
        assert len(frame) == 2

@pytest.mark.slow
class TestRealDataset:
    """Tests de entrenamiento sobre estados cuánticos reales a escala reducida"""

    def test_full_features_classify_singlet_as_bell(self, tmp_path):
        """Test n = 10 sobre ≈ 10⁵ estados igualados: validación ≥ 85% y singlete → Bell"""
        raw = tmp_path / "raw.qcd"
        generate(300_000, StateSeed(seed=31), raw)
        _, records = read_dataset(raw)
        train_part, val_part, _ = split(equalize(records, seed=2), seed=2)
        cfg = small_config(
            learning_rate=1e-3, batch_phase1=512, batch_phase2=8192,
            max_epochs=300, patience=10, hidden_width=256,
        )
        model, history = train(
            train_part["features"].astype(np.float32), train_part["label"].astype(np.int64),
            val_part["features"].astype(np.float32), val_part["label"].astype(np.int64), cfg,
        )
        assert history.best_val_acc >= 0.85
        label, _ = predict_one(model, np.asarray(features(singlet()).values))
        assert label == ClassLabel.BELL
