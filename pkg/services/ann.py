#!/usr/bin/env python3
"""
Clasificador feed-forward implementado desde cero con numpy

    [BN] → dense(H) → ReLU → BN → dense(H) → ReLU → BN → dense(5) → softmax

Cómputo en float32; pérdidas y métricas acumuladas en float64.
"""

from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from core.exceptions import DatasetCorruptionError, DivergenceError, MissingFeatureError, PreconditionError
from core.logger import logger
from models.quantum import N_CLASSES, ClassLabel
from models.training import EpochRecord, EvaluationResult, TrainConfig, TrainHistory
from services.states import make_generator
from utils.atomic_io import atomic_writer

INIT_STREAM = 2 ** 62 + 16
SHUFFLE_STREAM = 2 ** 62 + 17

# La capa de salida arranca casi nula: probabilidades ~uniformes y pérdida ~ln 5
OUTPUT_INIT_SCALE = 0.1

EVAL_BATCH = 65536

CHECKPOINT_MAGIC = b"QCORRNN1"
CHECKPOINT_VERSION = 1
CHECKPOINT_HEADER_DTYPE = np.dtype([
    ("magic", "S8"),
    ("version", "<u4"),
    ("n_inputs", "<u4"),
    ("hidden_width", "<u4"),
    ("n_classes", "<u4"),
    ("bn_input", "u1"),
    ("pad", "V7"),
    ("seed", "<u8"),
    ("bn_eps", "<f8"),
    ("bn_momentum", "<f8"),
])

HISTORY_COLUMNS = ["epoch", "phase", "batch_size", "train_loss", "val_loss", "val_acc"]

PathLike = Union[str, Path]

# ===== PIEZAS =====

def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)

def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Pérdida media (float64) y ∂L/∂logits = (softmax − one-hot)/B"""
    batch = len(labels)
    z = logits.astype(np.float64)
    z -= z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    rows = np.arange(batch)
    loss = float(np.mean(log_norm - z[rows, labels]))
    grad = np.exp(z - log_norm[:, None])
    grad[rows, labels] -= 1.0
    grad /= batch
    return loss, grad.astype(logits.dtype)

def batch_norm_forward(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float):
    """Normalización con estadísticas del batch; devuelve (salida, cache)"""
    mean = x.mean(axis=0)
    var = x.var(axis=0)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean) * inv_std
    return gamma * xhat + beta, (xhat, inv_std, mean, var)

def batch_norm_backward(dy: np.ndarray, gamma: np.ndarray, cache) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    xhat, inv_std = cache[0], cache[1]
    batch = dy.shape[0]
    dgamma = (dy * xhat).sum(axis=0)
    dbeta = dy.sum(axis=0)
    dxhat = dy * gamma
    dx = (inv_std / batch) * (batch * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0))
    return dx, dgamma, dbeta

# ===== MODELO =====

class MlpModel:
    """Perceptrón de dos capas ocultas con batch-norm"""

    def __init__(self, n_inputs: int, hidden_width: int = 512, bn_input: bool = True,
                 bn_eps: float = 1e-5, bn_momentum: float = 0.1, seed: int = 0,
                 dtype=np.float32):
        if n_inputs < 1:
            raise PreconditionError(f"n_inputs debe ser ≥ 1, recibido {n_inputs}")
        self.n_inputs = int(n_inputs)
        self.hidden_width = int(hidden_width)
        self.bn_input = bool(bn_input)
        self.bn_eps = float(bn_eps)
        self.bn_momentum = float(bn_momentum)
        self.seed = int(seed)
        self.dtype = np.dtype(dtype)
        self.training = False

        self.layers: List[Tuple[str, str]] = []
        if self.bn_input:
            self.layers.append(("bn", "bn0"))
        self.layers += [
            ("dense", "dense1"), ("relu", "relu1"), ("bn", "bn1"),
            ("dense", "dense2"), ("relu", "relu2"), ("bn", "bn2"),
            ("dense", "dense3"),
        ]

        self.params: Dict[str, np.ndarray] = {}
        self.running: Dict[str, np.ndarray] = {}
        rng = make_generator(self.seed, INIT_STREAM)
        widths = {"bn0": self.n_inputs, "bn1": self.hidden_width, "bn2": self.hidden_width}
        shapes = {
            "dense1": (self.n_inputs, self.hidden_width),
            "dense2": (self.hidden_width, self.hidden_width),
            "dense3": (self.hidden_width, N_CLASSES),
        }
        for kind, name in self.layers:
            if kind == "dense":
                fan_in, fan_out = shapes[name]
                # He-uniforme
                limit = np.sqrt(6.0 / fan_in)
                if name == "dense3":
                    limit *= OUTPUT_INIT_SCALE
                self.params[f"{name}.W"] = rng.uniform(-limit, limit, (fan_in, fan_out)).astype(self.dtype)
                self.params[f"{name}.b"] = np.zeros(fan_out, dtype=self.dtype)
            elif kind == "bn":
                width = widths[name]
                self.params[f"{name}.gamma"] = np.ones(width, dtype=self.dtype)
                self.params[f"{name}.beta"] = np.zeros(width, dtype=self.dtype)
                self.running[f"{name}.mean"] = np.zeros(width, dtype=self.dtype)
                self.running[f"{name}.var"] = np.ones(width, dtype=self.dtype)

    @classmethod
    def from_config(cls, n_inputs: int, cfg: TrainConfig) -> "MlpModel":
        return cls(n_inputs, cfg.hidden_width, cfg.bn_input, cfg.bn_eps, cfg.bn_momentum, cfg.seed)

    # Orden fijo de serialización
    def parameter_names(self) -> List[str]:
        names = []
        for kind, name in self.layers:
            if kind == "dense":
                names += [f"{name}.W", f"{name}.b"]
            elif kind == "bn":
                names += [f"{name}.gamma", f"{name}.beta"]
        return names

    def state_names(self) -> List[str]:
        names = []
        for kind, name in self.layers:
            names += [f"{name}.W", f"{name}.b"] if kind == "dense" else []
            if kind == "bn":
                names += [f"{name}.gamma", f"{name}.beta", f"{name}.mean", f"{name}.var"]
        return names

    def array(self, name: str) -> np.ndarray:
        return self.params[name] if name in self.params else self.running[name]

    def copy(self, dtype=None) -> "MlpModel":
        clone = MlpModel.__new__(MlpModel)
        clone.__dict__.update(self.__dict__)
        clone.dtype = np.dtype(dtype) if dtype is not None else self.dtype
        clone.layers = list(self.layers)
        clone.params = {k: v.astype(clone.dtype, copy=True) for k, v in self.params.items()}
        clone.running = {k: v.astype(clone.dtype, copy=True) for k, v in self.running.items()}
        return clone

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {name: self.array(name).copy() for name in self.state_names()}

    def restore(self, snapshot: Dict[str, np.ndarray]) -> None:
        for name, value in snapshot.items():
            self.array(name)[...] = value

    def is_finite(self) -> bool:
        return all(np.isfinite(self.array(n)).all() for n in self.state_names())

    # ----- forward / backward -----

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=self.dtype)
        if x.ndim == 1:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.n_inputs:
            raise MissingFeatureError(
                f"El modelo espera {self.n_inputs} features, recibió forma {x.shape}"
            )
        return x

    def _forward(self, x: np.ndarray, training: bool, update_running: bool = True):
        caches = []
        h = x
        for kind, name in self.layers:
            if kind == "dense":
                cache = h
                h = h @ self.params[f"{name}.W"] + self.params[f"{name}.b"]
            elif kind == "relu":
                cache = h > 0
                h = h * cache
            else:
                gamma = self.params[f"{name}.gamma"]
                beta = self.params[f"{name}.beta"]
                if training:
                    h, cache = batch_norm_forward(h, gamma, beta, self.bn_eps)
                    if update_running:
                        self._update_running(name, cache, len(x))
                else:
                    mean = self.running[f"{name}.mean"]
                    var = self.running[f"{name}.var"]
                    h = gamma * ((h - mean) / np.sqrt(var + self.bn_eps)) + beta
                    cache = None
            caches.append(cache)
        return h, caches

    def _update_running(self, name: str, cache, batch: int) -> None:
        m = self.bn_momentum
        mean, var = cache[2], cache[3]
        unbiased = var * (batch / (batch - 1))
        running_mean = self.running[f"{name}.mean"]
        running_var = self.running[f"{name}.var"]
        running_mean *= (1.0 - m)
        running_mean += m * mean
        running_var *= (1.0 - m)
        running_var += m * unbiased

    def _backward(self, dlogits: np.ndarray, caches) -> Dict[str, np.ndarray]:
        grads = {}
        d = dlogits
        for (kind, name), cache in zip(reversed(self.layers), reversed(caches)):
            if kind == "dense":
                w = self.params[f"{name}.W"]
                grads[f"{name}.W"] = cache.T @ d
                grads[f"{name}.b"] = d.sum(axis=0)
                d = d @ w.T
            elif kind == "relu":
                d = d * cache
            else:
                d, grads[f"{name}.gamma"], grads[f"{name}.beta"] = batch_norm_backward(
                    d, self.params[f"{name}.gamma"], cache,
                )
        return grads

    def relu_margin(self, x: np.ndarray) -> float:
        """Menor |pre-activación| de las ReLU en modo entrenamiento"""
        h = self._check_input(x)
        margin = np.inf
        for kind, name in self.layers:
            if kind == "relu":
                margin = min(margin, float(np.min(np.abs(h))))
                h = h * (h > 0)
            elif kind == "dense":
                h = h @ self.params[f"{name}.W"] + self.params[f"{name}.b"]
            else:
                h, _ = batch_norm_forward(h, self.params[f"{name}.gamma"], self.params[f"{name}.beta"], self.bn_eps)
        return margin

    def logits(self, x: np.ndarray, training: Optional[bool] = None) -> np.ndarray:
        x = self._check_input(x)
        training = self.training if training is None else training
        if training and len(x) < 2:
            raise PreconditionError("Batch-norm en entrenamiento requiere batch ≥ 2")
        out, _ = self._forward(x, training, update_running=False)
        return out

    def forward(self, x: np.ndarray, training: Optional[bool] = None) -> np.ndarray:
        """Probabilidades (B, 5); en inferencia usa las estadísticas acumuladas"""
        out = self.logits(x, training)
        if not np.isfinite(out).all():
            raise DivergenceError("Activaciones no finitas", n_features=self.n_inputs)
        return softmax(out)

    def loss(self, x: np.ndarray, y: np.ndarray) -> float:
        """Pérdida en modo entrenamiento sin tocar las estadísticas acumuladas"""
        logits, _ = self._forward(self._check_input(x), training=True, update_running=False)
        return cross_entropy(logits, np.asarray(y, dtype=np.int64))[0]

    def loss_and_gradients(self, x: np.ndarray, y: np.ndarray,
                           update_running: bool = True) -> Tuple[float, Dict[str, np.ndarray]]:
        x = self._check_input(x)
        if len(x) < 2:
            raise PreconditionError("Batch-norm en entrenamiento requiere batch ≥ 2")
        logits, caches = self._forward(x, training=True, update_running=update_running)
        loss, dlogits = cross_entropy(logits, np.asarray(y, dtype=np.int64))
        return loss, self._backward(dlogits, caches)

class AdamOptimizer:
    def __init__(self, model: MlpModel, learning_rate: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in model.params.items()}
        self.v = {k: np.zeros_like(v) for k, v in model.params.items()}

    @classmethod
    def from_config(cls, model: MlpModel, cfg: TrainConfig) -> "AdamOptimizer":
        return cls(model, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps)

    def step(self, model: MlpModel, grads: Dict[str, np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            model.params[name] -= (self.learning_rate * (m / c1) / (np.sqrt(v / c2) + self.eps)).astype(model.dtype)

# ===== ENTRENAMIENTO =====

def _batches(count: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """Índices barajados; se descartan batches parciales de tamaño < 2"""
    order = rng.permutation(count)
    for start in range(0, count, batch_size):
        idx = order[start:start + batch_size]
        if len(idx) >= 2:
            yield idx

def _run_epoch(model: MlpModel, optimizer: AdamOptimizer, x: np.ndarray, y: np.ndarray,
               batch_size: int, rng: np.random.Generator, epoch: int) -> float:
    total = 0.0
    seen = 0
    for idx in _batches(len(x), batch_size, rng):
        loss, grads = model.loss_and_gradients(x[idx], y[idx])
        if not np.isfinite(loss):
            raise DivergenceError("Pérdida no finita", epoch=epoch, n_features=model.n_inputs)
        optimizer.step(model, grads)
        total += loss * len(idx)
        seen += len(idx)
    return total / max(seen, 1)

def train(x_train: np.ndarray, y_train: np.ndarray, x_val: np.ndarray, y_val: np.ndarray,
          cfg: TrainConfig, model: Optional[MlpModel] = None) -> Tuple[MlpModel, TrainHistory]:
    """
    Entrenar en dos fases con early stopping sobre la pérdida de validación

    Fase 1 con batch_phase1 y fase 2 con min(batch_phase2, |train|); max_epochs
    cuenta ambas fases. Devuelve el modelo con la mejor pérdida de validación.
    Si se pasa model, se continúa desde sus parámetros (afinado).
    """
    x_train = np.ascontiguousarray(x_train, dtype=np.float32)
    y_train = np.asarray(y_train, dtype=np.int64)
    x_val = np.ascontiguousarray(x_val, dtype=np.float32)
    y_val = np.asarray(y_val, dtype=np.int64)
    if len(x_train) != len(y_train) or len(x_val) != len(y_val):
        raise PreconditionError("Features y etiquetas con longitudes distintas")
    if len(x_val) == 0:
        raise PreconditionError("Conjunto de validación vacío")
    try:
        cfg.check_train_size(len(x_train))
    except ValueError as e:
        raise PreconditionError(str(e)) from None

    if model is None:
        model = MlpModel.from_config(x_train.shape[1], cfg)
    elif model.n_inputs != x_train.shape[1]:
        raise MissingFeatureError(
            f"Modelo inicial con n={model.n_inputs}, datos con n={x_train.shape[1]}"
        )

    rng = make_generator(cfg.seed, SHUFFLE_STREAM)
    optimizer = AdamOptimizer.from_config(model, cfg)
    history = TrainHistory()
    best_state = model.snapshot()
    best_loss = np.inf
    epoch = 0

    phases = ((1, cfg.batch_phase1), (2, min(cfg.batch_phase2, len(x_train))))
    for phase, batch_size in phases:
        phase_best = np.inf
        stale = 0
        logger.info(f"🔧 Fase {phase}: batch={batch_size}, n={model.n_inputs}")
        while epoch < cfg.max_epochs:
            epoch += 1
            model.training = True
            train_loss = _run_epoch(model, optimizer, x_train, y_train, batch_size, rng, epoch)
            model.training = False
            result, _ = evaluate(model, x_val, y_val)
            if not (np.isfinite(result.loss) and model.is_finite()):
                raise DivergenceError("Pérdida de validación no finita", epoch=epoch, n_features=model.n_inputs)
            history.epochs.append(EpochRecord(
                epoch=epoch, phase=phase, batch_size=batch_size,
                train_loss=train_loss, val_loss=result.loss, val_acc=result.accuracy,
            ))
            logger.debug(
                f"📊 Época {epoch}: train={train_loss:.5f} val={result.loss:.5f} acc={result.accuracy:.4f}"
            )
            if result.loss < best_loss:
                best_loss = result.loss
                best_state = model.snapshot()
                history.best_epoch = epoch
                history.best_val_loss = result.loss
            if result.loss < phase_best:
                phase_best = result.loss
                stale = 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    history.stopped_early = True
                    break
        # La fase siguiente parte del mejor modelo
        model.restore(best_state)
        if epoch >= cfg.max_epochs:
            history.stopped_early = False
            logger.warning(f"⚠️ max_epochs={cfg.max_epochs} alcanzado en la fase {phase}")
            break

    model.training = False
    logger.info(
        f"✅ Entrenamiento n={model.n_inputs}: mejor época {history.best_epoch}, "
        f"val_loss={history.best_val_loss:.5f}, val_acc={history.best_val_acc:.4f}"
    )
    return model, history

# ===== INFERENCIA =====

def predict(model: MlpModel, features: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Etiquetas (argmax, empates hacia el índice menor) y probabilidades"""
    probs = model.forward(features, training=False)
    return np.argmax(probs, axis=1).astype(np.uint8), probs

def predict_one(model: MlpModel, features: np.ndarray) -> Tuple[ClassLabel, np.ndarray]:
    labels, probs = predict(model, np.asarray(features).reshape(1, -1))
    return ClassLabel(int(labels[0])), probs[0]

def evaluate(model: MlpModel, x: np.ndarray, y: np.ndarray,
             batch_size: int = EVAL_BATCH) -> Tuple[EvaluationResult, np.ndarray]:
    """Pérdida media, exactitud y predicciones en modo inferencia"""
    y = np.asarray(y, dtype=np.int64)
    predictions = np.empty(len(y), dtype=np.uint8)
    total = 0.0
    for start in range(0, len(y), batch_size):
        stop = start + batch_size
        logits = model.logits(x[start:stop], training=False)
        loss, _ = cross_entropy(logits, y[start:stop])
        total += loss * len(logits)
        predictions[start:stop] = np.argmax(logits, axis=1)
    count = len(y)
    accuracy = float(np.mean(predictions == y)) if count else 0.0
    loss = total / count if count else 0.0
    if not np.isfinite(loss):
        return EvaluationResult.model_construct(loss=loss, accuracy=accuracy, count=count), predictions
    return EvaluationResult(loss=loss, accuracy=accuracy, count=count), predictions

def gradient_check(model: MlpModel, x: np.ndarray, y: np.ndarray, step: float = 1e-5) -> float:
    """
    Máximo error relativo entre gradientes analíticos y diferencias centrales

    Se trabaja sobre una copia en float64; el modelo original no cambia.
    """
    probe = model.copy(dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    _, grads = probe.loss_and_gradients(x, y, update_running=False)
    worst = 0.0
    for name in probe.parameter_names():
        flat = probe.params[name].reshape(-1)
        numeric = np.empty_like(flat)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            plus = probe.loss(x, y)
            flat[i] = original - step
            minus = probe.loss(x, y)
            flat[i] = original
            numeric[i] = (plus - minus) / (2.0 * step)
        analytic = grads[name].reshape(-1)
        rel = np.abs(analytic - numeric) / np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
        worst = max(worst, float(rel.max()))
    return worst

# ===== PERSISTENCIA =====

def save_checkpoint(model: MlpModel, path: PathLike) -> Path:
    """Cabecera + arrays float32 little-endian en el orden de state_names()"""
    header = np.zeros(1, dtype=CHECKPOINT_HEADER_DTYPE)
    header["magic"] = CHECKPOINT_MAGIC
    header["version"] = CHECKPOINT_VERSION
    header["n_inputs"] = model.n_inputs
    header["hidden_width"] = model.hidden_width
    header["n_classes"] = N_CLASSES
    header["bn_input"] = int(model.bn_input)
    header["seed"] = model.seed
    header["bn_eps"] = model.bn_eps
    header["bn_momentum"] = model.bn_momentum
    with atomic_writer(path) as fh:
        fh.write(header.tobytes())
        for name in model.state_names():
            fh.write(np.ascontiguousarray(model.array(name), dtype="<f4").tobytes())
    logger.info(f"💾 Checkpoint guardado: {path}")
    return Path(path)

def load_checkpoint(path: PathLike) -> MlpModel:
    path = Path(path)
    raw = path.read_bytes()
    size = CHECKPOINT_HEADER_DTYPE.itemsize
    if len(raw) < size:
        raise DatasetCorruptionError(f"{path}: checkpoint truncado")
    header = np.frombuffer(raw[:size], dtype=CHECKPOINT_HEADER_DTYPE)[0]
    if bytes(header["magic"]) != CHECKPOINT_MAGIC or int(header["version"]) != CHECKPOINT_VERSION:
        raise DatasetCorruptionError(f"{path}: no es un checkpoint válido")
    if int(header["n_classes"]) != N_CLASSES:
        raise DatasetCorruptionError(f"{path}: n_classes={int(header['n_classes'])}")
    model = MlpModel(
        n_inputs=int(header["n_inputs"]),
        hidden_width=int(header["hidden_width"]),
        bn_input=bool(header["bn_input"]),
        bn_eps=float(header["bn_eps"]),
        bn_momentum=float(header["bn_momentum"]),
        seed=int(header["seed"]),
    )
    offset = size
    for name in model.state_names():
        target = model.array(name)
        nbytes = target.size * 4
        if offset + nbytes > len(raw):
            raise DatasetCorruptionError(f"{path}: faltan datos para {name}")
        target[...] = np.frombuffer(raw, dtype="<f4", count=target.size, offset=offset).reshape(target.shape)
        offset += nbytes
    if offset != len(raw):
        raise DatasetCorruptionError(f"{path}: {len(raw) - offset} bytes sobrantes")
    return model

def write_history(history: TrainHistory, path: PathLike) -> Path:
    frame = pd.DataFrame([r.model_dump() for r in history.epochs], columns=HISTORY_COLUMNS)
    with atomic_writer(path, "w") as fh:
        frame.to_csv(fh, index=False, lineterminator="\n")
    return Path(path)

def read_history(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path)
