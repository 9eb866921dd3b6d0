#!/usr/bin/env python3
"""
Servicio de datasets: generación, igualación de clases, partición y persistencia

Formato binario (little-endian):
    cabecera de 80 bytes: magic (8), version u32, reservado u32,
        record_count u64, class_counts 5×u64, generator_seed u64, stream_index u64
    registros de 120 bytes: 10×f64 features, 4×f64 cantidades, u8 label, 7 bytes de relleno
"""

from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
import pandas as pd

from core.exceptions import (
    CannotEqualizeError,
    DatasetCorruptionError,
    InsufficientDataError,
    PreconditionError,
)
from core.logger import logger
from models.dataset import DATASET_MAGIC, DATASET_VERSION, DatasetHeader, DatasetSummary, SampleRecord
from models.features import FEATURE_NAMES, N_FEATURES
from models.quantum import CLASS_NAMES, N_CLASSES, ClassLabel, StateSeed
from services.collective import batch_features
from services.correlations import CLASSIFICATION_EPS, batch_classify, batch_quantities, class_histogram
from services.states import DEFAULT_MEASURE, DEFAULT_SHARD_SIZE, Measure, iter_shards, make_generator
from utils.atomic_io import atomic_writer

RECORD_DTYPE = np.dtype([
    ("features", "<f8", (N_FEATURES,)),
    ("quantities", "<f8", (4,)),
    ("label", "u1"),
    ("pad", "V7"),
])
HEADER_DTYPE = np.dtype([
    ("magic", "S8"),
    ("version", "<u4"),
    ("reserved", "<u4"),
    ("record_count", "<u8"),
    ("class_counts", "<u8", (N_CLASSES,)),
    ("generator_seed", "<u8"),
    ("stream_index", "<u8"),
])
assert RECORD_DTYPE.itemsize == 120 and HEADER_DTYPE.itemsize == 80

QUANTITY_NAMES = ("N", "FEFw", "S3", "B")
SPLIT_SUFFIXES = ("train", "val", "test")
DATASET_SUFFIX = ".qcd"

# Streams auxiliares, lejos de los índices usados por los shards de estados
EQUALIZE_STREAM = 2 ** 62 + 1
SPLIT_STREAM = 2 ** 62 + 2

PathLike = Union[str, Path]

def empty_records(count: int) -> np.ndarray:
    return np.zeros(count, dtype=RECORD_DTYPE)

def header_for(records: np.ndarray, seed: int = 0, stream_index: int = 0) -> DatasetHeader:
    counts = class_histogram(records["label"])
    return DatasetHeader(
        record_count=len(records),
        class_counts=[int(c) for c in counts],
        generator_seed=seed,
        stream_index=stream_index,
    )

def _header_bytes(header: DatasetHeader) -> bytes:
    raw = np.zeros(1, dtype=HEADER_DTYPE)
    raw["magic"] = header.magic
    raw["version"] = header.version
    raw["record_count"] = header.record_count
    raw["class_counts"] = header.class_counts
    raw["generator_seed"] = header.generator_seed
    raw["stream_index"] = header.stream_index
    return raw.tobytes()

def write_dataset(path: PathLike, records: np.ndarray, seed: int = 0, stream_index: int = 0) -> DatasetHeader:
    """Persistir registros con su cabecera"""
    records = np.ascontiguousarray(records, dtype=RECORD_DTYPE)
    header = header_for(records, seed, stream_index)
    with atomic_writer(path) as fh:
        fh.write(_header_bytes(header))
        fh.write(records.tobytes())
    logger.info(f"💾 Dataset guardado: {path} ({header.record_count} registros)")
    return header

def read_dataset(path: PathLike, verify: bool = True) -> Tuple[DatasetHeader, np.ndarray]:
    """
    Leer un dataset (registros mapeados en memoria, solo lectura)

    Raises:
        DatasetCorruptionError: magic, versión, tamaño o conteos inconsistentes
    """
    path = Path(path)
    size = path.stat().st_size
    if size < HEADER_DTYPE.itemsize:
        raise DatasetCorruptionError(f"{path}: archivo truncado")
    raw = np.fromfile(path, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(raw["magic"]) != DATASET_MAGIC:
        raise DatasetCorruptionError(f"{path}: magic inválido")
    if int(raw["version"]) != DATASET_VERSION:
        raise DatasetCorruptionError(f"{path}: versión {int(raw['version'])} no soportada")
    try:
        header = DatasetHeader(
            record_count=int(raw["record_count"]),
            class_counts=[int(c) for c in raw["class_counts"]],
            generator_seed=int(raw["generator_seed"]),
            stream_index=int(raw["stream_index"]),
        )
    except ValueError as e:
        raise DatasetCorruptionError(f"{path}: cabecera inconsistente: {e}") from None
    expected = HEADER_DTYPE.itemsize + header.record_count * RECORD_DTYPE.itemsize
    if size != expected:
        raise DatasetCorruptionError(f"{path}: tamaño {size} ≠ {expected} esperado")
    if header.record_count == 0:
        return header, empty_records(0)
    records = np.memmap(path, dtype=RECORD_DTYPE, mode="r",
                        offset=HEADER_DTYPE.itemsize, shape=(header.record_count,))
    if verify:
        labels = records["label"]
        if labels.max() >= N_CLASSES:
            raise DatasetCorruptionError(f"{path}: etiqueta fuera de rango")
        if class_histogram(labels).tolist() != header.class_counts:
            raise DatasetCorruptionError(f"{path}: class_counts no coincide con los registros")
    return header, records

def record_at(records: np.ndarray, index: int) -> SampleRecord:
    row = records[index]
    return SampleRecord(
        features=row["features"].tolist(),
        quantities=row["quantities"].tolist(),
        label=ClassLabel(int(row["label"])),
    )

def label_states(rhos: np.ndarray, eps: float = CLASSIFICATION_EPS) -> np.ndarray:
    """Estados → registros (cantidades, etiqueta y features)"""
    records = empty_records(len(rhos))
    quants = batch_quantities(rhos)
    records["quantities"] = quants
    records["label"] = batch_classify(quants, eps)
    records["features"] = batch_features(rhos)
    return records

def generate(count: int, seed: StateSeed, path: PathLike,
             shard_size: int = DEFAULT_SHARD_SIZE, eps: float = CLASSIFICATION_EPS,
             measure: Measure = DEFAULT_MEASURE) -> DatasetHeader:
    """
    Generar count estados etiquetados y escribirlos en path

    Determinista para (seed, shard_size) fijos: cada shard tiene su propio stream.
    """
    if count < 1:
        raise PreconditionError("count debe ser ≥ 1")
    counts = np.zeros(N_CLASSES, dtype=np.int64)
    logger.info(
        f"🎲 Generando {count} estados (seed={seed.seed}, stream={seed.stream_index}, "
        f"shard={shard_size}, medida={measure})"
    )
    with atomic_writer(path) as fh:
        # Cabecera provisional; se reescribe con los conteos al final
        fh.write(b"\0" * HEADER_DTYPE.itemsize)
        for shard, rhos in iter_shards(count, seed, shard_size, measure):
            records = label_states(rhos, eps)
            counts += class_histogram(records["label"])
            fh.write(records.tobytes())
            logger.debug(f"📊 Shard {shard}: {len(records)} estados")
        header = DatasetHeader(
            record_count=count,
            class_counts=[int(c) for c in counts],
            generator_seed=seed.seed,
            stream_index=seed.stream_index,
        )
        fh.seek(0)
        fh.write(_header_bytes(header))
    logger.info(f"✅ Dataset crudo: {header.histogram()}")
    return header

def equalize(records: np.ndarray, seed: int) -> np.ndarray:
    """
    Submuestrear para que cada clase aparezca exactamente k = min(conteos) veces

    Los sobrantes se descartan por orden de aparición dentro de una
    permutación con semilla.
    """
    labels = np.asarray(records["label"])
    counts = class_histogram(labels)
    k = int(counts.min())
    if k == 0:
        empty = [CLASS_NAMES[c] for c in range(N_CLASSES) if counts[c] == 0]
        raise CannotEqualizeError(f"No se puede igualar: clases vacías {empty}")
    perm = make_generator(seed, EQUALIZE_STREAM).permutation(len(labels))
    shuffled_labels = labels[perm]
    keep = np.zeros(len(labels), dtype=bool)
    for c in range(N_CLASSES):
        keep[np.flatnonzero(shuffled_labels == c)[:k]] = True
    equalized = np.array(records[perm[keep]], dtype=RECORD_DTYPE)
    logger.info(f"⚖️ Igualado: {len(labels)} → {len(equalized)} ({k} por clase)")
    return equalized

def split_sizes(total: int, ratio: Tuple[int, int, int] = (12, 3, 1)) -> Tuple[int, int, int]:
    """Tamaños train/val/test; el resto de la división va a train"""
    parts = sum(ratio)
    if total < parts:
        raise InsufficientDataError(f"Se requieren ≥ {parts} registros para partir, hay {total}")
    val = total * ratio[1] // parts
    test = total * ratio[2] // parts
    return total - val - test, val, test

def split(records: np.ndarray, seed: int,
          ratio: Tuple[int, int, int] = (12, 3, 1)) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Partición estratificada train/val/test

    Tras barajar, cada registro recibe la clave (rango dentro de su clase + ½)/n_c;
    ordenar por esa clave intercala las clases en proporción, y los cortes
    consecutivos conservan la proporción de cada clase en cada parte.
    """
    sizes = split_sizes(len(records), ratio)
    rng = make_generator(seed, SPLIT_STREAM)
    perm = rng.permutation(len(records))
    labels = np.asarray(records["label"])[perm]
    keys = np.empty(len(perm))
    for c in range(N_CLASSES):
        members = np.flatnonzero(labels == c)
        keys[members] = (np.arange(len(members)) + 0.5) / max(len(members), 1)
    order = perm[np.lexsort((labels, keys))]
    bounds = np.cumsum(sizes)[:-1]
    parts = []
    for chunk in np.split(order, bounds):
        parts.append(np.array(records[chunk[rng.permutation(len(chunk))]], dtype=RECORD_DTYPE))
    logger.info(f"✂️ Partición {':'.join(map(str, ratio))}: {sizes}")
    return parts[0], parts[1], parts[2]

def split_paths(path: PathLike) -> Dict[str, Path]:
    """<stem>.train.qcd, <stem>.val.qcd, <stem>.test.qcd junto a path"""
    path = Path(path)
    stem = path.name[:-len(DATASET_SUFFIX)] if path.name.endswith(DATASET_SUFFIX) else path.name
    return {name: path.with_name(f"{stem}.{name}{DATASET_SUFFIX}") for name in SPLIT_SUFFIXES}

def write_split(path: PathLike, seed: int, ratio: Tuple[int, int, int] = (12, 3, 1)) -> Dict[str, Path]:
    header, records = read_dataset(path)
    targets = split_paths(path)
    for name, part in zip(SPLIT_SUFFIXES, split(records, seed, ratio)):
        write_dataset(targets[name], part, header.generator_seed, header.stream_index)
    return targets

def load_split(path: PathLike) -> Dict[str, np.ndarray]:
    """Leer las tres partes de un dataset partido"""
    targets = split_paths(path)
    missing = [str(p) for p in targets.values() if not p.exists()]
    if missing:
        raise PreconditionError(f"Falta la partición del dataset: {missing}")
    return {name: read_dataset(p)[1] for name, p in targets.items()}

def to_frame(records: np.ndarray) -> pd.DataFrame:
    frame = pd.DataFrame(np.asarray(records["features"]), columns=list(FEATURE_NAMES))
    for k, name in enumerate(QUANTITY_NAMES):
        frame[name] = np.asarray(records["quantities"][:, k])
    frame["label"] = np.asarray(records["label"]).astype(np.int64)
    return frame

def export_csv(path: PathLike, out: PathLike, chunk: int = 100_000) -> Path:
    """Un registro por fila: p11..p34, N, FEFw, S3, B, label"""
    _, records = read_dataset(path)
    out = Path(out)
    with atomic_writer(out, "w") as fh:
        for start in range(0, max(len(records), 1), chunk):
            to_frame(records[start:start + chunk]).to_csv(
                fh, index=False, header=(start == 0), encoding="utf-8", lineterminator="\n",
            )
    logger.info(f"📄 CSV exportado: {out}")
    return out

def summarize(path: PathLike) -> DatasetSummary:
    header, _ = read_dataset(path, verify=False)
    counts = header.class_counts
    least = int(np.argmin(counts))
    equalized_size = N_CLASSES * counts[least]
    return DatasetSummary(
        path=str(path),
        record_count=header.record_count,
        class_counts=header.histogram(),
        least_populated=CLASS_NAMES[least],
        equalized_size=equalized_size,
        equalized_ratio=equalized_size / header.record_count if header.record_count else 0.0,
    )
