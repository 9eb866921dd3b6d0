#!/usr/bin/env python3
"""
Subcomandos de datos: gen, equalize, split
"""

import argparse
from pathlib import Path

from cli.context import RunContext
from core.exceptions import ConfigError
from core.logger import logger
from models.quantum import StateSeed
from services import dataset_manager

def register(subparsers, parents) -> None:
    gen = subparsers.add_parser("gen", parents=parents, help="Generar y etiquetar estados aleatorios")
    gen.add_argument("--count", type=int, help="Número de estados (prioridad sobre --size)")
    gen.add_argument("--size", choices=("small", "large"), default="small",
                     help="SMALL_RAW_COUNT o LARGE_RAW_COUNT")
    gen.add_argument("--stream-index", type=int, help="Stream inicial (STREAM_INDEX)")
    gen.add_argument("--measure", choices=("spectral", "hs"), help="Medida de los estados (STATE_MEASURE)")
    gen.add_argument("--name", default="raw.qcd", help="Nombre del archivo dentro de --out")
    gen.add_argument("--csv", action="store_true", help="Exportar además a CSV")
    gen.set_defaults(handler=run_gen)

    equalize = subparsers.add_parser("equalize", parents=parents, help="Igualar las cinco clases")
    equalize.add_argument("--dataset", required=True, help="Dataset crudo (.qcd)")
    equalize.add_argument("--csv", action="store_true", help="Exportar además a CSV")
    equalize.set_defaults(handler=run_equalize)

    split = subparsers.add_parser("split", parents=parents, help="Partir en train/val/test estratificado")
    split.add_argument("--dataset", required=True, help="Dataset igualado (.qcd)")
    split.set_defaults(handler=run_split)

def run_gen(args: argparse.Namespace, ctx: RunContext) -> None:
    settings = ctx.settings
    count = args.count
    if count is None:
        count = settings.SMALL_RAW_COUNT if args.size == "small" else settings.LARGE_RAW_COUNT
    if count < 1:
        raise ConfigError(f"--count debe ser ≥ 1, recibido {count}")
    stream = settings.STREAM_INDEX if args.stream_index is None else args.stream_index
    seed = StateSeed(seed=settings.SEED, stream_index=stream)
    target = ctx.out_dir / args.name

    dataset_manager.generate(
        count, seed, target, settings.SHARD_SIZE, settings.CLASSIFICATION_EPS, settings.STATE_MEASURE
    )
    ctx.manifest.add_seed("seed", seed.seed)
    ctx.manifest.add_seed("stream_index", seed.stream_index)
    ctx.manifest.add_outputs(target)

    summary = dataset_manager.summarize(target)
    logger.info(
        f"📊 Menos poblada: {summary.least_populated}; igualado ≈ {summary.equalized_size} "
        f"({100 * summary.equalized_ratio:.1f}% del crudo)"
    )
    if args.csv:
        ctx.manifest.add_outputs(dataset_manager.export_csv(target, target.with_suffix(".csv")))

def run_equalize(args: argparse.Namespace, ctx: RunContext) -> None:
    source = Path(args.dataset)
    header, records = dataset_manager.read_dataset(source)
    equalized = dataset_manager.equalize(records, ctx.settings.SEED)
    stem = source.name[:-len(dataset_manager.DATASET_SUFFIX)] if source.suffix == dataset_manager.DATASET_SUFFIX else source.name
    target = ctx.out_dir / f"{stem}.eq{dataset_manager.DATASET_SUFFIX}"
    dataset_manager.write_dataset(target, equalized, header.generator_seed, header.stream_index)

    ctx.manifest.add_seed("seed", ctx.settings.SEED)
    ctx.manifest.add_inputs(source)
    ctx.manifest.add_outputs(target)
    if args.csv:
        ctx.manifest.add_outputs(dataset_manager.export_csv(target, target.with_suffix(".csv")))

def run_split(args: argparse.Namespace, ctx: RunContext) -> None:
    source = Path(args.dataset)
    try:
        ratio = ctx.settings.split_ratio
    except ValueError as e:
        raise ConfigError(str(e)) from None
    targets = dataset_manager.write_split(source, ctx.settings.SEED, ratio)
    ctx.manifest.add_seed("seed", ctx.settings.SEED)
    ctx.manifest.add_inputs(source)
    ctx.manifest.add_outputs(*targets.values())
