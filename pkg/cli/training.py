#!/usr/bin/env python3
"""
Subcomandos del clasificador: train, eval
"""

import argparse
from pathlib import Path

from cli.context import RunContext, add_bn_argument, add_plan_argument, load_plan, resolve_retained
from core.exceptions import MissingFeatureError
from core.logger import logger
from services import ann
from services.dataset_manager import load_split, split_paths
from services.metrics import confusion, confusion_frame, format_table, report_frame
from services.sweep_manager import fit_split, score_split, write_frame

def register(subparsers, parents) -> None:
    train = subparsers.add_parser("train", parents=parents, help="Entrenar un clasificador para un n")
    train.add_argument("--dataset", required=True, help="Dataset partido (ruta usada en split)")
    train.add_argument("--n-features", type=int, help="n del plan (por defecto el mayor)")
    train.add_argument("--init", help="Checkpoint inicial para afinar")
    add_plan_argument(train)
    add_bn_argument(train)
    train.set_defaults(handler=run_train)

    evaluate = subparsers.add_parser("eval", parents=parents, help="Evaluar un checkpoint")
    evaluate.add_argument("--dataset", required=True, help="Dataset partido (ruta usada en split)")
    evaluate.add_argument("--model", required=True, help="Checkpoint (.qcnn)")
    evaluate.add_argument("--n-features", type=int, help="n del plan (por defecto el n del modelo)")
    evaluate.add_argument("--part", choices=("train", "val", "test"), default="test")
    evaluate.add_argument("--subsets", type=int, help="Subconjuntos para la incertidumbre (EVAL_SUBSETS)")
    add_plan_argument(evaluate)
    evaluate.set_defaults(handler=run_eval)

def run_train(args: argparse.Namespace, ctx: RunContext) -> None:
    plan = load_plan(ctx)
    n, retained = resolve_retained(plan, args.n_features)
    cfg = ctx.settings.train_config()
    init = None
    if args.init:
        init = ann.load_checkpoint(args.init)
        ctx.manifest.add_inputs(args.init)
        logger.info(f"🔧 Afinando desde {args.init}")

    split = load_split(args.dataset)
    model, history = fit_split(split, retained, cfg, init=init)

    checkpoint = ann.save_checkpoint(model, ctx.out_dir / f"model.{plan.strategy}.n{n:02d}.qcnn")
    history_csv = ann.write_history(history, ctx.out_dir / f"history.{plan.strategy}.n{n:02d}.csv")
    ctx.manifest.add_seed("seed", cfg.seed)
    ctx.manifest.add_inputs(*split_paths(args.dataset).values())
    ctx.manifest.add_outputs(checkpoint, history_csv)

def run_eval(args: argparse.Namespace, ctx: RunContext) -> None:
    model = ann.load_checkpoint(args.model)
    plan = load_plan(ctx)
    n, retained = resolve_retained(plan, args.n_features or model.n_inputs)
    if n != model.n_inputs:
        raise MissingFeatureError(f"El modelo espera n={model.n_inputs}, el plan da n={n}")
    subsets = args.subsets or ctx.settings.EVAL_SUBSETS

    split = load_split(args.dataset)
    report, y, predictions = score_split(model, split, retained, subsets, ctx.settings.SEED, part=args.part)
    print(format_table(report, title=f"{Path(args.model).name} sobre {args.part} (n={n})"))

    stem = Path(args.model).stem
    scores_csv = write_frame(report_frame(report), ctx.out_dir / f"{stem}.{args.part}.scores.csv")
    cm_csv = write_frame(confusion_frame(confusion(y, predictions)),
                         ctx.out_dir / f"{stem}.{args.part}.confusion.csv", index=True)
    ctx.manifest.add_seed("seed", ctx.settings.SEED)
    ctx.manifest.add_inputs(args.model, split_paths(args.dataset)[args.part])
    ctx.manifest.add_outputs(scores_csv, cm_csv)
