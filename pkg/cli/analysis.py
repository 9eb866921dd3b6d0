#!/usr/bin/env python3
"""
Subcomandos de análisis: sweep, report
"""

import argparse

from cli.context import RunContext, add_bn_argument, add_plan_argument, load_plan
from services.dataset_manager import split_paths
from services.sweep_manager import SweepManager, build_report

def register(subparsers, parents) -> None:
    sweep = subparsers.add_parser("sweep", parents=parents, help="Entrenar y evaluar para n = 10..1")
    sweep.add_argument("--dataset", required=True, help="Dataset partido (ruta usada en split)")
    sweep.add_argument("--n-values", help="Subconjunto de n separado por comas (por defecto todos)")
    sweep.add_argument("--subsets", type=int, help="Subconjuntos para la incertidumbre (EVAL_SUBSETS)")
    add_plan_argument(sweep)
    add_bn_argument(sweep)
    sweep.set_defaults(handler=run_sweep)

    report = subparsers.add_parser("report", parents=parents, help="CSV para graficar a partir de los barridos")
    report.set_defaults(handler=run_report)

def run_sweep(args: argparse.Namespace, ctx: RunContext) -> None:
    plan = load_plan(ctx)
    sizes = [int(v) for v in args.n_values.split(",")] if args.n_values else None
    manager = SweepManager(
        args.dataset, ctx.out_dir, ctx.settings.train_config(),
        subsets=args.subsets or ctx.settings.EVAL_SUBSETS,
    )
    manager.run(plan, sizes)
    ctx.manifest.add_seed("seed", ctx.settings.SEED)
    ctx.manifest.add_inputs(*split_paths(args.dataset).values())
    ctx.manifest.add_outputs(manager.sweep_dir(plan))

def run_report(args: argparse.Namespace, ctx: RunContext) -> None:
    ctx.manifest.add_outputs(*build_report(ctx.out_dir))
