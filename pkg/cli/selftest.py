#!/usr/bin/env python3
"""
Subcomando selftest: oráculos e invariantes del pipeline
"""

import argparse

from cli.context import RunContext
from core.exceptions import NumericalDegeneracyError
from services.selftest import run_selftest
from utils.atomic_io import write_json

def register(subparsers, parents) -> None:
    selftest = subparsers.add_parser("selftest", parents=parents, help="Verificaciones de oráculo e invariantes")
    selftest.add_argument("--full", action="store_true", help="Tamaños completos (10⁴ y 10⁶ estados)")
    selftest.set_defaults(handler=run)

def run(args: argparse.Namespace, ctx: RunContext) -> None:
    results = run_selftest(full=args.full, seed=ctx.settings.SEED)
    target = write_json(ctx.out_dir / "selftest.json", [r.model_dump() for r in results])
    ctx.manifest.add_seed("seed", ctx.settings.SEED)
    ctx.manifest.add_outputs(target)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise NumericalDegeneracyError(f"Selftest fallido: {failed}")
