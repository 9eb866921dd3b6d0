#!/usr/bin/env python3
"""
Contexto compartido por los subcomandos y flags comunes
"""

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from core.config import Settings
from core.exceptions import ConfigError
from models.features import ReductionPlan
from services.collective import parse_plan
from services.manifest_manager import ManifestManager

@dataclass
class RunContext:
    """Lo que cada handler recibe además de sus argumentos"""
    settings: Settings
    manifest: ManifestManager
    out_dir: Path

def common_parser() -> argparse.ArgumentParser:
    """Flags válidos en todos los subcomandos (parent parser)"""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("comunes")
    group.add_argument("--config", help="Archivo key=value de configuración (por defecto pipeline.env)")
    group.add_argument("--seed", type=int, help="Semilla maestra (SEED)")
    group.add_argument("--out", help="Directorio de salida (OUTPUT_DIR)")
    group.add_argument("--threads", help="Hilos: 'auto' o entero (THREADS)")
    group.add_argument("--deterministic", action="store_true", default=None,
                       help="Un solo hilo: salidas reproducibles bit a bit")
    group.add_argument("--log-level", help="DEBUG, INFO, WARNING... (LOG_LEVEL)")
    return parser

def settings_overrides(args: argparse.Namespace) -> dict:
    """Flags → campos de Settings (None = no indicado)"""
    bn_input = getattr(args, "bn_input", None)
    return {
        "SEED": args.seed,
        "OUTPUT_DIR": args.out,
        "THREADS": args.threads,
        "DETERMINISTIC": args.deterministic,
        "LOG_LEVEL": args.log_level,
        "PLAN": getattr(args, "plan", None),
        "STATE_MEASURE": getattr(args, "measure", None),
        "BN_INPUT": None if bn_input is None else bn_input == "on",
    }

def add_plan_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--plan", help="paper | nested | custom:<índices> (PLAN)")

def add_bn_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bn-input", choices=("on", "off"),
                        help="Batch-norm antes de la primera capa (BN_INPUT)")

def resolve_retained(plan: ReductionPlan, n_features: Optional[int]) -> Tuple[int, Tuple[int, ...]]:
    """n y features retenidas; sin n se usa el mayor n del plan"""
    n = plan.sizes[0] if n_features is None else n_features
    if n not in plan.retained_sets:
        raise ConfigError(f"El plan {plan.strategy} no define n={n} (disponibles: {plan.sizes})")
    return n, plan.retained_sets[n]

def load_plan(ctx: RunContext) -> ReductionPlan:
    return parse_plan(ctx.settings.PLAN)
