#!/usr/bin/env python3
"""
Punto de entrada de la CLI - Clasificador de correlaciones cuánticas

    python main.py gen --count 100000 --out runs/demo
    python main.py equalize --dataset runs/demo/raw.qcd --out runs/demo
    python main.py split --dataset runs/demo/raw.eq.qcd
    python main.py sweep --dataset runs/demo/raw.eq.qcd --out runs/demo
    python main.py report --out runs/demo
    python main.py selftest [--full]

Códigos de salida: 0 ok, 2 precondición/configuración, 3 divergencia numérica,
4 E/S o archivo corrupto.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

# Solo módulos sin numpy antes de fijar los hilos de BLAS
from core.config import Settings, load_settings
from core.exceptions import EXIT_IO, EXIT_OK, ConfigError, PipelineError
from core.logger import logger, setup_logger
from utils.cpu_detection import export_blas_threads

def _preparse(argv: List[str]) -> argparse.Namespace:
    """Flags que deben resolverse antes del primer import de numpy"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config")
    parser.add_argument("--threads")
    parser.add_argument("--deterministic", action="store_true", default=None)
    known, _ = parser.parse_known_args(argv)
    return known

def _load(config: Optional[str], **overrides) -> Settings:
    if config is not None and not Path(config).is_file():
        raise ConfigError(f"No existe el archivo de configuración: {config}")
    try:
        return load_settings(config, **overrides)
    except ValidationError as e:
        raise ConfigError(f"Configuración inválida: {e}") from None

def run(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre = _preparse(argv)
        early = _load(pre.config, THREADS=pre.threads, DETERMINISTIC=pre.deterministic)
        export_blas_threads(early.threads)

        # numpy entra aquí
        from cli import RunContext, build_parser, settings_overrides
        from services.manifest_manager import ManifestManager
        from utils.cpu_detection import configure_threads

        args = build_parser().parse_args(argv)
        settings = _load(args.config, **settings_overrides(args))
        setup_logger(settings.LOG_LEVEL, settings.LOG_FILE)
        runtime = configure_threads(settings.threads)

        out_dir = Path(settings.OUTPUT_DIR)
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = ManifestManager(
            command=args.command,
            argv=argv,
            config=settings.model_dump(mode="json"),
            threads=runtime["threads"],
            deterministic=settings.DETERMINISTIC,
        )
        ctx = RunContext(settings=settings, manifest=manifest, out_dir=out_dir)

        logger.info(f"🚀 {settings.APP_TITLE} v{settings.APP_VERSION}: {args.command}")
        args.handler(args, ctx)
        manifest.finalize(out_dir)
        logger.info(f"✅ {args.command} completado")
        return EXIT_OK
    except PipelineError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"❌ Error de E/S: {e}")
        return EXIT_IO

def main() -> None:
    sys.exit(run())

if __name__ == "__main__":
    main()
