#!/usr/bin/env python3
"""
Manifiesto de corrida: configuración resuelta, semillas y checksums de artefactos
"""

import hashlib
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from core.logger import logger
from models.manifest import ArtifactEntry, RunManifest
from utils.atomic_io import write_json

PathLike = Union[str, Path]

CHUNK = 1 << 20

def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(CHUNK), b""):
            digest.update(block)
    return digest.hexdigest()

def artifact(path: PathLike) -> ArtifactEntry:
    path = Path(path)
    return ArtifactEntry(path=str(path), sha256=sha256_file(path), size_bytes=path.stat().st_size)

def _artifacts(paths: Iterable[PathLike]) -> List[ArtifactEntry]:
    entries = []
    for path in paths:
        path = Path(path)
        if path.is_dir():
            entries += [artifact(p) for p in sorted(path.rglob("*")) if p.is_file()]
        elif path.exists():
            entries.append(artifact(path))
        else:
            logger.warning(f"⚠️ Artefacto inexistente, no se incluye: {path}")
    return entries

class ManifestManager:
    """Acumula entradas y salidas de un subcomando y escribe el manifiesto"""

    def __init__(self, command: str, argv: List[str], config: Dict[str, Any],
                 threads: int = 1, deterministic: bool = False):
        self.manifest = RunManifest(
            command=command,
            argv=list(argv),
            config=config,
            started_at=datetime.now(timezone.utc),
            threads=threads,
            deterministic=deterministic,
        )
        self.input_paths: List[Path] = []
        self.output_paths: List[Path] = []

    def add_seed(self, name: str, value: int) -> None:
        self.manifest.seeds[name] = int(value)

    def add_inputs(self, *paths: PathLike) -> None:
        self.input_paths += [Path(p) for p in paths]

    def add_outputs(self, *paths: PathLike) -> None:
        self.output_paths += [Path(p) for p in paths]

    def finalize(self, out_dir: PathLike, name: Optional[str] = None) -> Path:
        """Calcular checksums y escribir <out_dir>/<comando>.manifest.json"""
        self.manifest.inputs = _artifacts(self.input_paths)
        self.manifest.outputs = _artifacts(self.output_paths)
        self.manifest.finished_at = datetime.now(timezone.utc)
        target = Path(out_dir) / f"{name or self.manifest.command}.manifest.json"
        write_json(target, self.manifest.model_dump(mode="json"))
        logger.info(f"🧾 Manifiesto: {target} ({len(self.manifest.outputs)} salidas)")
        return target
