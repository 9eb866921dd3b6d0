#!/usr/bin/env python3
"""
Escritura atómica de archivos: temporal hermano + fsync + move
"""

import os
import shutil
from pathlib import Path
from typing import Union

import orjson

from core.logger import logger

PathLike = Union[str, Path]

class AtomicWriter:
    """
    Context manager que escribe a un temporal junto al destino y lo mueve
    al cerrar sin error. Si hay excepción el destino queda intacto.
    """

    def __init__(self, path: PathLike, mode: str = "wb"):
        self.path = Path(path)
        self.mode = mode
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.temp_file_path = self.path.with_name(f".{self.path.name}.tmp.{os.getpid()}")
        self.handle = None

    def __enter__(self):
        encoding = None if "b" in self.mode else "utf-8"
        newline = None if "b" in self.mode else ""
        self.handle = open(self.temp_file_path, self.mode, encoding=encoding, newline=newline)
        return self.handle

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                self.handle.flush()
                os.fsync(self.handle.fileno())
            self.handle.close()
            if exc_type is None:
                shutil.move(str(self.temp_file_path), str(self.path))
            else:
                logger.error(f"❌ Escritura abortada: {self.path} ({exc_type.__name__})")
        finally:
            if self.temp_file_path.exists():
                try:
                    self.temp_file_path.unlink()
                except OSError:
                    pass
        return False

def atomic_writer(path: PathLike, mode: str = "wb") -> AtomicWriter:
    return AtomicWriter(path, mode)

def write_json(path: PathLike, payload) -> Path:
    """JSON con orjson (indentado, claves ordenadas)"""
    data = orjson.dumps(
        payload,
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
    )
    with atomic_writer(path) as fh:
        fh.write(data)
    return Path(path)

def read_json(path: PathLike):
    return orjson.loads(Path(path).read_bytes())
