#!/usr/bin/env python3
"""
Modelos Pydantic para el manifiesto de cada corrida de la CLI
"""

from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

class ArtifactEntry(BaseModel):
    """Archivo producido o consumido con su checksum"""
    path: str
    sha256: str = Field(..., min_length=64, max_length=64)
    size_bytes: int = Field(..., ge=0)

class RunManifest(BaseModel):
    """Registro reproducible de una corrida"""
    command: str
    argv: List[str] = Field(default_factory=list)
    config: Dict[str, Any] = Field(..., description="Settings resueltos (archivo + entorno + flags)")
    seeds: Dict[str, int] = Field(default_factory=dict)
    inputs: List[ArtifactEntry] = Field(default_factory=list)
    outputs: List[ArtifactEntry] = Field(default_factory=list)
    started_at: datetime
    finished_at: Optional[datetime] = None
    threads: int = Field(1, ge=1)
    deterministic: bool = False
