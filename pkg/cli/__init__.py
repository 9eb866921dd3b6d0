#!/usr/bin/env python3
"""
Subcomandos de la CLI agrupados por módulo
"""

import argparse

from cli import analysis, data, selftest, training
from cli.context import RunContext, common_parser, settings_overrides

GROUPS = (data, training, analysis, selftest)

def build_parser(prog: str = "main.py") -> argparse.ArgumentParser:
    parents = [common_parser()]
    parser = argparse.ArgumentParser(
        prog=prog,
        description="Clasificación de correlaciones cuánticas de dos qubits con medidas colectivas",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for group in GROUPS:
        group.register(subparsers, parents)
    return parser

__all__ = ["RunContext", "build_parser", "common_parser", "settings_overrides"]
