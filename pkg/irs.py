#!/usr/bin/env python3
"""Command-line entry point: python irs.py <command> [options]"""
import sys
from pathlib import Path

# Add project root to Python path if necessary
project_root = str(Path(__file__).resolve().parent)
if project_root not in sys.path:
    sys.path.append(project_root)

from controllers.cli_controller import run


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
