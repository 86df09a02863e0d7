#!/usr/bin/env python3
"""
Main Entry Point
================
Launches the krige command line.

    python main.py validate gamma.csv --sigma2 1.0
    python main.py show-config
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from krige.cli import run

if __name__ == "__main__":
    run()
