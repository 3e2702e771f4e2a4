#!/usr/bin/env python3
"""
Command line entry point for running from a source checkout.

Usage:
    python main.py <command> [options]

See `python main.py --help`, or the installed `algdamp` script.
"""

import sys
from pathlib import Path

# Add the current directory to Python path
sys.path.insert(0, str(Path(__file__).parent))

from algebraic_damping.cli import main

if __name__ == "__main__":
    sys.exit(main())
