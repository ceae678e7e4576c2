#!/usr/bin/env python3
"""
AR Bridge command-line launcher.

Runs the ar_bridge CLI from a source checkout without installing the package:

    python scripts/ar_bridge.py select --data series.csv
"""

import sys
from pathlib import Path

# Add the package directory to the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ar_bridge.cli import main  # noqa: E402

if __name__ == "__main__":
    exit(main())
