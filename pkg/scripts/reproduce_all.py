#!/usr/bin/env python3
"""Re-run every documented finding and exit nonzero if any check fails.

Equivalent to ``truthfit reproduce all``; kept as a script so the whole
artifact can be validated with one command even without installing the
console entry point.
"""

import sys

from truthfit.cli import main

if __name__ == "__main__":
    sys.exit(main(["reproduce", "all"]))
