#!/usr/bin/env python3
"""Run the acceptance checks end to end and print one line per criterion.

This mirrors tests/test_acceptance.py for use outside pytest (CI logs,
notebooks).  Exit code 0 iff every criterion passes.
"""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-s", "-q"],
        cwd=ROOT,
    )
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
