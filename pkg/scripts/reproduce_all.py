#!/usr/bin/env python3
"""Run every pinned figure pipeline and report the checks.

Usage: python scripts/reproduce_all.py [OUTDIR]

Writes the plot-ready CSVs and JSON summaries for fig3a..fig8 under OUTDIR
(default ./reproduction) and exits nonzero if any check fails.
"""
import sys
from pathlib import Path

from epqed.cli import run_reproduce
from epqed.figures import PIPELINES


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("reproduction")
    failed = []
    for figure in sorted(PIPELINES):
        print(f"== {figure} ==")
        if not run_reproduce(figure, out / figure):
            failed.append(figure)
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return 4
    print(f"all {len(PIPELINES)} figure pipelines passed; outputs in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
