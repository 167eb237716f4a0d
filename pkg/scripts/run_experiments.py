"""Run every bundled experiment config through the CLI and print the headline numbers.

Usage: python scripts/run_experiments.py [OUTPUT_ROOT]
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

from qgf.cli import main

CONFIGS = Path(__file__).parent / "configs"
RUNS = [
    ("scan", "scan_shifted_n8"),
    ("iterate", "iterate_n6"),
    ("iterate", "iterate_n8"),
    ("iterate", "iterate_n10"),
    ("noise", "noise_zne"),
    ("filter-response", "filter_response"),
    ("cv", "cv_shifts"),
    ("budget", "budget"),
]


def run(root: Path) -> int:
    failures = 0
    for command, name in RUNS:
        out = root / name
        t0 = time.perf_counter()
        code = main([command, "--config", str(CONFIGS / f"{name}.json"), "--out", str(out)])
        elapsed = time.perf_counter() - t0
        failures += code != 0
        summary = json.loads((out / "summary.json").read_text()) if code == 0 else {}
        headline = {k: v for k, v in summary.items() if k in ("error", "final_error", "channels", "total_shots")}
        print(f"{name:20s} exit={code} {elapsed:6.1f}s {json.dumps(headline)}", file=sys.stderr)
    return failures


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1] if len(sys.argv) > 1 else "runs")))
