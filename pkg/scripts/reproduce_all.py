"""Run every theorem table and write one JSON report per theorem.

    python3 scripts/reproduce_all.py --out reports/ --seed 42 --samples 200
"""

import argparse
import json
import sys
import time
from pathlib import Path

from curvspec.classifier import THEOREMS, CheckConfig, check_suite_theorem


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--theorem", action="append", choices=list(THEOREMS), help="repeatable; default all")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    cfg = CheckConfig(samples=args.samples, seed=args.seed)
    failed = []
    for name in args.theorem or list(THEOREMS):
        t0 = time.perf_counter()
        rep = check_suite_theorem(name, {}, cfg)
        (args.out / f"theorem-{name}.json").write_text(json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n")
        print(rep.to_text())
        print(f"({time.perf_counter() - t0:.1f} s)\n")
        if not rep.all_agree:
            failed.append(name)
    if failed:
        print("disagreements in: " + ", ".join(failed))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
