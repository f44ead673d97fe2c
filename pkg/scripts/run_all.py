"""Run every suite with a config file and write the report directory."""

import argparse
import sys

from quasilab import cli
from quasilab.config import load, validate

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--config", help="JSON run configuration (defaults if omitted)")
parser.add_argument("--out", default="out", help="output directory")
args = parser.parse_args()

cfg = load(args.config) if args.config else validate({"schema_version": 1})
report = cli.run(cfg)
cli.emit(report, args.out)
failed = [f"{s}/{r.name}" for s, r in report.records if not r.passed]
print(f"{len(report.records)} checks, {len(failed)} failed -> {args.out}")
for name in failed:
    print("  FAIL", name)
sys.exit(1 if failed else 0)
