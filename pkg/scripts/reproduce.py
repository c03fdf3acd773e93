"""Regenerate the acceptance artifacts from the shipped reproduction config.

Runs ``configs/reproduce.json`` through the command-line driver and prints
one line per experiment with its verdicts and operator checks.  A second
invocation with ``--check`` compares the new run against an earlier one.

Usage::

    python scripts/reproduce.py [--out runs/reproduce] [--check OTHER_RUN]
"""

import argparse
import json
import sys
from pathlib import Path

from ritt_lab.cli import EXIT_OK, main as cli_main

ROOT = Path(__file__).resolve().parents[1]
CONFIG = ROOT / "configs" / "reproduce.json"


def summarize(out: Path) -> None:
    summary = json.loads((out / "summary.json").read_text())
    for exp in summary["experiments"]:
        parts = []
        for kind, res in exp.get("diagnostics", {}).items():
            if kind == "class_a_report":
                parts.append(f"report {res['verdict']}")
                rep = json.loads((out / exp["name"] / "report.json").read_text())
                if rep.get("ritt"):
                    top = max(r["upper"] for r in rep["ritt"]["rows"])
                    parts.append(f"ritt max {top:.6f} flat {rep['ritt']['flatness']:.3g}")
            elif "max_upper" in res:
                parts.append(f"{kind} {res['verdict']} max {res['max_upper']:.6f} flat {res['flatness']:.3g}")
            elif "limit_estimate" in res:
                parts.append(f"sector limit {res['limit_estimate']:.4f}")
        if "operators" in exp:
            ops = exp["operators"]
            parts.append(f"{ops['matrices']} operators, all ok: {ops['all_ok']}")
        flag = " (partial)" if exp["partial"] else ""
        print(f"{exp['name']:<22}{flag} " + "; ".join(parts))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "runs" / "reproduce"))
    ap.add_argument("--check", help="earlier run directory to compare against")
    ap.add_argument("--tolerance", type=float, default=1e-10)
    args = ap.parse_args(argv)
    code = cli_main(["run", "--config", str(CONFIG), "--out", args.out])
    if code != EXIT_OK:
        return code
    summarize(Path(args.out))
    if args.check:
        return cli_main(["compare", args.check, args.out, "--tolerance", str(args.tolerance)])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
