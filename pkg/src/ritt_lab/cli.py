"""Command-line driver: ``ritt-lab {family,diag,op,report,run,compare}``.

Every subcommand except ``compare`` reads a JSON configuration (see
:mod:`ritt_lab.config`), writes CSV tables and JSON reports into one
directory per experiment, and finishes with a ``MANIFEST`` listing each
artifact with its SHA-256 hash (``sha256sum -c MANIFEST`` format).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, OperatorSuite, RunConfig, load_config
from .diagnostics import (
    DiagTable,
    ReportConfig,
    class_a_report,
    semigroup_table,
    tables_from_chain,
)
from .families import FamilySpec, build_family
from .opcalc import (
    DenseOp,
    frac_power,
    kritt_equivalence_suite,
    power_bound,
    psi_op,
    random_normal_contraction,
    resolvent_scan,
    ritt_from_kreiss_check,
    shift_op,
    spectral_map_check,
    subordination_identity_check,
    volterra_op,
)
from .seq import set_threads, seq_to_csv, seq_to_json
from .transforms import sector_report

log = logging.getLogger("ritt_lab")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


# --------------------------------------------------------------------------
# artifact writing


class Artifacts:
    """Writes files below an output root and remembers them for the manifest."""

    def __init__(self, root: Path):
        self.root = root
        self.paths: list[Path] = []

    def write(self, rel: str, text: str) -> Path:
        p = self.root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        self.paths.append(p)
        return p

    def write_json(self, rel: str, obj: Any) -> Path:
        return self.write(rel, json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")

    def manifest(self) -> Path:
        lines = []
        for p in sorted(set(self.paths)):
            digest = hashlib.sha256(p.read_bytes()).hexdigest()
            lines.append(f"{digest}  {p.relative_to(self.root).as_posix()}")
        p = self.root / "MANIFEST"
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return p


def _jsonable(x: Any) -> Any:
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not serializable: {type(x).__name__}")


def _finite(x: float) -> Any:
    return x if math.isfinite(x) else str(x)


# --------------------------------------------------------------------------
# experiment steps


def _table_outputs(art: Artifacts, name: str, rel: str, t: DiagTable) -> dict:
    art.write(f"{name}/{rel}.csv", t.to_csv())
    d = t.to_dict()
    art.write_json(f"{name}/{rel}.json", d)
    return {"verdict": d["verdict"], "max_upper": t.max_upper(), "flatness": d["flatness"]}


def run_diagnostics(exp: ExperimentConfig, f, art: Artifacts, method: str, kinds: set[str], check: Callable[[], bool]) -> dict:
    """Run the requested sequence diagnostics of one experiment."""
    out: dict[str, Any] = {}
    reqs = [r for r in exp.diagnostics if r.kind in kinds]
    by_kind = {r.kind: r for r in reqs}
    if "ritt_table" in by_kind or "half_table" in by_kind:
        r0 = by_kind.get("ritt_table") or by_kind["half_table"]
        opts = dict(r0.options)
        for k in ("ritt_table", "half_table"):
            if k in by_kind and by_kind[k].options != opts:
                opts = None
        if opts is not None:
            rt, ht = tables_from_chain(f, opts.get("n_grid"), window=opts.get("window"), method=method)
            pairs = {"ritt_table": rt, "half_table": ht}
        else:
            pairs = {}
            for k in ("ritt_table", "half_table"):
                if k in by_kind:
                    o = by_kind[k].options
                    rt, ht = tables_from_chain(f, o.get("n_grid"), window=o.get("window"), method=method)
                    pairs[k] = rt if k == "ritt_table" else ht
        for k, t in pairs.items():
            if k in by_kind:
                out[k] = _table_outputs(art, exp.name, k, t)
        if not check():
            return out
    if "semigroup_table" in by_kind:
        o = by_kind["semigroup_table"].options
        t = semigroup_table(f, o.get("t_grid"), window=o.get("window"), method=method)
        out["semigroup_table"] = _table_outputs(art, exp.name, "semigroup_table", t)
        if not check():
            return out
    if "sector_report" in by_kind:
        o = by_kind["sector_report"].options
        sf = f
        if o.get("window") and o["window"] < len(f):
            from .diagnostics import _truncate

            sf = _truncate(f, int(o["window"]))
        s = sector_report(sf, J=int(o.get("J", 40)))
        art.write(f"{exp.name}/sector.csv", s.to_csv())
        summ = {
            "sup_angle": s.sup_angle,
            "limit_estimate": s.limit_estimate,
            "source": s.source,
            "near_zero_xi": list(map(float, s.near_zero_xi)),
            "near_zero_args": list(map(float, s.near_zero_args)),
        }
        art.write_json(f"{exp.name}/sector.json", summ)
        out["sector_report"] = {"sup_angle": s.sup_angle, "limit_estimate": s.limit_estimate}
        if not check():
            return out
    if "class_a_report" in by_kind:
        cfg = ReportConfig.from_dict(dict(by_kind["class_a_report"].options.get("config", {})))
        if method != "auto":
            cfg.method = method
        rep = class_a_report(f, cfg)
        art.write(f"{exp.name}/report.json", rep.to_json() + "\n")
        for k in ("ritt", "half", "semigroup"):
            t = getattr(rep, k)
            if t is not None:
                art.write(f"{exp.name}/report_{k}.csv", t.to_csv())
        out["class_a_report"] = {"verdict": rep.verdict, "screens": rep.screens}
    return out


def _matrices(suite: OperatorSuite, seed: int) -> list[DenseOp]:
    m = suite.matrix
    src = m["source"]
    d = int(m.get("d", 8))
    if src == "random_normal":
        rng = np.random.default_rng(seed)
        ops = [random_normal_contraction(d, rng) for _ in range(int(m.get("count", 1)))]
    elif src == "volterra":
        ops = [volterra_op(d)]
    elif src == "shift":
        ops = [shift_op(d)]
    elif src == "identity":
        ops = [DenseOp.identity(d)]
    else:
        ops = [DenseOp.from_json(Path(m["path"]).read_text(encoding="utf-8"))]
    if "subordinate" in m:
        g = build_family(FamilySpec.from_dict(m["subordinate"]))
        ops = [psi_op(g, t).op for t in ops]
    return ops


def run_operator_suite(exp: ExperimentConfig, art: Artifacts, check: Callable[[], bool]) -> dict:
    """Run the operator checks of one experiment on each matrix."""
    suite = exp.operator_suite
    tol = exp.tolerances
    p = suite.params
    radii = p.get("radii")
    scan_kw = {"n_angles": int(p.get("n_angles", 256))}
    if radii:
        scan_kw["radii"] = radii
    F = build_family(suite.family) if suite.family is not None else None
    results = []
    passed_all = True
    for i, T in enumerate(_matrices(suite, exp.seed)):
        res: dict[str, Any] = {"index": i, "dim": T.dim, "norm": T.norm()}
        for c in suite.checks:
            if c == "power_bound":
                pb = power_bound(T, int(p.get("horizon", 256)))
                res[c] = asdict(pb)
            elif c == "subordination":
                sc = subordination_identity_check(F, T, int(p.get("n", 4)))
                ok = sc.residual <= tol["subordination"]
                res[c] = {"residual": sc.residual, "budget": sc.budget, "ok": ok}
            elif c == "spectral_map":
                sm = spectral_map_check(F, T)
                ok = sm.distance <= tol["spectral_map"] + F.tail_bound
                res[c] = {"distance": sm.distance, "budget": sm.budget, "cond": sm.cond, "ok": ok}
            elif c == "frac_power":
                a = float(p.get("alpha", 0.5))
                s_ = frac_power(T, a, "series")
                e_ = frac_power(T, a, "eigen")
                diff = float(np.linalg.norm(s_.op.entries - e_.op.entries, 2))
                budget = s_.budget + e_.budget
                res[c] = {"alpha": a, "difference": diff, "budget": budget, "ok": diff <= budget}
            elif c == "semigroup_law":
                a = float(p.get("alpha", 0.5))
                h = frac_power(T, a / 2)
                full = frac_power(T, a)
                r = float(np.linalg.norm(h.op.entries @ h.op.entries - full.op.entries, 2))
                res[c] = {"alpha": a, "residual": r, "ok": r <= tol["semigroup_law"]}
            elif c in ("resolvent_ritt", "resolvent_kreiss"):
                kind = c.split("_")[1]
                sc = resolvent_scan(T, kind, **scan_kw)
                art.write(f"{exp.name}/op{i}_{kind}.csv", sc.to_csv())
                res[c] = {
                    "constant": _finite(sc.constant),
                    "per_radius": [_finite(v) for v in sc.per_radius()],
                    "stable": sc.stable(),
                    "singular": len(sc.singular),
                }
            elif c == "ritt_from_kreiss":
                rk = ritt_from_kreiss_check(T, float(p.get("alpha", 0.5)), **scan_kw)
                art.write(f"{exp.name}/op{i}_S_ritt.csv", rk.ritt.to_csv())
                res[c] = {
                    "kreiss_constant": _finite(rk.kreiss_constant),
                    "ritt_constant": _finite(rk.ritt_constant),
                    "ritt_per_radius": [_finite(v) for v in rk.ritt.per_radius()],
                    "method": rk.power.method,
                    "ok": rk.passes(),
                }
            elif c == "kritt":
                ks = kritt_equivalence_suite(T, p.get("gammas", (1.05, 1.1, 1.25)), **scan_kw)
                res[c] = {
                    "gammas": ks.gammas,
                    "passed": ks.passed,
                    "constants": [_finite(s.constant) for s in ks.scans],
                    "largest_passing": ks.largest_passing,
                }
            if isinstance(res.get(c), dict) and res[c].get("ok") is False:
                passed_all = False
        results.append(res)
        if not check():
            break
    art.write_json(f"{exp.name}/operators.json", results)
    return {"matrices": len(results), "all_ok": passed_all}


def run_experiment(exp: ExperimentConfig, art: Artifacts, method: str, parts: set[str]) -> dict:
    """Run the selected parts (``diag``, ``report``, ``op``) of one experiment.

    The family is built when diagnostics need it and dumped to
    ``family.json`` only with ``dump_family``.
    """
    t0 = time.monotonic()
    status = {"name": exp.name, "partial": False}

    def check() -> bool:
        if exp.time_budget is not None and time.monotonic() - t0 > exp.time_budget:
            status["partial"] = True
            return False
        return True

    f = None
    wants_diag = ("diag" in parts or "report" in parts) and bool(exp.diagnostics)
    if exp.family is not None and (exp.dump_family or wants_diag):
        f = build_family(exp.family)
        status["family"] = {"spec": exp.family.to_dict(), "length": len(f), "tail_bound": f.tail_bound}
        if exp.dump_family:
            art.write(f"{exp.name}/family.json", seq_to_json(f) + "\n")
    kinds = set()
    if "diag" in parts:
        kinds |= {"ritt_table", "half_table", "semigroup_table", "sector_report"}
    if "report" in parts:
        kinds.add("class_a_report")
    if f is not None and kinds and check():
        status["diagnostics"] = run_diagnostics(exp, f, art, method, kinds, check)
    if "op" in parts and exp.operator_suite is not None and check():
        status["operators"] = run_operator_suite(exp, art, check)
    log.info("%s finished in %.1f s", exp.name, time.monotonic() - t0)
    return status


def run(config: RunConfig, out_dir: str | None = None, method: str | None = None, parts: set[str] | None = None) -> int:
    """Run every experiment of ``config``; write artifacts, summary and manifest."""
    parts = parts or {"diag", "report", "op"}
    root = Path(out_dir or config.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    art = Artifacts(root)
    m = method or config.method
    statuses = [run_experiment(e, art, m, parts) for e in config.experiments]
    art.write_json("config.json", config.source)
    art.write_json("summary.json", {"version": __version__, "method": m, "experiments": statuses})
    art.manifest()
    return EXIT_PARTIAL if any(s["partial"] for s in statuses) else EXIT_OK


# --------------------------------------------------------------------------
# comparison


def _read_manifest(path: Path) -> tuple[Path, dict[str, str]]:
    if path.is_dir():
        path = path / "MANIFEST"
    entries = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            digest, rel = line.split(None, 1)
            entries[rel.strip()] = digest
    return path.parent, entries


def _close(a: float, b: float, tol: float) -> bool:
    if a == b:
        return True
    if math.isnan(a) and math.isnan(b):
        return True
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _cells_equal(x: str, y: str, tol: float) -> tuple[bool, float]:
    try:
        a, b = float(x), float(y)
    except ValueError:
        return x == y, 0.0 if x == y else math.inf
    return _close(a, b, tol), (abs(a - b) if math.isfinite(a) and math.isfinite(b) else (0.0 if a == b else math.inf))


def _walk_json(a: Any, b: Any, tol: float) -> tuple[bool, float]:
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b, 0.0 if a == b else math.inf
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return _close(float(a), float(b), tol), abs(float(a) - float(b))
    if isinstance(a, dict) and isinstance(b, dict):
        if set(a) != set(b):
            return False, math.inf
        res = [_walk_json(a[k], b[k], tol) for k in a]
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return False, math.inf
        res = [_walk_json(x, y, tol) for x, y in zip(a, b)]
    else:
        return a == b, 0.0 if a == b else math.inf
    return all(r[0] for r in res), max((r[1] for r in res), default=0.0)


def compare(run_a: str | Path, run_b: str | Path, tolerance: float = 1e-10) -> dict:
    """Per-artifact numeric comparison of two runs given their manifests or directories.

    Identical hashes pass outright; CSV files are compared cell by cell and
    JSON files value by value with relative tolerance ``tolerance`` (scaled
    by ``max(1, |a|, |b|)``).  Artifacts present in only one run are listed
    as missing without failing the comparison.
    """
    root_a, ma = _read_manifest(Path(run_a))
    root_b, mb = _read_manifest(Path(run_b))
    rows = []
    for rel in sorted(set(ma) | set(mb)):
        if rel not in ma or rel not in mb:
            rows.append({"artifact": rel, "status": "missing_in_" + ("a" if rel not in ma else "b"), "max_diff": None})
            continue
        if ma[rel] == mb[rel]:
            rows.append({"artifact": rel, "status": "pass", "max_diff": 0.0})
            continue
        ta = (root_a / rel).read_text(encoding="utf-8")
        tb = (root_b / rel).read_text(encoding="utf-8")
        if rel.endswith(".csv"):
            ra, rb = list(csv.reader(io.StringIO(ta))), list(csv.reader(io.StringIO(tb)))
            ok, worst = len(ra) == len(rb), 0.0
            if ok:
                for xa, xb in zip(ra, rb):
                    if len(xa) != len(xb):
                        ok, worst = False, math.inf
                        break
                    for ca, cb in zip(xa, xb):
                        good, dd = _cells_equal(ca, cb, tolerance)
                        ok &= good
                        worst = max(worst, dd)
            else:
                worst = math.inf
        elif rel.endswith(".json"):
            ok, worst = _walk_json(json.loads(ta), json.loads(tb), tolerance)
        else:
            ok, worst = ta == tb, 0.0 if ta == tb else math.inf
        rows.append({"artifact": rel, "status": "pass" if ok else "fail", "max_diff": _finite(worst)})
    failed = [r["artifact"] for r in rows if r["status"] == "fail"]
    missing = [r["artifact"] for r in rows if r["status"].startswith("missing")]
    return {"tolerance": tolerance, "rows": rows, "failed": failed, "missing": missing, "ok": not failed}


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
    p.add_argument("--config", required=config_required, help="experiment configuration (JSON)")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--threads", type=int, help="FFT worker threads (default: RITT_LAB_THREADS or 1)")
    p.add_argument("--method", choices=("direct", "fft", "auto"), help="convolution method")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ritt-lab", description="Numerical laboratory for Ritt probabilities.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("family", help="construct families and dump them")
    _common(p, config_required=False)
    p.add_argument("--spec", help='inline family spec, e.g. \'{"family": "alpha_frac", "N": 1024, "alpha": 0.5}\'')
    p.add_argument("--format", choices=("json", "csv"), default="json")
    for name, text in (
        ("diag", "sequence diagnostics (tables and sector scan)"),
        ("report", "membership reports"),
        ("op", "operator suites"),
        ("run", "everything in the configuration"),
    ):
        _common(sub.add_parser(name, help=text))
    p = sub.add_parser("compare", help="compare two runs artifact by artifact")
    p.add_argument("run_a", help="MANIFEST file or run directory")
    p.add_argument("run_b", help="MANIFEST file or run directory")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--out", help="write the comparison JSON here")
    return ap


def _family_command(args) -> int:
    if args.spec:
        try:
            spec = FamilySpec.from_dict(json.loads(args.spec))
            f = build_family(spec)
        except (ValueError, json.JSONDecodeError) as exc:
            print(f"error: --spec: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        text = seq_to_json(f) + "\n" if args.format == "json" else seq_to_csv(f)
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            art = Artifacts(Path(args.out))
            art.write(f"family.{args.format}", text)
            art.manifest()
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if not args.config:
        print("error: family needs --config or --spec", file=sys.stderr)
        return EXIT_CONFIG
    cfg = load_config(args.config)
    root = Path(args.out or cfg.output_dir)
    art = Artifacts(root)
    for e in cfg.experiments:
        if e.family is None:
            continue
        f = build_family(e.family)
        text = seq_to_json(f) + "\n" if args.format == "json" else seq_to_csv(f)
        art.write(f"{e.name}/family.{args.format}", text)
    art.manifest()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "threads", None) is not None:
        set_threads(args.threads)
    try:
        if args.command == "compare":
            rep = compare(args.run_a, args.run_b, args.tolerance)
            for r in rep["rows"]:
                print(f"{r['status']:<12} {r['artifact']}  max_diff={r['max_diff']}")
            print("PASS" if rep["ok"] else "FAIL")
            if args.out:
                Path(args.out).write_text(json.dumps(rep, indent=2) + "\n", encoding="utf-8")
            return EXIT_OK if rep["ok"] else EXIT_FAIL
        if args.command == "family":
            return _family_command(args)
        cfg = load_config(args.config)
        parts = {
            "diag": {"diag"},
            "report": {"report"},
            "op": {"op"},
            "run": {"diag", "report", "op"},
        }[args.command]
        code = run(cfg, args.out, args.method, parts)
        print(f"artifacts written to {args.out or cfg.output_dir}")
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
