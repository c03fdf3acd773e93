"""Experiment configuration: a versioned JSON schema with strict validation.

A configuration file looks like::

    {
      "version": 1,
      "output_dir": "out",
      "method": "auto",
      "experiments": [
        {
          "name": "alpha_half",
          "family": {"family": "alpha_frac", "N": 4194304, "alpha": 0.5},
          "diagnostics": ["ritt_table", {"kind": "semigroup_table", "t_grid": [1, 2, 4]}],
          "operator_suite": {"matrix": {"source": "volterra", "d": 64},
                             "checks": ["resolvent_kreiss"]},
          "tolerances": {"subordination": 1e-10}
        }
      ]
    }

Unknown keys are rejected.  Every validation error names the offending
field and the line of the file where it appears.
"""

from __future__ import annotations

import json
import json.decoder
import json.scanner
import re
from dataclasses import dataclass, field
from typing import Any

from .families import FamilySpec, build_family

SCHEMA_VERSION = 1

DIAG_KINDS = {
    "ritt_table": {"n_grid", "window"},
    "half_table": {"n_grid", "window"},
    "semigroup_table": {"t_grid", "window"},
    "sector_report": {"J", "window"},
    "class_a_report": {"config"},
}
MATRIX_SOURCES = {
    "random_normal": {"d", "count"},
    "volterra": {"d"},
    "shift": {"d"},
    "identity": {"d"},
    "file": {"path"},
}
OP_CHECKS = {
    "power_bound",
    "subordination",
    "spectral_map",
    "frac_power",
    "semigroup_law",
    "resolvent_ritt",
    "resolvent_kreiss",
    "ritt_from_kreiss",
    "kritt",
}
OP_PARAMS = {"n", "alpha", "gammas", "n_angles", "radii", "horizon"}
DEFAULT_TOLERANCES = {
    "subordination": 1e-10,
    "spectral_map": 1e-8,
    "semigroup_law": 1e-8,
    "flatness": 0.25,
}
TOP_KEYS = {"version", "output_dir", "method", "seed", "experiments"}
EXP_KEYS = {"name", "family", "diagnostics", "operator_suite", "tolerances", "seed", "time_budget", "dump_family"}
SUITE_KEYS = {"matrix", "checks", "params", "family"}


class ConfigError(ValueError):
    """Invalid configuration; the message starts with ``line N:`` when known."""


# --------------------------------------------------------------------------
# JSON with line information


class _LineDict(dict):
    """Dictionary that remembers the source line of itself and of each key."""

    line: int = 0
    key_lines: dict


def _line_of(s: str, pos: int) -> int:
    return s.count("\n", 0, pos) + 1


def _top_level_keys(s: str, start: int, end: int) -> dict[str, int]:
    """Positions of the keys directly inside the object ``s[start:end]``."""
    out: dict[str, int] = {}
    depth = 0
    i = start
    expect_key = False
    while i < end:
        ch = s[i]
        if ch == '"':
            j = i + 1
            while s[j] != '"':
                j += 2 if s[j] == "\\" else 1
            if depth == 1 and expect_key:
                out[json.loads(s[i : j + 1])] = i
                expect_key = False
            i = j + 1
            continue
        if ch in "{[":
            depth += 1
            expect_key = depth == 1 and ch == "{"
        elif ch in "}]":
            depth -= 1
        elif ch == "," and depth == 1:
            expect_key = True
        i += 1
    return out


def _make_decoder() -> json.JSONDecoder:
    dec = json.JSONDecoder()

    def parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None):
        s, end = s_and_end
        obj, new_end = json.decoder.JSONObject(s_and_end, strict, scan_once, None, None, memo)
        d = _LineDict(obj)
        d.line = _line_of(s, end - 1)
        d.key_lines = {k: _line_of(s, p) for k, p in _top_level_keys(s, end - 1, new_end).items()}
        return d, new_end

    dec.parse_object = parse_object
    dec.scan_once = json.scanner.py_make_scanner(dec)
    return dec


def load_json_with_lines(text: str) -> Any:
    """Parse JSON, attaching source lines to every object."""
    try:
        return _make_decoder().decode(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}: invalid JSON: {exc.msg} (column {exc.colno})") from None


def _err(obj: Any, key: str | None, path: str, msg: str) -> ConfigError:
    line = None
    if isinstance(obj, _LineDict):
        line = obj.key_lines.get(key, obj.line) if key is not None else obj.line
    where = f"{path}.{key}" if key is not None else path
    prefix = f"line {line}: " if line else ""
    return ConfigError(f"{prefix}{where}: {msg}")


# --------------------------------------------------------------------------
# schema


@dataclass
class DiagRequest:
    kind: str
    options: dict = field(default_factory=dict)


@dataclass
class OperatorSuite:
    matrix: dict
    checks: list[str]
    params: dict = field(default_factory=dict)
    family: FamilySpec | None = None


@dataclass
class ExperimentConfig:
    """One experiment: a family, its diagnostics and an optional operator suite."""

    name: str
    family: FamilySpec | None
    diagnostics: list[DiagRequest]
    operator_suite: OperatorSuite | None
    tolerances: dict
    seed: int = 0
    time_budget: float | None = None
    dump_family: bool = False


@dataclass
class RunConfig:
    version: int
    output_dir: str
    method: str
    seed: int
    experiments: list[ExperimentConfig]
    source: dict = field(default_factory=dict, repr=False)


def _check_keys(obj: Any, allowed: set, path: str) -> None:
    if not isinstance(obj, dict):
        raise _err(obj, None, path, "expected an object")
    for k in obj:
        if k not in allowed:
            raise _err(obj, k, path, f"unknown key (allowed: {sorted(allowed)})")


def _positive(obj: dict, key: str, path: str, integer: bool = False) -> None:
    v = obj[key]
    ok = isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0
    if integer:
        ok = ok and float(v).is_integer()
    if not ok:
        raise _err(obj, key, path, f"must be a positive {'integer' if integer else 'number'}")


_FAMILY_FIELD = re.compile(r"\b([A-Za-z_]+)\b")


def _validate_family(obj: Any, path: str) -> FamilySpec:
    try:
        spec = FamilySpec.from_dict(obj)
    except ValueError as exc:
        raise _err(obj, None, path, str(exc)) from None
    small = spec.N if spec.family in ("delta", "poisson") else min(spec.window, 64)
    probe = FamilySpec(spec.family, small, spec.params)
    try:
        build_family(probe)
    except ValueError as exc:
        msg = str(exc)
        keys = [k for k in obj if k in _FAMILY_FIELD.findall(msg)] if isinstance(obj, dict) else []
        key = keys[0] if keys else None
        raise _err(obj, key, path, msg) from None
    if isinstance(obj, dict) and "N" in obj:
        _positive(obj, "N", path, integer=True)
    return spec


def _validate_grid(obj: dict, key: str, path: str, minimum: float, integer: bool) -> None:
    g = obj[key]
    if not isinstance(g, list) or not g:
        raise _err(obj, key, path, "must be a nonempty list")
    for v in g:
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v < minimum:
            raise _err(obj, key, path, f"entries must be numbers >= {minimum}")
        if integer and not float(v).is_integer():
            raise _err(obj, key, path, "entries must be integers")
    if list(g) != sorted(g):
        raise _err(obj, key, path, "must be ascending")


def _validate_diag(obj: Any, path: str) -> DiagRequest:
    if isinstance(obj, str):
        obj_d: dict = {"kind": obj}
        src = None
    else:
        obj_d, src = obj, obj
    if not isinstance(obj_d, dict) or "kind" not in obj_d:
        raise _err(src, None, path, "diagnostic must be a name or an object with 'kind'")
    kind = obj_d["kind"]
    if kind not in DIAG_KINDS:
        raise _err(src, "kind", path, f"unknown diagnostic {kind!r} (allowed: {sorted(DIAG_KINDS)})")
    _check_keys(obj_d, DIAG_KINDS[kind] | {"kind"}, path)
    if "n_grid" in obj_d:
        _validate_grid(obj_d, "n_grid", path, 0, True)
    if "t_grid" in obj_d:
        _validate_grid(obj_d, "t_grid", path, 1, False)
    for k in ("window", "J"):
        if k in obj_d:
            _positive(obj_d, k, path, integer=True)
    if "config" in obj_d:
        from .diagnostics import ReportConfig

        try:
            ReportConfig.from_dict(dict(obj_d["config"]))
        except (TypeError, ValueError) as exc:
            raise _err(obj_d, "config", path, str(exc)) from None
    return DiagRequest(kind, {k: v for k, v in obj_d.items() if k != "kind"})


def _validate_suite(obj: Any, path: str) -> OperatorSuite:
    _check_keys(obj, SUITE_KEYS, path)
    for k in ("matrix", "checks"):
        if k not in obj:
            raise _err(obj, None, path, f"missing key {k!r}")
    m = obj["matrix"]
    mpath = f"{path}.matrix"
    if not isinstance(m, dict) or "source" not in m:
        raise _err(m, None, mpath, "matrix must be an object with 'source'")
    src = m["source"]
    if src not in MATRIX_SOURCES:
        raise _err(m, "source", mpath, f"unknown matrix source {src!r} (allowed: {sorted(MATRIX_SOURCES)})")
    _check_keys(m, MATRIX_SOURCES[src] | {"source", "subordinate"}, mpath)
    for k in ("d", "count"):
        if k in m:
            _positive(m, k, mpath, integer=True)
    if src in ("volterra", "shift") and m.get("d", 2) < 2:
        raise _err(m, "d", mpath, "must be at least 2")
    if src == "file" and not isinstance(m.get("path"), str):
        raise _err(m, "path", mpath, "must be a file path")
    if "subordinate" in m:
        _validate_family(m["subordinate"], f"{mpath}.subordinate")
    checks = obj["checks"]
    if not isinstance(checks, list) or not checks:
        raise _err(obj, "checks", path, "must be a nonempty list")
    for c in checks:
        if c not in OP_CHECKS:
            raise _err(obj, "checks", path, f"unknown check {c!r} (allowed: {sorted(OP_CHECKS)})")
    params = obj.get("params", {})
    _check_keys(params, OP_PARAMS, f"{path}.params")
    if "alpha" in params:
        a = params["alpha"]
        if not isinstance(a, (int, float)) or not 0 < a < 1:
            raise _err(params, "alpha", f"{path}.params", "must lie in (0, 1)")
    if "gammas" in params:
        g = params["gammas"]
        if not isinstance(g, list) or not g or any(not isinstance(x, (int, float)) or not 1 < x < 2 for x in g):
            raise _err(params, "gammas", f"{path}.params", "must be a nonempty list in (1, 2)")
    for k in ("n", "n_angles", "horizon"):
        if k in params:
            _positive(params, k, f"{path}.params", integer=True)
    if "radii" in params:
        r = params["radii"]
        if not isinstance(r, list) or not r or any(not isinstance(x, (int, float)) or x <= 1 for x in r):
            raise _err(params, "radii", f"{path}.params", "must be a nonempty list of numbers > 1")
    fam = _validate_family(obj["family"], f"{path}.family") if "family" in obj else None
    needs_family = {"subordination", "spectral_map"} & set(checks)
    if needs_family and fam is None:
        raise _err(obj, None, path, f"checks {sorted(needs_family)} need a 'family'")
    return OperatorSuite(dict(m), list(checks), dict(params), fam)


def _validate_experiment(obj: Any, path: str, index: int) -> ExperimentConfig:
    _check_keys(obj, EXP_KEYS, path)
    name = obj.get("name", f"exp{index}")
    if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        raise _err(obj, "name", path, "must be a simple name (letters, digits, _ . -)")
    fam = _validate_family(obj["family"], f"{path}.family") if "family" in obj else None
    diags_raw = obj.get("diagnostics", [])
    if not isinstance(diags_raw, list):
        raise _err(obj, "diagnostics", path, "must be a list")
    diags = []
    for i, d in enumerate(diags_raw):
        try:
            diags.append(_validate_diag(d, f"{path}.diagnostics[{i}]"))
        except ConfigError as exc:
            # bare names carry no position; anchor at the list
            if str(exc).startswith("line "):
                raise
            line = obj.key_lines.get("diagnostics", obj.line) if isinstance(obj, _LineDict) else None
            raise ConfigError(f"line {line}: {exc}" if line else str(exc)) from None
    suite = _validate_suite(obj["operator_suite"], f"{path}.operator_suite") if "operator_suite" in obj else None
    if not diags and suite is None:
        raise _err(obj, None, path, "request at least one diagnostic or an operator suite")
    if diags and fam is None:
        raise _err(obj, None, path, "diagnostics need a 'family'")
    tol_raw = obj.get("tolerances", {})
    _check_keys(tol_raw, set(DEFAULT_TOLERANCES), f"{path}.tolerances")
    for k in tol_raw:
        _positive(tol_raw, k, f"{path}.tolerances")
    tol = dict(DEFAULT_TOLERANCES, **tol_raw)
    seed = obj.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise _err(obj, "seed", path, "must be a nonnegative integer")
    tb = obj.get("time_budget")
    if tb is not None:
        _positive(obj, "time_budget", path)
    dump = obj.get("dump_family", False)
    if not isinstance(dump, bool):
        raise _err(obj, "dump_family", path, "must be true or false")
    return ExperimentConfig(name, fam, diags, suite, tol, seed, tb, dump)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    Raises
    ------
    ConfigError
        With a message of the form ``line N: path.to.field: problem``.
    """
    obj = load_json_with_lines(text)
    _check_keys(obj, TOP_KEYS, "config")
    if "version" not in obj:
        raise _err(obj, None, "config", "missing key 'version'")
    if obj["version"] != SCHEMA_VERSION:
        raise _err(obj, "version", "config", f"unsupported version {obj['version']!r} (expected {SCHEMA_VERSION})")
    method = obj.get("method", "auto")
    if method not in ("auto", "direct", "fft"):
        raise _err(obj, "method", "config", "must be one of auto, direct, fft")
    out = obj.get("output_dir", "out")
    if not isinstance(out, str) or not out:
        raise _err(obj, "output_dir", "config", "must be a nonempty path")
    seed = obj.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise _err(obj, "seed", "config", "must be a nonnegative integer")
    exps = obj.get("experiments")
    if not isinstance(exps, list) or not exps:
        raise _err(obj, "experiments", "config", "must be a nonempty list")
    parsed = [_validate_experiment(e, f"experiments[{i}]", i) for i, e in enumerate(exps)]
    names = [e.name for e in parsed]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise _err(obj, "experiments", "config", f"duplicate experiment names {sorted(dup)}")
    return RunConfig(SCHEMA_VERSION, out, method, seed, parsed, json.loads(text))


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
