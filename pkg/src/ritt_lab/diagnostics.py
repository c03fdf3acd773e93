"""Sequence-level diagnostics for the class of Ritt probabilities.

Three statistics are tabulated over geometric grids, each as a certified
interval:

* ``n ||F^(n) - F^(n+1)||_1`` (the Ritt statistic),
* ``n^(1/2) ||F^(n) - F^(n+1)||_1`` (the half-power statistic),
* ``t ||(delta_0 - F) * exp(-t (delta_0 - F))||_1`` (the semigroup statistic).

Heavy-tailed sequences are handled in *window mode*: every power lives on
the window ``[0, L)`` and the mass of the exact difference beyond the
window is bounded either by the escaped probability mass or, when the
family has a closed-form generating function, by a Hankel-contour integral
along its branch cut, which is far sharper.  Light-tailed sequences are
handled in *growth mode*, where the support grows with ``n`` up to a cap.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import integrate

from .analytic import GFModel, model_for
from .families import build_family, FamilySpec
from .seq import (
    DEFAULT_CAP,
    Interval,
    MomentResult,
    Periodicity,
    ProbSeq,
    Spectrum,
    classify_periodicity,
    conv_exp,
    convolve,
    diff_bounds,
    first_moment,
    rescale,
)
from .transforms import SectorReport, sector_report

LIGHT_TAIL = 1e-10
LOW_PRECISION = 0.1
FLAT_TOL = 0.25
SLOPE_TOL = 0.15
GROWTH_MARGIN = 0.1
SECTOR_MARGIN = 0.1

DEFAULT_N_GRID = tuple(2**j for j in range(1, 12))
DEFAULT_T_GRID = tuple(float(2**j) for j in range(0, 11))

_EXPONENT = {"ritt_n": 1.0, "half_n": 0.5, "semigroup_t": 1.0}


# --------------------------------------------------------------------------
# Hankel-contour tail bounds


def _ritt_kernel(n: int) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """``phi -> (log|g|, arg g)`` for ``g = phi^n (1 - phi)``."""

    def kernel(phi):
        one = 1.0 - phi
        return n * np.log(np.abs(phi)) + np.log(np.abs(one)), n * np.angle(phi) + np.angle(one)

    return kernel


def _semigroup_kernel(t: float) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """``phi -> (log|g|, arg g)`` for ``g = (1 - phi) exp(-t (1 - phi))``."""

    def kernel(phi):
        one = 1.0 - phi
        return np.log(np.abs(one)) - t * one.real, np.angle(one) - t * one.imag

    return kernel


def hankel_tail_bound(
    cut: Callable[[np.ndarray], np.ndarray],
    kernel: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    L: int,
    cut_exponent: float = 1.0,
    s_lo: float = -60.0,
    s_hi: float = 6.0,
) -> float:
    """Bound ``sum_{k >= L} |c_k|`` for ``g = Phi(phi)`` with a branch cut on ``[1, inf)``.

    For real coefficients and at most algebraic growth of ``g`` in the slit
    plane, collapsing the Cauchy contour onto the cut gives
    ``c_k = (1/pi) int_1^inf Im g(x + i0) x^(-k-1) dx`` and therefore

        sum_{k >= L} |c_k| <= (1/pi) int_1^inf |Im g(x + i0)| x^(-L) / (x - 1) dx.

    The integral is taken in ``s`` with ``x = 1 + e^s / L``.  Near ``x = 1``
    the integrand is at most ``C u^a`` with ``a = cut_exponent``; the part
    below ``s_lo`` is bounded from the integrand at ``s_lo``.  The upper end
    is extended until the integrand is negligible.

    Parameters
    ----------
    cut : callable
        ``u -> phi(1 + u + i0)``.
    kernel : callable
        ``phi -> (log |g|, arg g)``; working in logarithms avoids overflow
        of high powers.
    L : int
        Window length.
    """
    L = int(L)

    def integrand(s: float) -> float:
        u = math.exp(s) / L
        phi = np.atleast_1d(cut(np.array([u])))
        logmod, arg = kernel(phi)
        lm = float(logmod[0]) - L * math.log1p(u)
        if lm < -745.0:
            return 0.0
        return math.exp(lm) * abs(math.sin(float(arg[0])))

    while integrand(s_hi) > 1e-40 and s_hi < 40.0:
        s_hi += 2.0
    # split where the oscillation starts to matter
    edges = np.linspace(s_lo, s_hi, 33)
    total = 0.0
    qerr = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(integrand, a, b, limit=200, epsabs=1e-16, epsrel=1e-10)
        total += v
        qerr += e
    # remainder below s_lo: |Im g| <= |g| ~ C u^a
    u_lo = math.exp(s_lo) / L
    phi = np.atleast_1d(cut(np.array([u_lo])))
    g_lo = math.exp(float(kernel(phi)[0][0]))
    a = max(cut_exponent, 1e-3)
    rem = 2.0 * g_lo / a
    return (total + 10.0 * qerr + rem) / math.pi


# --------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class DiagRow:
    """One row of a diagnostic table: statistic interval at ``index``."""

    index: float
    lower: float
    upper: float
    estimate: float
    low_precision: bool = False
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit ``log y = slope * log x + intercept``."""

    slope: float
    intercept: float
    residual: float
    window: tuple[float, float]


def fit_slope(x: Sequence[float], y: Sequence[float]) -> SlopeFit | None:
    """Log-log slope over the points with positive ``y`` (None if fewer than 2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (y > 0) & (x > 0)
    if keep.sum() < 2:
        return None
    lx, ly = np.log(x[keep]), np.log(y[keep])
    (slope, icpt), res, *_ = np.polyfit(lx, ly, 1, full=True)
    r = float(res[0]) if len(res) else 0.0
    return SlopeFit(float(slope), float(icpt), r, (float(x[keep][0]), float(x[keep][-1])))


@dataclass
class DiagTable:
    """Certified table of a Ritt-type statistic.

    ``raw`` holds the intervals of the norm itself (before multiplying by
    ``n``, ``n^(1/2)`` or ``t``); ``slope_fit`` fits the raw uppers over
    the top half of the grid and ``lower_fit`` the raw lowers.
    """

    statistic_kind: str
    rows: list[DiagRow]
    raw: list[Interval]
    slope_fit: SlopeFit | None = None
    lower_fit: SlopeFit | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.statistic_kind not in _EXPONENT:
            raise ValueError(f"unknown statistic kind {self.statistic_kind!r}")
        idx = [r.index for r in self.rows]
        if idx != sorted(idx):
            raise ValueError("rows must be sorted by index")
        for r in self.rows:
            if not r.lower <= r.upper:
                raise ValueError(f"row {r.index}: lower {r.lower} exceeds upper {r.upper}")
        top = self.raw[len(self.raw) // 2 :]
        top_idx = idx[len(idx) // 2 :]
        if self.slope_fit is None:
            self.slope_fit = fit_slope(top_idx, [i.upper for i in top])
        if self.lower_fit is None:
            self.lower_fit = fit_slope(top_idx, [i.lower for i in top])

    @property
    def indices(self) -> np.ndarray:
        return np.array([r.index for r in self.rows])

    @property
    def lowers(self) -> np.ndarray:
        return np.array([r.lower for r in self.rows])

    @property
    def uppers(self) -> np.ndarray:
        return np.array([r.upper for r in self.rows])

    def max_upper(self) -> float:
        return float(self.uppers.max()) if self.rows else 0.0

    def flatness(self, last: int = 3) -> float:
        """Relative spread ``max/min - 1`` of the last ``last`` uppers."""
        u = self.uppers[-last:]
        if u.max() == 0.0:
            return 0.0
        if u.min() <= 0.0:
            return math.inf
        return float(u.max() / u.min() - 1.0)

    def verdict(self) -> str:
        """``"bounded"``, ``"growing"`` or ``"inconclusive"``.

        Bounded needs the last three uppers within 25% and the slope of the
        raw uppers within 0.15 of the expected decay ``-e`` (``e = 1`` for the
        Ritt and semigroup statistics, ``1/2`` for the half-power one).  For
        the half-power statistic faster decay also counts as bounded, since
        a Ritt sequence has raw slope near ``-1`` there.
        Growing needs the slope of the raw lowers to be at least
        ``-e + 0.15 + 0.1``.  Upper bounds certify boundedness claims and
        lower bounds certify growth claims.
        """
        if not self.rows:
            return "inconclusive"
        if self.max_upper() == 0.0:
            return "bounded"
        e = _EXPONENT[self.statistic_kind]
        if self.lower_fit is not None and self.lower_fit.slope >= -e + SLOPE_TOL + GROWTH_MARGIN:
            return "growing"
        if self.slope_fit is None:
            return "inconclusive"
        sl = self.slope_fit.slope
        if self.statistic_kind == "half_n":
            u = self.uppers[-3:]
            steady = self.flatness() <= FLAT_TOL or bool(np.all(np.diff(u) <= 0))
            if steady and sl <= -e + SLOPE_TOL:
                return "bounded"
        elif self.flatness() <= FLAT_TOL and abs(sl + e) <= SLOPE_TOL:
            return "bounded"
        return "inconclusive"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "lower", "upper"])
        integral = self.statistic_kind != "semigroup_t"
        for r in self.rows:
            idx = str(int(r.index)) if integral else repr(float(r.index))
            w.writerow([idx, repr(r.lower), repr(r.upper)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "statistic_kind": self.statistic_kind,
            "rows": [asdict(r) for r in self.rows],
            "raw": [asdict(i) for i in self.raw],
            "slope_fit": asdict(self.slope_fit) if self.slope_fit else None,
            "lower_fit": asdict(self.lower_fit) if self.lower_fit else None,
            "flatness": self.flatness() if self.rows else None,
            "verdict": self.verdict(),
            "meta": self.meta,
        }


# --------------------------------------------------------------------------
# convolution chains


class _Chain:
    """Products of probabilities on a common window with cached transforms."""

    def __init__(self, f: ProbSeq, window: int | None, method: str):
        self.method = method
        if window is None:
            window = DEFAULT_CAP if _is_light(f) else len(f)
        window = int(window)
        if window < len(f):
            f = _truncate(f, window)
        self.windowed = window == len(f) and not _is_light(f)
        self.window = window
        self.f = f
        self._spec: dict[int, Spectrum] = {}

    def spectrum(self, x: ProbSeq) -> Spectrum:
        key = id(x)
        s = self._spec.get(key)
        if s is None or s[0] is not x:
            s = (x, Spectrum(x.coeffs, self.window))
            self._spec[key] = s
        return s[1]

    def forget(self, x: ProbSeq) -> None:
        self._spec.pop(id(x), None)

    def mul(self, a: ProbSeq, b: ProbSeq) -> ProbSeq:
        if not self.windowed or self.method == "direct":
            return convolve(a, b, self.method, self.window)
        c, rnd = self.spectrum(a).multiply(self.spectrum(b))
        err = a.coeff_err + a.l1() * b.coeff_err + rnd
        return ProbSeq.from_window(c, err)

    def power(self, x: ProbSeq, k: int) -> ProbSeq:
        result = None
        base = x
        while True:
            if k & 1:
                result = base if result is None else self.mul(result, base)
            k >>= 1
            if not k:
                return result
            base = self.mul(base, base)


def _is_light(f: ProbSeq) -> bool:
    return f.omitted_bound <= LIGHT_TAIL


def _truncate(f: ProbSeq, window: int) -> ProbSeq:
    """Restrict ``f`` to ``[0, window)``; the dropped mass joins the tail."""
    dropped = float(np.sum(f.coeffs[window:]))
    omitted = f.omitted_bound + dropped + f.coeff_err
    meta = dict(f.meta)
    return ProbSeq.from_window(f.coeffs[:window], f.coeff_err, meta, omitted=omitted)


def _model(f: ProbSeq, model: Any) -> GFModel | None:
    if model == "auto":
        try:
            return model_for(f.meta)
        except (KeyError, TypeError, ValueError):
            return None
    return model


def _majorant_uppers(majorant: Sequence[DiagTable] | DiagTable | None, kind: str, idx) -> list | None:
    """Sum of raw uppers of dominating tables at the given indices."""
    if majorant is None:
        return None
    tabs = [majorant] if isinstance(majorant, DiagTable) else list(majorant)
    out = np.zeros(len(idx))
    for t in tabs:
        if (t.statistic_kind == "semigroup_t") != (kind == "semigroup_t"):
            raise ValueError("majorant table has a different statistic")
        lookup = {float(r_idx): iv.upper for r_idx, iv in zip(t.indices, t.raw)}
        try:
            out += np.array([lookup[float(i)] for i in idx])
        except KeyError as exc:
            raise ValueError(f"majorant table lacks index {exc.args[0]}") from None
    return out.tolist()


def _diff_intervals(
    f: ProbSeq,
    n_grid: Sequence[int],
    window: int | None,
    method: str,
    model: Any,
) -> tuple[list[Interval], dict]:
    """Raw intervals for ``||F^(n) - F^(n+1)||_1`` along a shared chain."""
    n_grid = [int(n) for n in n_grid]
    if any(n < 0 for n in n_grid) or n_grid != sorted(n_grid):
        raise ValueError("n_grid must be ascending non-negative integers")
    ch = _Chain(f, window, method)
    gm = _model(f, model) if ch.windowed else None
    use_hankel = gm is not None and gm.cut is not None
    out: list[Interval] = []
    hankel: list[float | None] = []
    cur, cur_n = None, 0
    for n in n_grid:
        if n == 0:
            fn = ProbSeq([1.0])
        elif cur is None:
            fn = ch.power(ch.f, n)
        elif n == 2 * cur_n:
            fn = ch.mul(cur, cur)
        elif n == cur_n:
            fn = cur
        else:
            fn = ch.mul(cur, ch.power(ch.f, n - cur_n))
        if cur is not None and cur is not fn:
            ch.forget(cur)
        fn1 = ch.mul(fn, ch.f) if n else ch.f
        outside = None
        if use_hankel:
            outside = hankel_tail_bound(gm.cut, _ritt_kernel(n), ch.window, gm.cut_exponent)
        iv, _ = diff_bounds(fn, fn1, outside)
        out.append(iv)
        hankel.append(outside)
        ch.forget(fn1)
        cur, cur_n = fn, n
    meta = {
        "mode": "window" if ch.windowed else "growth",
        "window": ch.window,
        "hankel": hankel if use_hankel else None,
        "family": f.meta.get("family"),
    }
    return out, meta


def _rows(kind: str, idx, raw: list[Interval], scale) -> list[DiagRow]:
    rows = []
    for i, iv, s in zip(idx, raw, scale):
        lo, up, est = s * iv.lower, s * iv.upper, s * iv.estimate
        flags = []
        low = up > 0 and (up - lo) > LOW_PRECISION * up
        if low:
            flags.append("low_precision")
        rows.append(DiagRow(float(i), lo, up, est, low, tuple(flags)))
    return rows


def _apply_majorant(raw: list[Interval], maj: list | None) -> tuple[list[Interval], list[bool]]:
    if maj is None:
        return raw, [False] * len(raw)
    out, used = [], []
    for iv, m in zip(raw, maj):
        if m < iv.upper:
            out.append(Interval(min(iv.lower, m), m, min(iv.estimate, m)))
            used.append(True)
            if iv.lower > m * (1 + 1e-9):
                warnings.warn("lower bound exceeds majorant; check the majorant")
        else:
            out.append(iv)
            used.append(False)
    return out, used


def _power_table(
    kind: str,
    f: ProbSeq,
    n_grid: Sequence[int] | None,
    window: int | None,
    method: str,
    model: Any,
    majorant,
    raw: list[Interval] | None = None,
    meta: dict | None = None,
) -> DiagTable:
    n_grid = list(DEFAULT_N_GRID if n_grid is None else n_grid)
    if raw is None:
        raw, meta = _diff_intervals(f, n_grid, window, method, model)
    maj = _majorant_uppers(majorant, kind, n_grid)
    raw, used = _apply_majorant(raw, maj)
    meta = dict(meta or {})
    meta["majorant_rows"] = used
    p = _EXPONENT[kind]
    rows = _rows(kind, n_grid, raw, [n**p for n in n_grid])
    return DiagTable(kind, rows, raw, meta=meta)


def ritt_table(
    f: ProbSeq,
    n_grid: Sequence[int] | None = None,
    *,
    window: int | None = None,
    method: str = "auto",
    model: Any = "auto",
    majorant: Sequence[DiagTable] | DiagTable | None = None,
) -> DiagTable:
    """Rows ``n ||F^(n) - F^(n+1)||_1`` as certified intervals.

    Parameters
    ----------
    f : ProbSeq
    n_grid : ascending ints, default ``2, 4, ..., 2048``
    window : int, optional
        Working window.  Defaults to ``len(f)`` for heavy tails (window
        mode) and to the growth cap for light tails.
    model : GFModel, None or ``"auto"``
        Closed-form generating function used for Hankel tail bounds in
        window mode; ``"auto"`` looks it up from ``f.meta``.
    majorant : DiagTable or list of DiagTable, optional
        Ritt tables of dominating sequences; the sum of their raw uppers
        bounds the raw norm of ``f``.  A single table applies to a
        subordinated sequence ``sum_k G(k) H^(k)`` with ``G`` the
        dominating sequence; a list applies to a convolution of the
        corresponding sequences.

    Examples
    --------
    >>> from ritt_lab.seq import delta
    >>> ritt_table(delta(0), [2, 4]).uppers.tolist()
    [0.0, 0.0]
    """
    return _power_table("ritt_n", f, n_grid, window, method, model, majorant)


def half_table(
    f: ProbSeq,
    n_grid: Sequence[int] | None = None,
    *,
    window: int | None = None,
    method: str = "auto",
    model: Any = "auto",
    majorant: Sequence[DiagTable] | DiagTable | None = None,
) -> DiagTable:
    """Rows ``n^(1/2) ||F^(n) - F^(n+1)||_1`` as certified intervals."""
    return _power_table("half_n", f, n_grid, window, method, model, majorant)


def tables_from_chain(
    f: ProbSeq,
    n_grid: Sequence[int] | None = None,
    *,
    window: int | None = None,
    method: str = "auto",
    model: Any = "auto",
    majorant=None,
) -> tuple[DiagTable, DiagTable]:
    """Ritt and half-power tables from one shared convolution chain."""
    n_grid = list(DEFAULT_N_GRID if n_grid is None else n_grid)
    raw, meta = _diff_intervals(f, n_grid, window, method, model)
    r = _power_table("ritt_n", f, n_grid, window, method, model, majorant, raw, meta)
    h = _power_table("half_n", f, n_grid, window, method, model, majorant, raw, meta)
    return r, h


def semigroup_table(
    f: ProbSeq,
    t_grid: Sequence[float] | None = None,
    *,
    window: int | None = None,
    method: str = "auto",
    model: Any = "auto",
    majorant: Sequence[DiagTable] | DiagTable | None = None,
    eps: float = 1e-13,
) -> DiagTable:
    """Rows ``t ||(delta_0 - F) * exp(-t (delta_0 - F))||_1``.

    The exponential is built once at the first grid time and advanced by
    squaring (doubling grids) or by multiplying with the exponential of the
    increment.  Rows whose uniformization error exceeds 10% of the value
    are flagged low-precision.
    """
    t_grid = [float(t) for t in (DEFAULT_T_GRID if t_grid is None else t_grid)]
    if any(t < 1 for t in t_grid) or t_grid != sorted(t_grid):
        raise ValueError("t_grid must be ascending with t >= 1")
    ch = _Chain(f, window, method)
    gm = _model(f, model) if ch.windowed else None
    use_hankel = gm is not None and gm.cut is not None and gm.semigroup_ok
    raw: list[Interval] = []
    hankel: list[float | None] = []
    cur, cur_t = None, 0.0
    for t in t_grid:
        if cur is None:
            et = conv_exp(ch.f, t, method, ch.window, eps)
        elif t == 2 * cur_t:
            et = ch.mul(cur, cur)
        elif t == cur_t:
            et = cur
        else:
            et = ch.mul(cur, conv_exp(ch.f, t - cur_t, method, ch.window, eps))
        if cur is not None and cur is not et:
            ch.forget(cur)
        ef = ch.mul(et, ch.f)
        outside = None
        if use_hankel:
            outside = hankel_tail_bound(gm.cut, _semigroup_kernel(t), ch.window, gm.cut_exponent)
        iv, _ = diff_bounds(et, ef, outside)
        raw.append(iv)
        hankel.append(outside)
        ch.forget(ef)
        cur, cur_t = et, t
    maj = _majorant_uppers(majorant, "semigroup_t", t_grid)
    raw, used = _apply_majorant(raw, maj)
    meta = {
        "mode": "window" if ch.windowed else "growth",
        "window": ch.window,
        "hankel": hankel if use_hankel else None,
        "family": f.meta.get("family"),
        "majorant_rows": used,
    }
    rows = _rows("semigroup_t", t_grid, raw, t_grid)
    return DiagTable("semigroup_t", rows, raw, meta=meta)


# --------------------------------------------------------------------------
# aggregated report

CONSISTENT = "consistent_with_A"
INCONSISTENT = "inconsistent_with_A"
INCONCLUSIVE = "inconclusive"


@dataclass
class ReportConfig:
    """Settings for :func:`class_a_report`.

    ``sector_window`` truncates the sequence for the boundary scan (the
    truncation error is part of the enclosure).  ``semigroup_window``
    likewise for the semigroup table; None keeps the full sequence.
    ``majorant`` is a family description (dict accepted by
    :class:`~ritt_lab.families.FamilySpec`) or a precomputed pair of
    (ritt table, semigroup table); ``"auto"`` builds the outer fractional
    family for subordinated sequences.
    """

    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    window: int | None = None
    semigroup_window: int | None = None
    sector_window: int | None = 1 << 20
    sector_J: int = 40
    run_half: bool = True
    run_semigroup: bool = True
    method: str = "auto"
    majorant: Any = "auto"
    majorant_window: int = 1 << 23
    moment_margin: float = 0.15

    @classmethod
    def from_dict(cls, d: dict) -> "ReportConfig":
        names = set(cls.__dataclass_fields__)
        bad = set(d) - names
        if bad:
            raise ValueError(f"unknown report settings: {sorted(bad)}")
        d = dict(d)
        for k in ("n_grid", "t_grid"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        if not isinstance(self.majorant, (str, dict, type(None))):
            d["majorant"] = "precomputed"
        return d


@dataclass
class ClassAReport:
    """Screens for membership in the Ritt class, with evidence.

    ``verdict`` aggregates: any screen reporting ``inconsistent_with_A``
    wins; otherwise a bounded Ritt or semigroup table gives
    ``consistent_with_A``; otherwise ``inconclusive``.  Verdicts summarize
    numerical evidence and are never proofs.
    """

    verdict: str
    screens: dict[str, str]
    evidence: dict[str, str]
    periodicity: Periodicity
    rescaled_by: int
    moment: MomentResult | None
    sector: SectorReport | None
    ritt: DiagTable | None
    half: DiagTable | None
    semigroup: DiagTable | None
    config: ReportConfig

    def to_dict(self) -> dict:
        sec = None
        if self.sector is not None:
            s = self.sector
            sec = {
                "sup_angle": s.sup_angle,
                "limit_estimate": s.limit_estimate,
                "source": s.source,
                "near_zero_xi": list(map(float, s.near_zero_xi)),
                "near_zero_args": list(map(float, s.near_zero_args)),
            }
        return {
            "verdict": self.verdict,
            "screens": self.screens,
            "evidence": self.evidence,
            "periodicity": asdict(self.periodicity),
            "rescaled_by": self.rescaled_by,
            "moment": asdict(self.moment) if self.moment else None,
            "sector": sec,
            "ritt": self.ritt.to_dict() if self.ritt else None,
            "half": self.half.to_dict() if self.half else None,
            "semigroup": self.semigroup.to_dict() if self.semigroup else None,
            "config": self.config.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    raise TypeError(f"not serializable: {type(x)}")


def _moment_screen(m: MomentResult, margin: float) -> tuple[str, str]:
    if m.kind == "divergent_evidence":
        return CONSISTENT, f"decay slope {m.slope:.3f} suggests an infinite first moment"
    if m.slope is None:
        return INCONSISTENT, f"finite support with mean {m.value:.6g}"
    if m.slope < -2.0 - margin:
        return INCONSISTENT, f"decay slope {m.slope:.3f} gives a finite first moment"
    return INCONCLUSIVE, f"decay slope {m.slope:.3f} is near the summability threshold -2"


def _sector_screen(s: SectorReport) -> tuple[str, str]:
    lim = s.limit_estimate
    if lim is None:
        return INCONCLUSIVE, "no reliable argument estimate near the origin"
    if abs(lim) >= math.pi / 2 - SECTOR_MARGIN:
        return INCONSISTENT, f"argument limit {lim:.4f} reaches the right angle"
    return CONSISTENT, f"argument limit {lim:.4f} stays inside a sector ({s.source})"


def _table_screen(t: DiagTable, name: str) -> tuple[str, str]:
    v = t.verdict()
    sl = t.slope_fit.slope if t.slope_fit else float("nan")
    if v == "bounded":
        return CONSISTENT, f"{name} bounded: max upper {t.max_upper():.4g}, slope {sl:.3f}"
    if v == "growing":
        ls = t.lower_fit.slope if t.lower_fit else float("nan")
        return INCONSISTENT, f"{name} growing: lower slope {ls:.3f}"
    return INCONCLUSIVE, f"{name} undecided: flatness {t.flatness():.3f}, slope {sl:.3f}"


def _auto_majorant(f: ProbSeq, cfg: ReportConfig):
    maj = cfg.majorant
    if maj is None:
        return None
    if maj == "auto":
        fam = f.meta.get("family")
        p = f.meta.get("params", {})
        if fam == "log_mix_sub":
            maj = {"family": "alpha_frac", "N": cfg.majorant_window, "alpha": p["beta"]}
        elif fam == "subordinate" and p.get("outer", {}).get("family") == "alpha_frac":
            maj = {"family": "alpha_frac", "N": cfg.majorant_window, **p["outer"]["params"]}
        else:
            return None
    if isinstance(maj, dict):
        g = build_family(FamilySpec.from_dict(maj))
        r = ritt_table(g, cfg.n_grid, method=cfg.method)
        s = semigroup_table(g, cfg.t_grid, window=cfg.semigroup_window, method=cfg.method) if cfg.run_semigroup else None
        return r, s
    return maj


def class_a_report(f: ProbSeq, config: ReportConfig | dict | None = None) -> ClassAReport:
    """Run every screen for membership in the Ritt class.

    Steps: periodicity of the support (sequences supported on ``mZ`` are
    rescaled by ``m`` first), first-moment screen, boundary sector scan,
    then the Ritt, half-power and semigroup tables.  Subordinated
    sequences use the tables of the outer factor as majorants.
    """
    cfg = config if isinstance(config, ReportConfig) else ReportConfig.from_dict(config or {})
    per = classify_periodicity(f)
    scale = 1
    while per.kind == "not_adapted":
        f = rescale(f, per.modulus)
        scale *= per.modulus
        per = classify_periodicity(f)
    screens: dict[str, str] = {}
    evidence: dict[str, str] = {}
    empty = dict(moment=None, sector=None, ritt=None, half=None, semigroup=None)
    if per.kind == "degenerate":
        screens["periodicity"] = CONSISTENT
        evidence["periodicity"] = "point mass at 0: every statistic vanishes"
        return ClassAReport(CONSISTENT, screens, evidence, per, scale, config=cfg, **empty)
    if per.kind == "adapted_not_aperiodic":
        screens["periodicity"] = INCONSISTENT
        evidence["periodicity"] = (
            f"support in {per.modulus}Z+{per.offset}: the transform has modulus 1 off the origin"
        )
        return ClassAReport(INCONSISTENT, screens, evidence, per, scale, config=cfg, **empty)
    screens["periodicity"] = CONSISTENT
    evidence["periodicity"] = f"aperiodic support (prefix of length {len(f)})"

    mom = first_moment(f, margin=cfg.moment_margin)
    screens["first_moment"], evidence["first_moment"] = _moment_screen(mom, cfg.moment_margin)

    sf = f if cfg.sector_window is None or cfg.sector_window >= len(f) else _truncate(f, cfg.sector_window)
    sec = sector_report(sf, J=cfg.sector_J)
    if sec.limit_estimate is None:
        gm = _model(f, "auto")
        if gm is not None:
            sec = sector_report(sf, J=cfg.sector_J, model=gm)
    screens["sector"], evidence["sector"] = _sector_screen(sec)

    maj = _auto_majorant(f, cfg)
    maj_r, maj_s = maj if maj is not None else (None, None)
    ritt, half = tables_from_chain(f, cfg.n_grid, window=cfg.window, method=cfg.method, majorant=maj_r)
    screens["ritt"], evidence["ritt"] = _table_screen(ritt, "Ritt table")
    if cfg.run_half:
        screens["half"], evidence["half"] = _half_screen(half)
    else:
        half = None
    semi = None
    if cfg.run_semigroup:
        semi = semigroup_table(
            f, cfg.t_grid, window=cfg.semigroup_window, method=cfg.method, majorant=maj_s
        )
        screens["semigroup"], evidence["semigroup"] = _table_screen(semi, "semigroup table")

    if INCONSISTENT in screens.values():
        verdict = INCONSISTENT
    elif screens["ritt"] == CONSISTENT or screens.get("semigroup") == CONSISTENT:
        verdict = CONSISTENT
    else:
        verdict = INCONCLUSIVE
    return ClassAReport(verdict, screens, evidence, per, scale, mom, sec, ritt, half, semi, cfg)


def _half_screen(t: DiagTable) -> tuple[str, str]:
    # the half-power statistic is bounded for every aperiodic sequence with a
    # suitable tail, so it never decides membership; report it as context
    v = t.verdict()
    return INCONCLUSIVE if v != "growing" else INCONSISTENT, f"half-power table {v}"
