"""Fourier transforms, generating functions and sector-angle diagnostics.

All sums over coefficients are evaluated with numpy's pairwise summation;
the reported error bound adds an explicit rounding budget to the
truncation error, so that the bound stays honest for windows of tens of
millions of terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import GFModel, model_for, polylog_ref
from .seq import EPS, ProbSeq, TruncSeq

__all__ = [
    "fourier",
    "gen_fn",
    "SectorReport",
    "sector_report",
    "near_zero_grid",
    "CriterionCheck",
    "check_real_lower",
    "check_deriv_bound",
    "polylog_ref",
]

_CHUNK = 1 << 18


def _power_sums(c: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For each w: ``sum c_k w^k``, ``sum |c_k| |w|^k`` and ``sum k |c_k| |w|^k``."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    val = np.zeros(w.size, dtype=complex)
    mag = np.zeros(w.size)
    kmag = np.zeros(w.size)
    zero = w == 0
    with np.errstate(divide="ignore"):
        logw = np.where(zero, 0, np.log(np.where(zero, 1, w)))
    on_circle = np.abs(np.abs(w) - 1) <= 4 * EPS
    real = not np.iscomplexobj(c)
    ac = np.abs(c)
    for start in range(0, c.size, _CHUNK):
        cc = c[start : start + _CHUNK]
        aa = ac[start : start + _CHUNK]
        kk = np.arange(start, start + cc.size, dtype=float)
        s_a = np.sum(aa)
        s_ka = np.dot(kk, aa)
        for i in range(w.size):
            if zero[i]:
                if start == 0:
                    val[i] = cc[0]
                    mag[i] = aa[0]
                continue
            if on_circle[i] and real:
                # w = exp(i theta): two real dot products
                ph = kk * logw[i].imag
                val[i] += complex(np.dot(cc, np.cos(ph)), np.dot(cc, np.sin(ph)))
                mag[i] += s_a
                kmag[i] += s_ka
                continue
            p = np.exp(kk * logw[i])
            val[i] += np.sum(cc * p)
            ap = np.abs(p)
            mag[i] += np.sum(aa * ap)
            kmag[i] += np.sum(kk * aa * ap)
    return val, mag, kmag


def _eval_with_error(f: TruncSeq, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    val, mag, kmag = _power_sums(f.coeffs, w)
    aw = np.abs(w)
    with np.errstate(divide="ignore"):
        loga = np.where(aw > 0, np.abs(np.log(np.where(aw > 0, w, 1))), 0.0)
    n = max(1, len(f))
    rounding = EPS * ((math.log2(n) + 4) * mag + 4 * kmag * loga)
    if isinstance(f, ProbSeq):
        trunc = f.coeff_err + f.omitted_bound * np.minimum(1.0, aw) ** len(f)
    else:
        trunc = np.full(w.size, f.tail_bound)
    return val, trunc + rounding


def gen_fn(f: TruncSeq, w, with_error: bool = True):
    """Generating function ``phi_F(w) = sum_k F(k) w^k`` for ``|w| <= 1``.

    Returns ``(value, error)``; arrays of ``w`` give arrays.  For a
    probability the truncation error is ``coeff_err + omitted |w|^N``.

    Examples
    --------
    >>> from ritt_lab.families import make_bernoulli
    >>> v, e = gen_fn(make_bernoulli(0.5), 1.0)
    >>> float(v.real)
    1.0
    """
    scalar = np.ndim(w) == 0
    wa = np.atleast_1d(np.asarray(w, dtype=complex))
    if np.any(np.abs(wa) > 1 + 1e-12):
        raise ValueError("generating functions are evaluated on |w| <= 1 only")
    val, err = _eval_with_error(f, wa)
    if scalar:
        val, err = val[0], float(err[0])
    return (val, err) if with_error else val


def fourier(f: TruncSeq, xi, with_error: bool = True):
    """``F^(xi) = sum_k F(k) e^{-i k xi}`` for ``xi`` in ``[-pi, pi]``.

    Evaluated through :func:`gen_fn` at ``w = e^{-i xi}``, so the two agree
    bit for bit.
    """
    xa = np.asarray(xi, dtype=float)
    if np.any(np.abs(xa) > math.pi + 1e-12):
        raise ValueError("xi must lie in [-pi, pi]")
    return gen_fn(f, np.exp(-1j * xa), with_error)


def near_zero_grid(J: int = 40) -> np.ndarray:
    """Geometric grid ``pi 2^{-j}``, ``j = 1..J``."""
    return math.pi * 2.0 ** -np.arange(1, J + 1)


@dataclass(frozen=True)
class SectorReport:
    """Arguments of ``1 - F^(xi)`` over a grid.

    Attributes
    ----------
    grid, values : ndarray
        Points ``xi`` and the values ``1 - F^(xi)``.
    moduli, args : ndarray
        ``|1 - F^(xi)|`` and ``|Arg(1 - F^(xi))|`` (principal branch).
    eval_error : ndarray
        Per-point bound on the evaluation error.
    arg_error : ndarray
        Resulting bound on the error of each argument, ``asin(err / modulus)``.
    indeterminate : ndarray of bool
        Points where the modulus does not exceed the error; excluded from
        ``sup_angle`` and from the limit fit.
    sup_angle : float
        Largest determinate argument.
    near_zero_xi, near_zero_args : ndarray
        The determinate points of the geometric part of the grid, ordered
        towards zero, and their arguments.
    limit_estimate : float or None
        Extrapolated ``lim_{xi -> 0} |Arg|`` from a least-squares fit of
        ``theta0 + c1 / (1 + |log xi|) + c2 xi`` over accurate near-zero
        points with ``xi <= 0.1`` (heuristic; None with fewer than 4 points).
    source : str
        ``"truncated"`` or ``"closed_form"``.
    """

    grid: np.ndarray
    values: np.ndarray
    moduli: np.ndarray
    args: np.ndarray
    eval_error: np.ndarray
    arg_error: np.ndarray
    indeterminate: np.ndarray
    sup_angle: float
    near_zero_xi: np.ndarray
    near_zero_args: np.ndarray
    limit_estimate: float | None
    source: str

    def to_csv(self) -> str:
        lines = ["xi,re,im,modulus,arg,eval_error"]
        for x, v, m, a, e in zip(self.grid, self.values, self.moduli, self.args, self.eval_error):
            lines.append(f"{x:.17g},{v.real:.17g},{v.imag:.17g},{m:.17g},{a:.17g},{e:.17g}")
        return "\n".join(lines) + "\n"


def _fit_limit(xi: np.ndarray, th: np.ndarray) -> float | None:
    sel = xi <= 0.1
    if sel.sum() < 4:
        return None
    x, t = xi[sel], th[sel]
    A = np.column_stack([np.ones_like(x), 1.0 / (1.0 + np.abs(np.log(x))), x])
    coef, *_ = np.linalg.lstsq(A, t, rcond=None)
    return float(coef[0])


def _evaluate(f: ProbSeq, grid: np.ndarray, model: GFModel | None) -> tuple[np.ndarray, np.ndarray, str]:
    """``1 - F^`` on the grid and its error bound (truncated sum or closed form)."""
    if model is not None:
        return 1 - model.gf(np.exp(-1j * grid)), np.full(grid.size, 64 * EPS), "closed_form"
    fh, err = fourier(f, grid)
    return 1 - fh, err, "truncated"


def _evaluate_towards_zero(
    f: ProbSeq, xi: np.ndarray, model: GFModel | None, rel: float = 0.05, patience: int = 3
) -> tuple[np.ndarray, np.ndarray, np.ndarray, str]:
    """Evaluate on a grid ordered towards 0, stopping once the error swamps the value.

    Evaluation stops after ``patience`` consecutive points whose error
    exceeds ``rel`` times the modulus; the remaining points are dropped.
    """
    vals, errs, used = [], [], []
    bad = 0
    source = "closed_form" if model is not None else "truncated"
    for x in xi:
        v, e, _ = _evaluate(f, np.array([x]), model)
        vals.append(v[0])
        errs.append(e[0])
        used.append(x)
        bad = bad + 1 if e[0] > rel * abs(v[0]) else 0
        if bad >= patience:
            break
    return np.array(used), np.array(vals), np.array(errs), source


def sector_report(
    f: ProbSeq,
    grid: np.ndarray | None = None,
    J: int = 40,
    model: GFModel | None = None,
) -> SectorReport:
    """Sector angles of ``1 - F^`` on a grid, with the near-zero trend.

    The default grid is 32 uniform points on ``(0, pi]`` plus the
    geometric points ``pi 2^{-j}``, ``j <= J``; the geometric part is
    floored where the evaluation error swamps the modulus.  With ``model``
    given, the closed-form generating function is used instead of the
    truncated sum.
    """
    if grid is None:
        uni = np.linspace(math.pi / 32, math.pi, 32)
        v1, e1, source = _evaluate(f, uni, model)
        geo, v2, e2, _ = _evaluate_towards_zero(f, near_zero_grid(J), model)
        grid = np.concatenate([uni, geo])
        vals = np.concatenate([v1, v2])
        err = np.concatenate([e1, e2])
        geo_mask = np.zeros(grid.size, dtype=bool)
        geo_mask[uni.size :] = True
    else:
        grid = np.asarray(grid, dtype=float)
        if np.any(grid == 0) or np.any(np.abs(grid) > math.pi + 1e-12):
            raise ValueError("sector grid must lie in [-pi, pi] without 0")
        vals, err, source = _evaluate(f, grid, model)
        geo_mask = np.isin(np.abs(grid), near_zero_grid(J))
    mod = np.abs(vals)
    args = np.abs(np.angle(vals))
    indet = mod <= err
    det = ~indet
    arg_err = np.where(det, np.arcsin(np.minimum(1.0, err / np.where(det, mod, 1.0))), np.pi)
    sup = float(args[det].max()) if det.any() else float("nan")
    geo = geo_mask & det
    order = np.argsort(-np.abs(grid[geo]))
    nz_xi = np.abs(grid[geo])[order]
    nz_args = args[geo][order]
    accurate = (err[geo] <= 0.05 * mod[geo])[order]
    limit = _fit_limit(nz_xi[accurate], nz_args[accurate])
    return SectorReport(grid, vals, mod, args, err, arg_err, indet, sup, nz_xi, nz_args, limit, source)


@dataclass(frozen=True)
class CriterionCheck:
    """Outcome of a finite-grid check of a sufficient condition.

    ``ok`` is True when a constant was found; ``constant`` is the largest
    admissible ``epsilon`` (lower bound checks) or the smallest ``c``
    (derivative checks); ``fail_at`` is the first violating point.  The
    result certifies the inequality on the grid only; ``certified`` is
    False when no error bound was available.
    """

    ok: bool
    constant: float | None
    fail_at: float | None
    ratios: np.ndarray
    grid: np.ndarray
    certified: bool
    source: str


def check_real_lower(
    f: ProbSeq, alpha: float, grid: np.ndarray | None = None, model: GFModel | None = None
) -> CriterionCheck:
    """Largest ``eps`` with ``1 - Re F^(xi) >= eps |xi|^alpha`` on the grid.

    The computed ``1 - Re F^`` is reduced by its error bound before dividing,
    so a positive constant is certified on the grid.  A non-positive ratio
    at some point is reported as a failure there.  The default grid is the
    geometric near-zero grid, floored where the evaluation error exceeds 5%
    of ``|1 - F^|``.
    """
    if grid is None:
        grid, vals, err, source = _evaluate_towards_zero(f, near_zero_grid(40), model)
        keep = err <= 0.05 * np.abs(vals)
        grid, vals, err = grid[keep], vals[keep], err[keep]
    else:
        grid = np.abs(np.asarray(grid, dtype=float))
        vals, err, source = _evaluate(f, grid, model)
    re = vals.real
    ratios = (re - err) / grid**alpha
    bad = np.flatnonzero(ratios <= 0)
    if bad.size:
        return CriterionCheck(False, None, float(grid[bad[0]]), ratios, grid, True, source)
    return CriterionCheck(True, float(ratios.min()), None, ratios, grid, True, source)


def check_deriv_bound(
    f: ProbSeq, alpha: float, grid: np.ndarray | None = None, model: GFModel | None = None
) -> CriterionCheck:
    """Smallest ``c`` with ``|d/dxi F^(xi)| <= c |xi|^{alpha - 1}`` on the grid.

    The derivative needs a closed form unless the support is finite: the
    truncated series ``sum (-i k) F(k) e^{-i k xi}`` has no usable error
    bound for heavy tails.  Without either, the truncated values are
    returned with ``certified=False``.  If the ratios over the six
    smallest grid points increase monotonically by more than a factor 2,
    the check fails at the smallest point.  A model is looked up from ``meta``
    when not supplied.
    """
    grid = near_zero_grid(40) if grid is None else np.abs(np.asarray(grid, dtype=float))
    if np.any(grid <= 0) or np.any(grid > math.pi + 1e-12):
        raise ValueError("derivative grid must lie in (0, pi]")
    model = model if model is not None else model_for(f.meta)
    certified = True
    if f.tail_bound == 0.0:
        k = np.arange(len(f), dtype=float)
        d = np.array([np.sum(-1j * k * f.coeffs * np.exp(-1j * k * x)) for x in grid])
        source = "finite_support"
    elif model is not None and model.dgf is not None:
        w = np.exp(-1j * grid)
        d = -1j * w * model.dgf(w)
        source = "closed_form"
    else:
        k = np.arange(len(f), dtype=float)
        d = np.array([np.sum(-1j * k * f.coeffs * np.exp(-1j * k * x)) for x in grid])
        source = "truncated"
        certified = False
    ratios = np.abs(d) * grid ** (1 - alpha)
    if not np.all(np.isfinite(ratios)):
        bad = np.flatnonzero(~np.isfinite(ratios))
        return CriterionCheck(False, None, float(grid[bad[0]]), ratios, grid, certified, source)
    order = np.argsort(-grid)
    last = ratios[order][-6:]
    if last.size == 6 and np.all(np.diff(last) > 0) and last[-1] > 2 * last[0]:
        # still growing towards xi -> 0: no constant works on a finer grid
        return CriterionCheck(False, None, float(grid[order][-1]), ratios, grid, certified, source)
    return CriterionCheck(True, float(ratios.max()), None, ratios, grid, certified, source)
