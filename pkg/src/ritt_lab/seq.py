"""Truncated sequences on the nonnegative integers and their convolution algebra.

Two containers are provided.  :class:`TruncSeq` is a finite coefficient
vector plus an l1 bound on everything that was left out.  :class:`ProbSeq`
is a probability on the nonnegative integers known on a window ``[0, N)``;
besides the omitted mass it carries ``coeff_err``, an l1 bound on the error
of the stored window coefficients themselves.  Keeping the two apart is
what makes long convolution chains of heavy-tailed probabilities usable:
when every factor is known on the same window, the window of the product
is determined by the windows of the factors and the error does not pick up
the (possibly large) omitted mass.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import scipy.fft as sfft
from scipy import stats

__all__ = [
    "DEFAULT_CAP",
    "TruncSeq",
    "ProbSeq",
    "Interval",
    "MomentResult",
    "Periodicity",
    "AperiodicityCheck",
    "l1_norm",
    "convolve",
    "conv_power",
    "conv_exp",
    "diff_norm",
    "first_moment",
    "classify_periodicity",
    "fourier_aperiodicity_check",
    "rescale",
    "lazy_part",
    "delta",
    "set_threads",
    "seq_to_json",
    "seq_from_json",
    "seq_to_csv",
    "seq_from_csv",
]

EPS = float(np.finfo(float).eps)
DEFAULT_CAP = 2**20
CLAMP_REL = 1e-15
NEG_FLOOR = -1e-14
MASS_TOL = 1e-12
DIRECT_MAX = 48

_threads: int | None = None


def set_threads(n: int | None) -> None:
    """Set the worker count used by the FFT routines (None: environment default)."""
    global _threads
    if n is not None and n < 1:
        raise ValueError("thread count must be positive")
    _threads = n


def _workers() -> int:
    if _threads is not None:
        return _threads
    env = os.environ.get("RITT_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"RITT_LAB_THREADS must be an integer, got {env!r}") from None
    return 1


FSUM_MAX = 1 << 16


def _fsum(x: np.ndarray) -> float:
    """Accurate sum: exact rounding for short inputs, pairwise otherwise.

    Pairwise summation of ``n`` terms errs by at most
    :func:`sum_rounding` ``(n, sum |x|)``; callers that certify bounds add it.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size <= FSUM_MAX:
        return math.fsum(x)
    return float(np.sum(x))


def sum_rounding(n: int, mag: float) -> float:
    """Rounding budget of :func:`_fsum` over ``n`` terms of total magnitude ``mag``."""
    if n <= FSUM_MAX:
        return EPS * mag
    return (math.log2(n) + 32) * EPS * mag


def _as_coeffs(coeffs: Any) -> np.ndarray:
    arr = np.array(coeffs)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("coefficients must be a non-empty 1-d array")
    if np.iscomplexobj(arr):
        arr = arr.astype(complex)
        if not np.any(arr.imag):
            arr = arr.real.copy()
    else:
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TruncSeq:
    """Finite part of a sequence on the nonnegative integers.

    Attributes
    ----------
    coeffs : ndarray
        Coefficients ``x[0], ..., x[N-1]`` (real or complex, read-only).
    tail_bound : float
        Upper bound on the l1 norm of everything not represented exactly,
        i.e. of ``x - coeffs`` over all indices.
    meta : dict
        Provenance, e.g. ``{"family": "alpha_frac", "params": {...}}``.
    """

    coeffs: np.ndarray
    tail_bound: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))
        tb = float(self.tail_bound)
        if not math.isfinite(tb) or tb < 0:
            raise ValueError(f"tail_bound must be finite and nonnegative, got {tb}")
        object.__setattr__(self, "tail_bound", tb)
        object.__setattr__(self, "meta", dict(self.meta or {}))

    def __len__(self) -> int:
        return self.coeffs.size

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs)

    def l1(self) -> float:
        return _fsum(np.abs(self.coeffs))

    def total(self) -> complex | float:
        c = self.coeffs
        if self.is_real:
            return _fsum(c)
        return complex(_fsum(c.real), _fsum(c.imag))


@dataclass(frozen=True, eq=False)
class ProbSeq(TruncSeq):
    """Probability on the nonnegative integers known on the window ``[0, N)``.

    ``tail_bound`` bounds ``||F - coeffs||_1`` over all indices (omitted
    mass plus window error); ``coeff_err`` bounds the same quantity
    restricted to the window.  Coefficients must be nonnegative up to a
    rounding floor of ``-1e-14``.
    """

    coeff_err: float = 0.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.is_real:
            raise ValueError("probability coefficients must be real")
        ce = float(self.coeff_err)
        if not math.isfinite(ce) or ce < 0:
            raise ValueError("coeff_err must be finite and nonnegative")
        object.__setattr__(self, "coeff_err", ce)
        c = self.coeffs
        if c.min() < NEG_FLOOR:
            raise ValueError(f"probability has a negative coefficient {c.min():.3g}")
        mass = _fsum(c)
        if mass > 1.0 + ce + MASS_TOL:
            raise ValueError(f"coefficients sum to {mass!r} > 1")
        if 1.0 - mass > self.tail_bound + ce + MASS_TOL:
            raise ValueError(
                f"missing mass {1.0 - mass:.3g} exceeds tail_bound {self.tail_bound:.3g}"
            )

    @classmethod
    def from_window(
        cls,
        coeffs: Any,
        coeff_err: float = 0.0,
        meta: dict | None = None,
        omitted: float | None = None,
    ) -> "ProbSeq":
        """Build from window coefficients and a window error bound.

        If the omitted mass is known it may be passed as ``omitted``;
        otherwise it is bounded by ``1 - sum(coeffs) + coeff_err``.
        """
        c = np.clip(np.asarray(coeffs, dtype=float), 0.0, None)
        if omitted is None:
            omitted = max(0.0, 1.0 - _fsum(c)) + coeff_err
        return cls(c, tail_bound=omitted + coeff_err, meta=meta or {}, coeff_err=coeff_err)

    @property
    def omitted_bound(self) -> float:
        """Upper bound on the true mass outside the window."""
        return max(0.0, self.tail_bound - self.coeff_err)


def delta(m: int = 0, length: int | None = None) -> ProbSeq:
    """Point mass at ``m``."""
    if m < 0:
        raise ValueError("point mass index must be nonnegative")
    c = np.zeros(max(m + 1, length or 0))
    c[m] = 1.0
    return ProbSeq(c, meta={"family": "delta", "params": {"m": m}})


def l1_norm(x: TruncSeq | np.ndarray | Sequence[float]) -> float:
    """l1 norm of the represented coefficients (correctly rounded sum)."""
    if isinstance(x, TruncSeq):
        return x.l1()
    return _fsum(np.abs(np.asarray(x)))


# --------------------------------------------------------------------------
# raw convolution kernels with rounding budgets


def _pow2_at_least(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def fft_rounding(out_len: int, fft_len: int, na: float, nb: float) -> float:
    """l1 rounding budget of an FFT convolution restricted to ``out_len`` outputs.

    Uses the normwise forward error of radix-2 transforms,
    ``|| fl(c) - c ||_2 <= (3 g + eps) ||a||_1 ||b||_1`` with
    ``g = 5 log2(fft_len) eps``, and ``||.||_1 <= sqrt(out_len) ||.||_2``.
    """
    g = 5.0 * max(1.0, math.log2(fft_len)) * EPS
    return math.sqrt(out_len) * (3.0 * g + EPS) * na * nb


def direct_rounding(la: int, lb: int, na: float, nb: float) -> float:
    """l1 rounding budget of a direct convolution."""
    return 1.01 * min(la, lb) * EPS * na * nb


class Spectrum:
    """Cached real transform of one convolution factor for a fixed output window.

    Reusing the transform of a fixed factor saves one FFT per product in
    long chains such as ``F^(n) -> F^(n) * F``.
    """

    def __init__(self, x: np.ndarray, out_len: int, fft_len: int | None = None):
        x = np.asarray(x)[:out_len]
        if np.iscomplexobj(x):
            raise TypeError("Spectrum supports real sequences only")
        self.out_len = out_len
        self.fft_len = fft_len or _pow2_at_least(2 * out_len - 1)
        self.norm = _fsum(np.abs(x))
        self.length = x.size
        self.values = sfft.rfft(x, n=self.fft_len, workers=_workers())

    def multiply(self, other: "Spectrum | np.ndarray") -> tuple[np.ndarray, float]:
        """Convolve with ``other`` on the window; return (coefficients, rounding)."""
        if not isinstance(other, Spectrum):
            other = Spectrum(other, self.out_len, self.fft_len)
        if other.fft_len != self.fft_len or other.out_len != self.out_len:
            raise ValueError("spectra built for different windows")
        c = sfft.irfft(self.values * other.values, n=self.fft_len, workers=_workers())
        c = np.array(c[: min(self.out_len, self.length + other.length - 1)])
        err = fft_rounding(c.size, self.fft_len, self.norm, other.norm)
        return _clamp(c, self.norm * other.norm, err)


def _clamp(c: np.ndarray, scale: float, err: float) -> tuple[np.ndarray, float]:
    thresh = CLAMP_REL * scale
    small = np.abs(c) < thresh
    if np.any(small):
        err += _fsum(np.abs(c[small]))
        c[small] = 0
    return c, err


def conv_arrays(
    a: np.ndarray, b: np.ndarray, out_len: int | None = None, method: str = "auto"
) -> tuple[np.ndarray, float]:
    """Window of the linear convolution ``a * b`` and an l1 rounding budget.

    Parameters
    ----------
    a, b : ndarray
        Real or complex coefficient vectors.
    out_len : int, optional
        Number of leading output coefficients wanted (default: full length).
    method : {"auto", "direct", "fft"}
        ``direct`` sums products exactly as written; ``fft`` uses a
        zero-padded power-of-two transform followed by clamping of entries
        below ``1e-15 ||a||_1 ||b||_1`` to zero (the clamped mass is added to
        the budget).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    full = a.size + b.size - 1
    out_len = full if out_len is None else min(out_len, full)
    if out_len < 1:
        raise ValueError("output length must be positive")
    a = a[:out_len]
    b = b[:out_len]
    if method == "auto":
        method = "direct" if min(a.size, b.size) <= DIRECT_MAX else "fft"
    na = _fsum(np.abs(a))
    nb = _fsum(np.abs(b))
    if (a.size == 1 and a[0] == 1) or (b.size == 1 and b[0] == 1):
        # product with the unit point mass is exact
        return np.array(b if a.size == 1 else a)[:out_len].copy(), 0.0
    if method == "direct":
        c = np.convolve(a, b)[:out_len]
        return c, direct_rounding(a.size, b.size, na, nb)
    if method != "fft":
        raise ValueError(f"unknown convolution method {method!r}")
    fft_len = _pow2_at_least(a.size + b.size - 1)
    if np.iscomplexobj(a) or np.iscomplexobj(b):
        c = sfft.ifft(
            sfft.fft(a, n=fft_len, workers=_workers()) * sfft.fft(b, n=fft_len, workers=_workers()),
            workers=_workers(),
        )[:out_len]
    else:
        c = sfft.irfft(
            sfft.rfft(a, n=fft_len, workers=_workers()) * sfft.rfft(b, n=fft_len, workers=_workers()),
            n=fft_len,
            workers=_workers(),
        )[:out_len]
    c = np.array(c)
    return _clamp(c, na * nb, fft_rounding(out_len, fft_len, na, nb))


def _tail_products(a: np.ndarray, b: np.ndarray, out_len: int) -> float:
    """Bound on the l1 mass of the full convolution at indices >= out_len."""
    aa = np.abs(a)
    ab = np.abs(b)
    # suffix[j] = sum_{m >= j} |b_m|
    suffix = np.concatenate([np.cumsum(ab[::-1])[::-1], [0.0]])
    idx = np.clip(out_len - np.arange(aa.size), 0, ab.size)
    return float(np.dot(aa, suffix[idx]))


# --------------------------------------------------------------------------
# public convolution algebra


def _window_error(x: ProbSeq, out_len: int) -> float:
    return x.coeff_err if out_len <= len(x) else x.tail_bound


def convolve(
    a: TruncSeq, b: TruncSeq, method: str = "auto", cap: int | None = None
) -> TruncSeq:
    """Convolution of two truncated sequences.

    The output has length ``min(len(a) + len(b) - 1, cap)``.  For general
    sequences the tail bound is
    ``||a|| t_b + t_a ||b|| + t_a t_b + cut + rounding`` where ``cut`` bounds
    the mass of the exact product beyond the cap.  For two probabilities
    the window error is ``d_a + ||a|| d_b + rounding`` where ``d_x`` is the
    window error of ``x`` if the output window fits inside ``x``'s window
    and its full tail bound otherwise.

    Examples
    --------
    >>> from ritt_lab.seq import ProbSeq, convolve
    >>> c = convolve(ProbSeq([0.5, 0.5]), ProbSeq([0.5, 0.5]))
    >>> c.coeffs.tolist()
    [0.25, 0.5, 0.25]
    """
    if not isinstance(a, TruncSeq) or not isinstance(b, TruncSeq):
        raise TypeError("convolve expects TruncSeq arguments")
    full = len(a) + len(b) - 1
    out_len = full if cap is None else min(full, int(cap))
    c, rnd = conv_arrays(a.coeffs, b.coeffs, out_len, method)
    if isinstance(a, ProbSeq) and isinstance(b, ProbSeq):
        err = _window_error(a, out_len) + a.l1() * _window_error(b, out_len) + rnd
        return ProbSeq.from_window(c.real, err)
    na, nb = a.l1(), b.l1()
    cut = _tail_products(a.coeffs, b.coeffs, out_len) if out_len < full else 0.0
    tail = na * b.tail_bound + a.tail_bound * nb + a.tail_bound * b.tail_bound + cut + rnd
    return TruncSeq(c, tail_bound=tail)


def conv_power(f: TruncSeq, n: int, method: str = "auto", cap: int | None = None) -> TruncSeq:
    """n-fold convolution power by square-then-multiply binary exponentiation.

    ``cap`` defaults to ``max(DEFAULT_CAP, len(f))``.  Pass ``cap=len(f)`` to
    keep every intermediate on the window of ``f``.
    """
    if n < 0:
        raise ValueError("convolution power must be nonnegative")
    cap = max(DEFAULT_CAP, len(f)) if cap is None else int(cap)
    if isinstance(f, ProbSeq):
        result: TruncSeq = delta(0)
    else:
        result = TruncSeq([1.0])
    for bit in bin(n)[2:] if n else "":
        result = convolve(result, result, method, cap)
        if bit == "1":
            result = convolve(result, f, method, cap)
    return result


def poisson_cutoff(t: float, eps: float) -> tuple[int, float]:
    """Smallest M with Poisson(t) mass above M at most eps; returns (M, that mass)."""
    m = int(math.ceil(t + 12.0 * math.sqrt(t) + 25.0))
    rem = float(stats.poisson.sf(m, t))
    while m > 0:
        r = float(stats.poisson.sf(m - 1, t))
        if r > eps:
            break
        m, rem = m - 1, r
    return m, rem


def _uniformize(f: ProbSeq, t: float, method: str, cap: int, eps: float) -> ProbSeq:
    m, rem = poisson_cutoff(t, eps)
    p = stats.poisson.pmf(np.arange(m + 1), t)
    # Horner: H_j = p_j delta_0 + F * H_{j+1}; true mass of H_{j+1} is known
    h = np.array([p[m]])
    err = 0.0
    mass_after = float(p[m])
    nf = f.l1()
    spec = None
    for j in range(m - 1, -1, -1):
        out_len = min(h.size + len(f) - 1, cap)
        if method != "direct" and out_len == cap and cap <= len(f) and cap > DIRECT_MAX:
            # window mode: reuse the transform of F
            if spec is None:
                spec = Spectrum(f.coeffs, cap)
            c, rnd = spec.multiply(h)
        else:
            c, rnd = conv_arrays(h, f.coeffs, out_len, method)
        d_f = f.coeff_err if out_len <= len(f) else f.tail_bound
        # window error: (F - F^)*H_true + F^*(H_true - H^) + rounding
        err = d_f * mass_after + nf * err + rnd
        c = np.clip(c.real, 0.0, None)
        c[0] += p[j]
        h = c
        mass_after += float(p[j])
    err += rem
    return ProbSeq.from_window(h, err)


def conv_exp(
    f: ProbSeq,
    t: float,
    method: str = "auto",
    cap: int | None = None,
    eps: float = 1e-13,
    route: str = "auto",
) -> ProbSeq:
    """The probability ``exp(-t (delta_0 - F))`` by uniformization.

    ``exp(-t(delta_0 - F)) = sum_n e^{-t} t^n / n! F^(n)``.  The Poisson
    series is cut at the first M whose remaining Poisson mass is at most
    ``eps``; that remainder is added to the window error.  With
    ``route="squaring"`` (the default for ``t > 1``) the series is only
    summed for ``t / 2^j <= 1`` and the result squared ``j`` times using the
    semigroup law.
    """
    if not isinstance(f, ProbSeq):
        raise TypeError("conv_exp expects a ProbSeq")
    if t < 0 or not math.isfinite(t):
        raise ValueError("time must be finite and nonnegative")
    cap = max(DEFAULT_CAP, len(f)) if cap is None else int(cap)
    if t == 0 or (len(f) == 1 and f.coeffs[0] == 1.0):
        # exp(0) and the semigroup generated by delta_0 - delta_0 are exact
        return delta(0)
    if route == "auto":
        route = "squaring" if t > 1 else "uniformize"
    if route == "uniformize":
        return _uniformize(f, t, method, cap, eps)
    if route != "squaring":
        raise ValueError(f"unknown route {route!r}")
    j = max(0, math.ceil(math.log2(t)))
    e = _uniformize(f, t / 2**j, method, cap, eps / 2 ** (j + 1))
    for _ in range(j):
        e = convolve(e, e, method, cap)
    return e


@dataclass(frozen=True)
class Interval:
    """Certified enclosure ``lower <= value <= upper`` with a point estimate."""

    lower: float
    upper: float
    estimate: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


def diff_bounds(
    fn: ProbSeq, fn1: ProbSeq, outside: float | None = None
) -> tuple[Interval, float]:
    """Enclosure of ``||F^(n) - F^(n+1)||_1`` from window approximations.

    If the windows differ the shorter one is zero-padded and its full tail
    bound is used as its window error.  The lower bound uses that
    the exact difference sums to zero, so the mass outside the window is at
    least ``|sum of the window difference|``.  ``outside`` optionally
    supplies a bound on the l1 norm of the exact difference outside the
    window that is sharper than the omitted masses.

    Returns the interval and the window l1 norm of the computed difference.
    """
    n_win = max(len(fn), len(fn1))
    a = np.pad(fn.coeffs, (0, n_win - len(fn)))
    b = np.pad(fn1.coeffs, (0, n_win - len(fn1)))
    d = a - b
    e = _window_error(fn, n_win) + _window_error(fn1, n_win)
    dn = _fsum(np.abs(d))
    ds = abs(_fsum(d))
    e += 2 * sum_rounding(d.size, dn)
    omitted = fn.omitted_bound + fn1.omitted_bound
    out = omitted if outside is None else min(omitted, outside)
    est = dn + ds
    return Interval(max(0.0, est - 2.0 * e), dn + e + out, est), dn


def diff_norm(f: ProbSeq, n: int, method: str = "auto", cap: int | None = None) -> Interval:
    """Certified interval for ``||F^(n) - F^(n+1)||_1``."""
    if not isinstance(f, ProbSeq):
        raise TypeError("diff_norm expects a ProbSeq")
    cap = max(DEFAULT_CAP, len(f)) if cap is None else int(cap)
    fn = conv_power(f, n, method, cap)
    fn1 = convolve(fn, f, method, cap)
    return diff_bounds(fn, fn1)[0]


# --------------------------------------------------------------------------
# moments and arithmetic structure


@dataclass(frozen=True)
class MomentResult:
    """Outcome of :func:`first_moment`.

    ``kind`` is ``"finite"`` (``value`` holds the partial mean, exact when
    the support is finite) or ``"divergent_evidence"``; ``slope`` is the
    log-log decay slope fitted on ``fit_range`` (None for finite support).
    """

    kind: str
    value: float | None
    slope: float | None
    fit_range: tuple[int, int] | None


def first_moment(
    f: ProbSeq, fit_window: tuple[int, int] | None = None, margin: float = 0.15
) -> MomentResult:
    """Decide between a finite first moment and evidence of divergence.

    With finite support (``tail_bound == 0``) the mean is summed exactly.
    Otherwise the slope of ``log F(k)`` against ``log k`` is fitted on
    ``fit_window`` (default: the last six octaves up to the last positive
    coefficient); a slope of at least ``-2 + margin`` is reported as
    divergence evidence.
    """
    c = f.coeffs
    k = np.arange(c.size, dtype=float)
    mean = _fsum(k * c)
    if f.tail_bound == 0.0:
        return MomentResult("finite", mean, None, None)
    if fit_window:
        lo, hi = fit_window
    else:
        # place the default window before any trailing zero padding
        nz = np.flatnonzero(c > 0)
        last = int(nz[-1]) + 1 if nz.size else c.size
        lo, hi = max(1, last // 64), last
    if hi - lo < 8:
        raise ValueError("fit window must hold at least 8 points")
    idx = np.unique(np.geomspace(lo, hi - 1, num=min(256, hi - lo)).astype(int))
    idx = idx[c[idx] > 0]
    if idx.size < 8:
        raise ValueError("fewer than 8 positive coefficients in the fit window")
    slope = float(np.polyfit(np.log(idx), np.log(c[idx]), 1)[0])
    if slope >= -2.0 + margin:
        return MomentResult("divergent_evidence", None, slope, (int(lo), int(hi)))
    return MomentResult("finite", mean, slope, (int(lo), int(hi)))


@dataclass(frozen=True)
class Periodicity:
    """Arithmetic structure of a support.

    ``kind`` is ``"aperiodic"``, ``"adapted_not_aperiodic"`` (support in
    ``m Z + r`` with ``r != 0`` mod ``m``, generating all of Z),
    ``"not_adapted"`` (support in ``m Z``) or ``"degenerate"`` (the point
    mass at 0).  ``modulus == 0`` with kind ``"adapted_not_aperiodic"``
    marks the point mass at 1, which lies in ``m Z + 1`` for every ``m``.
    """

    kind: str
    modulus: int
    offset: int


def _support(f: TruncSeq) -> np.ndarray:
    return np.flatnonzero(np.abs(f.coeffs) > 0)


def classify_periodicity(f: ProbSeq) -> Periodicity:
    """Classify the support of ``f`` (exact for finite supports)."""
    s = _support(f)
    if s.size == 0:
        raise ValueError("empty support")
    g = int(np.gcd.reduce(s))
    d = int(np.gcd.reduce(s - s[0]))
    if g == 0:
        return Periodicity("degenerate", 0, 0)
    if g > 1:
        return Periodicity("not_adapted", g, 0)
    if d == 0:
        # support {1}: contained in m Z + 1 for every m
        return Periodicity("adapted_not_aperiodic", 0, 1)
    if d == 1:
        return Periodicity("aperiodic", 1, 0)
    return Periodicity("adapted_not_aperiodic", d, int(s[0] % d))


@dataclass(frozen=True)
class AperiodicityCheck:
    """Points where ``|F^(xi)|`` is indistinguishable from 1 off ``xi = 0``."""

    consistent: bool
    violations: np.ndarray
    moduli: np.ndarray
    grid: np.ndarray


def evaluate_unit_circle(c: np.ndarray, xi: np.ndarray, chunk: int = 1 << 18) -> np.ndarray:
    """``sum_k c_k exp(-i k xi)`` for each ``xi`` (pairwise summation)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.zeros(xi.size, dtype=complex)
    for start in range(0, c.size, chunk):
        cc = c[start : start + chunk]
        kk = np.arange(start, start + cc.size, dtype=float)
        for i, x in enumerate(xi):
            out[i] += np.sum(cc * np.exp(-1j * kk * x))
    return out


def rational_grid(q_max: int) -> np.ndarray:
    """Angles ``2 pi j / q`` in ``(-pi, pi]`` for ``2 <= q <= q_max`` (no zero)."""
    pts = set()
    for q in range(2, q_max + 1):
        for j in range(1, q):
            if math.gcd(j, q) == 1:
                x = 2 * math.pi * j / q
                pts.add(x - 2 * math.pi if x > math.pi + 1e-15 else x)
    return np.array(sorted(pts))


def fourier_aperiodicity_check(
    f: ProbSeq, grid: np.ndarray | None = None, tol: float = 1e-9, q_max: int = 64
) -> AperiodicityCheck:
    """Flag grid points where ``|F^(xi)| >= 1 - tail - tol``.

    For an aperiodic probability ``|F^(xi)| < 1`` off ``xi = 0``; if the
    support lies in ``m Z + r`` then ``F^(2 pi / m) = exp(-2 pi i r / m)``.
    The default grid consists of all reduced fractions ``2 pi j / q`` with
    ``q`` up to the support span (at most ``q_max``), which contains every
    such witness when the span does not exceed ``q_max``.
    """
    if grid is None:
        s = _support(f)
        span = int(s[-1] - s[0]) if s.size else 2
        grid = rational_grid(min(q_max, max(2, span)))
    grid = np.asarray(grid, dtype=float)
    vals = np.abs(evaluate_unit_circle(f.coeffs, grid))
    bad = vals >= 1.0 - f.tail_bound - tol
    viol = grid[bad]
    moduli = np.array(
        [round(2 * math.pi / abs(x)) if abs(x) > 0 else 0 for x in viol], dtype=int
    )
    return AperiodicityCheck(not bool(bad.any()), viol, moduli, grid)


def rescale(f: ProbSeq, m: int) -> ProbSeq:
    """``G(k) = F(k m)`` for a probability supported in ``m Z``."""
    if m < 1:
        raise ValueError("modulus must be positive")
    c = f.coeffs
    off = np.ones(c.size, dtype=bool)
    off[::m] = False
    if np.any(c[off] > 0):
        raise ValueError(f"support is not contained in {m}Z")
    meta = {"family": "rescaled", "params": {"m": m}, "parent": f.meta}
    return ProbSeq(c[::m].copy(), f.tail_bound, meta, f.coeff_err)


def lazy_part(f: ProbSeq, beta: float) -> ProbSeq:
    """``G = (F - (1 - beta) delta_0) / beta`` for ``1 - F(0) <= beta < 1``.

    Writes ``F = (1 - beta) delta_0 + beta G`` with ``G`` a probability; this
    is only possible when ``F(0) > 0``.
    """
    c = f.coeffs
    if not 1.0 - c[0] <= beta < 1.0 or beta <= 0:
        raise ValueError(f"beta must lie in [1 - F(0), 1) = [{1 - c[0]:.6g}, 1)")
    g = c.copy()
    g[0] -= 1.0 - beta
    g /= beta
    g[0] = max(g[0], 0.0)
    return ProbSeq(g, f.tail_bound / beta, {"family": "lazy_part", "params": {"beta": beta}}, f.coeff_err / beta)


# --------------------------------------------------------------------------
# serialization


def _encode_coeffs(c: np.ndarray) -> list:
    if np.iscomplexobj(c):
        return [[float(z.real), float(z.imag)] for z in c]
    return [float(x) for x in c]


def seq_to_json(x: TruncSeq) -> str:
    """Serialize to ``{"coeffs": [...], "tail_bound": t, "meta": {...}}``.

    Complex coefficients are written as ``[re, im]`` pairs.  Probabilities
    additionally carry ``"coeff_err"``.
    """
    obj: dict[str, Any] = {
        "coeffs": _encode_coeffs(x.coeffs),
        "tail_bound": x.tail_bound,
        "meta": x.meta,
    }
    if isinstance(x, ProbSeq):
        obj["coeff_err"] = x.coeff_err
    return json.dumps(obj)


def seq_from_json(text: str, prob: bool | None = None) -> TruncSeq:
    """Inverse of :func:`seq_to_json`.

    ``prob=None`` returns a :class:`ProbSeq` when ``coeff_err`` is present.
    """
    obj = json.loads(text)
    unknown = set(obj) - {"coeffs", "tail_bound", "meta", "coeff_err"}
    if unknown:
        raise ValueError(f"unknown keys in sequence JSON: {sorted(unknown)}")
    raw = obj["coeffs"]
    if any(isinstance(v, list) for v in raw):
        coeffs = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in raw])
    else:
        coeffs = np.array(raw, dtype=float)
    if prob is None:
        prob = "coeff_err" in obj
    if prob:
        return ProbSeq(coeffs, obj.get("tail_bound", 0.0), obj.get("meta", {}), obj.get("coeff_err", 0.0))
    return TruncSeq(coeffs, obj.get("tail_bound", 0.0), obj.get("meta", {}))


def seq_to_csv(x: TruncSeq) -> str:
    """CSV with columns ``k,value`` (``k,re,im`` for complex), 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if x.is_real:
        w.writerow(["k", "value"])
        for k, v in enumerate(x.coeffs):
            w.writerow([k, f"{v:.17g}"])
    else:
        w.writerow(["k", "re", "im"])
        for k, v in enumerate(x.coeffs):
            w.writerow([k, f"{v.real:.17g}", f"{v.imag:.17g}"])
    return buf.getvalue()


def seq_from_csv(text: str, tail_bound: float = 0.0) -> TruncSeq:
    """Read the CSV written by :func:`seq_to_csv`."""
    rows = list(csv.reader(io.StringIO(text)))
    head, body = rows[0], rows[1:]
    ks = [int(r[0]) for r in body]
    if ks != list(range(len(ks))):
        raise ValueError("CSV indices must run 0, 1, 2, ...")
    if head == ["k", "value"]:
        coeffs = np.array([float(r[1]) for r in body])
    elif head == ["k", "re", "im"]:
        coeffs = np.array([complex(float(r[1]), float(r[2])) for r in body])
    else:
        raise ValueError(f"unexpected CSV header {head}")
    return TruncSeq(coeffs, tail_bound)
