"""Closed forms: zeta values, polylogarithms and family generating functions.

The generating function of every named family is available in closed
form.  :func:`model_for` rebuilds it from a sequence's ``meta`` record and
returns a :class:`GFModel` holding

* ``gf(w)``: the generating function on the closed unit disc,
* ``dgf(w)``: its derivative (where finite),
* ``cut(u)``: the boundary value ``phi(1 + u + i0)`` on the branch cut
  ``u > 0`` for families whose generating function continues analytically
  to the slit plane with at most algebraic growth.

The cut values feed the Hankel-contour tail bounds in
:mod:`ritt_lab.diagnostics`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from scipy import special

__all__ = [
    "zeta",
    "hurwitz_tail",
    "polylog",
    "polylog_expansion",
    "polylog_cut",
    "polylog_ref",
    "GFModel",
    "model_for",
]

# B_{2j} / (2j)! for j = 1..8
_B2J = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510]
_B2J_FACT = [b / math.factorial(2 * (j + 1)) for j, b in enumerate(_B2J)]


def zeta(s: float, n: int = 100_000) -> float:
    """Riemann zeta for real ``s > 1``: partial sum to ``n`` plus Euler-Maclaurin tail.

    The tail ``sum_{k > n} k^{-s}`` is replaced by
    ``n^{1-s}/(s-1) - n^{-s}/2 + sum_j B_{2j}/(2j)! (s)_{2j-1} n^{-s-2j+1}``
    which is accurate far beyond double precision for ``n = 10^5``.
    """
    if not s > 1:
        raise ValueError("zeta is only provided for s > 1")
    k = np.arange(1, n + 1, dtype=float)
    head = math.fsum((k ** -s)[::-1])
    return head + _em_tail(s, n)


def _em_tail(s: float, n: int) -> float:
    """Euler-Maclaurin value of ``sum_{k > n} k^{-s}``."""
    total = n ** (1 - s) / (s - 1) - 0.5 * n ** (-s)
    rising = s  # (s)_{2j-1}
    for j, c in enumerate(_B2J_FACT):
        total += c * rising * n ** (-s - 2 * j - 1)
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2)
    return total


def hurwitz_tail(s: float, n: int) -> float:
    """``sum_{k >= n} k^{-s}`` for ``s > 1``, ``n >= 1``."""
    if n < 1:
        raise ValueError("n must be positive")
    if n <= 64:
        k = np.arange(n, 65, dtype=float)
        return math.fsum(k ** -s) + _em_tail(s, 64)
    return _em_tail(s, n - 1)


def _zeta_any(x: float) -> float:
    if x > 1:
        return zeta(x, 1000)
    return float(special.zeta(x))


def _expansion_regular(s: float, mu: complex, tol: float) -> complex:
    """``zeta(s) + sum_{n>=1} zeta(s-n) mu^n / n!`` (the analytic part at mu = 0)."""
    total = complex(_zeta_any(s))
    term_scale = 1.0 + 0j
    small = 0
    for n in range(1, 400):
        term_scale *= mu / n
        t = _zeta_any(s - n) * term_scale
        total += t
        if abs(t) <= tol * max(1.0, abs(total)):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    return total


def polylog_expansion(s: float, mu: complex, tol: float = 1e-17) -> complex:
    """``Li_s(e^mu)`` from its expansion about ``mu = 0``.

    ``Li_s(e^mu) = zeta(s) + Gamma(1-s) (-mu)^{s-1} + sum_{n>=1} zeta(s-n) mu^n / n!``
    for non-integer ``s`` and ``|mu| < 2 pi`` (principal branch of the power).
    The series is cut once terms fall below ``tol`` relative to the sum.
    """
    if float(s).is_integer():
        raise ValueError("expansion requires non-integer s")
    mu = complex(mu)
    if abs(mu) >= 2 * math.pi:
        raise ValueError("expansion requires |mu| < 2 pi")
    total = _expansion_regular(s, mu, tol)
    if mu != 0:
        total += special.gamma(1 - s) * (-mu) ** (s - 1)
    return total


def polylog_cut(s: float, u: np.ndarray) -> np.ndarray:
    """Boundary value ``Li_s(1 + u + i0)`` for ``0 < u < e^{2 pi} - 1``, non-integer ``s``.

    With ``x = 1 + u`` above the cut ``-log(w) = -log x - i0`` so that
    ``(-mu)^{s-1} = (log x)^{s-1} e^{-i pi (s-1)}``.  Passing ``u`` rather
    than ``x`` keeps full relative accuracy close to the branch point.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    mu = np.log1p(u)
    if np.any(mu <= 0) or np.any(mu >= 2 * math.pi):
        raise ValueError("cut evaluation needs 0 < u < exp(2 pi) - 1")
    sing = special.gamma(1 - s) * np.exp(-1j * math.pi * (s - 1))
    reg = np.array([_expansion_regular(s, complex(m), 1e-17) for m in mu])
    return reg + sing * mu ** (s - 1)


def _li_direct(s: float, w: complex, tol: float = 1e-17) -> complex:
    total = 0j
    p = 1.0 + 0j
    for k in range(1, 10_000):
        p *= w
        t = p / k**s
        total += t
        if abs(p) < tol:
            break
    return total


def polylog(s: float, w: complex) -> complex:
    """``Li_s(w)`` on the closed unit disc for real ``s`` (closed-form evaluator).

    Uses the power series for ``|w| <= 1/2`` and the expansion about
    ``w = 1`` otherwise; integer orders go through mpmath.  ``Li_1 = -log(1-w)``.
    """
    w = complex(w)
    if s == 1:
        return -np.log(1 - w) if w != 1 else complex(np.inf)
    if w == 0:
        return 0j
    if w == 1 and s > 1:
        return complex(zeta(s))
    if abs(w) <= 0.5:
        return _li_direct(s, w)
    if float(s).is_integer():
        return complex(mpmath.polylog(int(s), w))
    return polylog_expansion(s, complex(np.log(w)))


def _falling_diffs(s: float, m: int, p: int) -> list[float]:
    """``Delta^j f(m)`` for ``f(k) = k^{-s}``, ``j = 0..p`` (extended precision)."""
    out = []
    with mpmath.workdps(60):
        vals = [mpmath.mpf(m + i) ** (-s) for i in range(p + 1)]
        for j in range(p + 1):
            d = mpmath.fsum((-1) ** (j - i) * mpmath.binomial(j, i) * vals[i] for i in range(j + 1))
            out.append(float(d))
    return out


def polylog_ref(s: float, w: complex, n: int = 20_000, order: int = 8) -> tuple[complex, float]:
    """Direct series ``sum_k k^{-s} w^k`` with a certified tail; returns (value, error).

    The head is summed term by term.  The tail ``T = sum_{k>n} k^{-s} w^k``
    is expanded by repeated summation by parts,
    ``T = sum_{j<p} w^{j+m} Delta^j f(m) / (1-w)^{j+1} + R`` with ``m = n + 1``
    and ``|R| <= |w/(1-w)|^p |Delta^{p-1} f(m)|`` (``f`` is completely
    monotone), which is sharp on the unit circle away from ``w = 1``.  Where
    that bound is worse, the crude bound ``|w|^m n^{1-s}/(s-1)`` is used.
    """
    w = complex(w)
    if abs(w) > 1 + 1e-12:
        raise ValueError("|w| must not exceed 1")
    if not s > 1:
        raise ValueError("s must exceed 1")
    if w == 0:
        return 0j, 0.0
    k = np.arange(1, n + 1, dtype=float)
    logw = np.log(w)
    terms = k ** -s * np.exp(k * logw)
    head = complex(math.fsum(terms.real), math.fsum(terms.imag))
    eps = 2.3e-16
    round_err = eps * float(np.sum((k * abs(logw) + 3.0) * np.abs(terms))) + eps * abs(head)
    m = n + 1
    crude = abs(w) ** m * n ** (1 - s) / (s - 1)
    if abs(1 - w) < 1e-12:
        return head + _em_tail(s, n) if w == 1 else head, crude + round_err
    diffs = _falling_diffs(s, m, order)
    q = w / (1 - w)
    tail = 0j
    for j in range(order):
        tail += w**m * diffs[j] * q**j / (1 - w)
    rem = abs(q) ** order * abs(diffs[order - 1])
    if rem < crude:
        return head + tail, rem + round_err
    return head, crude + round_err


# --------------------------------------------------------------------------
# generating-function models


@dataclass(frozen=True)
class GFModel:
    """Closed-form generating function of a family.

    Attributes
    ----------
    gf, dgf : callable
        ``phi`` and ``phi'`` on the closed unit disc (vectorized over arrays).
    cut : callable or None
        ``u -> phi(1 + u + i0)`` for ``u > 0``.  Present only when the
        continuation grows at most algebraically, so that Hankel-contour
        bounds on coefficient tails are valid.
    cut_exponent : float
        ``|1 - phi(1 + u + i0)|`` vanishes at least like ``u^cut_exponent``
        (up to logarithms) as ``u -> 0``.
    semigroup_ok : bool
        Whether ``exp(-t (1 - phi))`` also grows at most algebraically in
        the slit plane, so that the same bounds apply to semigroup terms.
    ext : callable or None
        Analytic continuation ``z -> phi(z)`` off the disc (used when this
        family is the outer factor of a subordination).
    """

    gf: Callable[[np.ndarray], np.ndarray]
    dgf: Callable[[np.ndarray], np.ndarray] | None
    cut: Callable[[np.ndarray], np.ndarray] | None
    cut_exponent: float = 1.0
    semigroup_ok: bool = False
    ext: Callable[[np.ndarray], np.ndarray] | None = None


def _vec(fn: Callable[[complex], complex]) -> Callable[[np.ndarray], np.ndarray]:
    def wrapped(w):
        arr = np.atleast_1d(np.asarray(w, dtype=complex))
        return np.array([fn(complex(z)) for z in arr], dtype=complex)

    return wrapped


def _alpha_frac(alpha: float) -> GFModel:
    def gf(w):
        return 1 - (1 - np.asarray(w, dtype=complex)) ** alpha

    def dgf(w):
        return alpha * (1 - np.asarray(w, dtype=complex)) ** (alpha - 1)

    def cut(u):
        return 1 - np.asarray(u, dtype=float) ** alpha * np.exp(-1j * math.pi * alpha)

    return GFModel(gf, dgf, cut, alpha, alpha <= 0.5, ext=gf)


def _zeta_family(alpha: float) -> GFModel:
    s = 1 + alpha
    z = zeta(s)
    gf = _vec(lambda w: polylog(s, w) / z)

    def d1(w: complex) -> complex:
        if w == 0:
            return complex(1 / z)
        return polylog(alpha, w) / (w * z)

    cut = None
    if not float(s).is_integer():
        cut = lambda u: polylog_cut(s, u) / z  # noqa: E731
    return GFModel(gf, _vec(d1), cut, alpha, False)


def _power_tail_mix(terms: list, p_coeffs: list) -> GFModel:
    p = np.asarray(p_coeffs, dtype=float)
    dp = p[1:] * np.arange(1, p.size)

    def poly(c, w):
        return np.polyval(c[::-1], w) if c.size else 0 * w

    def gf1(w: complex) -> complex:
        return sum(c * polylog(1 + a, w) for c, a in terms) + poly(p, w)

    def dgf1(w: complex) -> complex:
        if w == 0:
            return sum(c for c, _ in terms) + (dp[0] if dp.size else 0.0)
        return sum(c * polylog(a, w) for c, a in terms) / w + poly(dp, w)

    def cut(u):
        u = np.asarray(u, dtype=float)
        out = np.asarray(poly(p, 1 + u), dtype=complex)
        for c, a in terms:
            out = out + c * polylog_cut(1 + a, u)
        return out

    return GFModel(_vec(gf1), _vec(dgf1), cut, min(a for _, a in terms), False)


def _counterexample_log() -> GFModel:
    def gf(w):
        u = 1 - np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1 - u * (1 - np.log(u))
        return np.where(u == 0, 1.0 + 0j, out)

    def dgf(w):
        return -np.log(1 - np.asarray(w, dtype=complex))

    def cut(u):
        u = np.asarray(u, dtype=float)
        # 1 - w = -u - i0, Log(1 - w) = log u - i pi
        return 1 + u * (1 - np.log(u) + 1j * math.pi)

    return GFModel(gf, dgf, cut, 1.0, False)


def _log_mix(eps: float) -> GFModel:
    def one_minus(w):
        u = 1 - np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(u)
            val = (u**eps - 1) / (eps * lg)
        # (Log 0)^{-1} = 0 and the removable point u = 1 (w = 0)
        val = np.where(u == 0, 0.0, val)
        return np.where(u == 1, 1.0, val)

    def gf(w):
        return 1 - one_minus(w)

    def dgf(w):
        u = 1 - np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(u)
            val = (eps * u ** (eps - 1) * lg - (u**eps - 1) / u) / (eps * lg**2)
        return np.where(u == 1, eps / 2, val)

    return GFModel(gf, dgf, None, 0.0, False)


def _poisson(s: float) -> GFModel:
    return GFModel(
        lambda w: np.exp(s * (np.asarray(w, dtype=complex) - 1)),
        lambda w: s * np.exp(s * (np.asarray(w, dtype=complex) - 1)),
        None,
    )


def _polynomial(c: np.ndarray) -> GFModel:
    c = np.asarray(c, dtype=float)
    dc = c[1:] * np.arange(1, c.size)
    return GFModel(
        lambda w: np.polyval(c[::-1], np.asarray(w, dtype=complex)),
        lambda w: np.polyval(dc[::-1], np.asarray(w, dtype=complex)) if dc.size else 0 * np.asarray(w, dtype=complex),
        None,
    )


def _mixture(weights: list[float], parts: list[GFModel]) -> GFModel:
    def gf(w):
        return sum(l * m.gf(w) for l, m in zip(weights, parts))

    dgf = None
    if all(m.dgf for m in parts):
        dgf = lambda w: sum(l * m.dgf(w) for l, m in zip(weights, parts))  # noqa: E731
    cut = None
    if all(m.cut for m in parts):
        cut = lambda u: sum(l * m.cut(u) for l, m in zip(weights, parts))  # noqa: E731
    return GFModel(
        gf,
        dgf,
        cut,
        min(m.cut_exponent for m in parts),
        all(m.semigroup_ok for m in parts),
    )


def _subordinate(outer: GFModel, inner: GFModel) -> GFModel:
    def gf(w):
        return outer.gf(inner.gf(w))

    dgf = None
    if outer.dgf and inner.dgf:
        dgf = lambda w: outer.dgf(inner.gf(w)) * inner.dgf(w)  # noqa: E731
    cut = None
    if outer.ext is not None and inner.cut is not None:
        cut = lambda u: outer.ext(inner.cut(u))  # noqa: E731
    return GFModel(gf, dgf, cut, outer.cut_exponent * inner.cut_exponent, False)


def model_for(meta: dict) -> GFModel | None:
    """Closed-form model for a sequence built by :mod:`ritt_lab.families`.

    Returns None when the provenance does not identify a family with a
    known generating function.
    """
    fam = meta.get("family") if meta else None
    p = meta.get("params", {}) if meta else {}
    if fam == "delta":
        c = np.zeros(p["m"] + 1)
        c[p["m"]] = 1.0
        return _polynomial(c)
    if fam == "bernoulli":
        return _polynomial(np.array([1 - p["beta"], p["beta"]]))
    if fam == "poisson":
        return _poisson(p["s"])
    if fam == "alpha_frac":
        return _alpha_frac(p["alpha"])
    if fam in ("zeta", "zeta_one"):
        return _zeta_family(p.get("alpha", 1.0))
    if fam == "log_mix":
        return _log_mix(p["epsilon"])
    if fam == "log_mix_sub":
        return _subordinate(_alpha_frac(p["beta"]), _log_mix(p["epsilon"]))
    if fam == "power_tail_mix":
        return _power_tail_mix([tuple(t) for t in p["terms"]], p.get("P", []))
    if fam == "counterexample_log":
        return _counterexample_log()
    if fam == "mixture":
        parts = [model_for(m) for m in p["components"]]
        if any(m is None for m in parts):
            return None
        return _mixture(p["weights"], parts)
    if fam == "subordinate":
        outer, inner = model_for(p["outer"]), model_for(p["inner"])
        if outer is None or inner is None:
            return None
        return _subordinate(outer, inner)
    return None
