"""Constructors for the probability families, with certified truncations.

Every constructor returns a :class:`~ritt_lab.seq.ProbSeq` on the window
``[0, N)`` whose ``meta`` records the family and its parameters, so that
:func:`ritt_lab.analytic.model_for` can rebuild the closed-form generating
function later.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import stats

from .analytic import hurwitz_tail, zeta
from .seq import EPS, ProbSeq, Spectrum, TruncSeq, _fsum, _window_error, conv_arrays, delta

DEFAULT_WINDOW = 1 << 16

__all__ = [
    "FamilySpec",
    "build_family",
    "make_delta",
    "make_bernoulli",
    "make_poisson",
    "make_alpha_frac",
    "alpha_frac_tail",
    "make_zeta",
    "make_log_mix",
    "make_log_mix_sub",
    "make_power_tail_mix",
    "make_counterexample_log",
    "mixture",
    "subordinate_prob",
    "QuadratureWarning",
]


class QuadratureWarning(UserWarning):
    """Order doubling changed a quadrature result by more than the tolerance."""


def _check_length(N: int, minimum: int = 2) -> int:
    N = int(N)
    if N < minimum:
        raise ValueError(f"length N must be at least {minimum}")
    return N


def make_delta(m: int, N: int | None = None) -> ProbSeq:
    """Point mass at ``m``."""
    return delta(m, N)


def make_bernoulli(beta: float) -> ProbSeq:
    """``(1 - beta) delta_0 + beta delta_1``."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    return ProbSeq([1 - beta, beta], meta={"family": "bernoulli", "params": {"beta": beta}})


def make_poisson(s: float, N: int = 0) -> ProbSeq:
    """Poisson(s), truncated at ``max(N, s + 12 sqrt(s) + 25)`` coefficients."""
    if not s > 0:
        raise ValueError("s (the Poisson parameter) must be positive")
    length = max(int(N), int(math.ceil(s + 12 * math.sqrt(s) + 25)))
    c = stats.poisson.pmf(np.arange(length), s)
    omitted = float(stats.poisson.sf(length - 1, s))
    err = 4 * EPS * _fsum(c)
    return ProbSeq.from_window(c, err, {"family": "poisson", "params": {"s": s}}, omitted=omitted)


def _alpha_coeffs(alpha: float, N: int) -> np.ndarray:
    a = np.empty(N)
    a[0] = 0.0
    if N > 1:
        a[1] = alpha
    if N > 2:
        k = np.arange(1, N - 1, dtype=float)
        a[2:] = alpha * np.cumprod((k - alpha) / (k + 1))
    return a


def alpha_frac_tail(alpha: float, N: int) -> float:
    """Exact tail ``sum_{k >= N} a_k = prod_{k=1}^{N-1} (1 - alpha / k)``.

    From ``sum_{k <= n} a_k = 1 - prod_{k=1}^{n} (1 - alpha/k)``, which is
    the telescoped form of the recurrence.  Computed in log space.
    """
    if N <= 1:
        return 1.0
    k = np.arange(1, N, dtype=float)
    return math.exp(_fsum(np.log1p(-alpha / k)))


def make_alpha_frac(alpha: float, N: int) -> ProbSeq:
    """The probability ``A_alpha`` with generating function ``1 - (1 - w)^alpha``.

    ``a_1 = alpha`` and ``a_{k+1} = a_k (k - alpha)/(k + 1)``.  The omitted
    mass is the exact product ``prod_{k<N} (1 - alpha/k)``; the window
    error covers the rounding of the recurrence (relative ``4 k eps`` at
    index ``k``).

    Examples
    --------
    >>> f = make_alpha_frac(0.5, 4)
    >>> f.coeffs.tolist()
    [0.0, 0.5, 0.125, 0.0625]
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    N = _check_length(N)
    a = _alpha_coeffs(alpha, N)
    err = 4 * EPS * _fsum(a * np.arange(N))
    tail = alpha_frac_tail(alpha, N) * (1 + 4 * N * EPS)
    return ProbSeq.from_window(
        a, err, {"family": "alpha_frac", "params": {"alpha": alpha}}, omitted=tail
    )


def make_zeta(alpha: float, N: int) -> ProbSeq:
    """``Z_alpha(k) = k^{-1-alpha} / zeta(1 + alpha)`` for ``k >= 1``.

    ``alpha = 1`` gives ``Z_1`` (family name ``zeta_one``).
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    N = _check_length(N)
    s = 1.0 + alpha
    z = zeta(s)
    c = np.zeros(N)
    k = np.arange(1, N, dtype=float)
    c[1:] = k**-s / z
    omitted = hurwitz_tail(s, N) / z
    err = 4 * EPS * _fsum(c) + 1e-14
    name = "zeta_one" if alpha == 1 else "zeta"
    return ProbSeq.from_window(c, err, {"family": name, "params": {"alpha": alpha}}, omitted=omitted)


def _gauss_legendre(eps: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * eps * (x + 1), 0.5 * eps * w


def _log_mix_quadrature(eps: float, N: int, order: int) -> tuple[np.ndarray, float]:
    nodes, weights = _gauss_legendre(eps, order)
    acc = np.zeros(N)
    tail = 0.0
    for a, wt in zip(nodes, weights):
        acc += wt * _alpha_coeffs(a, N)
        tail += wt * alpha_frac_tail(a, N)
    return acc / eps, tail / eps


def make_log_mix(epsilon: float, N: int, quad_order: int = 32) -> ProbSeq:
    """``B = eps^{-1} int_0^eps A_alpha d alpha`` by Gauss-Legendre quadrature.

    Each coefficient is integrated with ``quad_order`` and ``2 quad_order``
    nodes; the higher-order value is kept and the l1 size of the change is
    added to the window error.  A change above ``1e-10`` triggers a
    :class:`QuadratureWarning` and is recorded in ``meta``.
    """
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if quad_order < 8:
        raise ValueError("quad_order must be at least 8")
    N = _check_length(N)
    lo, tail_lo = _log_mix_quadrature(epsilon, N, quad_order)
    hi, tail_hi = _log_mix_quadrature(epsilon, N, 2 * quad_order)
    change = _fsum(np.abs(hi - lo))
    meta: dict[str, Any] = {
        "family": "log_mix",
        "params": {"epsilon": epsilon, "quad_order": quad_order},
        "quadrature_change": change,
    }
    if change > 1e-10:
        meta["quadrature_converged"] = False
        warnings.warn(
            f"log_mix quadrature: order doubling changed coefficients by {change:.3g}",
            QuadratureWarning,
            stacklevel=2,
        )
    err = change + 4 * EPS * _fsum(hi * np.arange(N))
    omitted = tail_hi + abs(tail_hi - tail_lo)
    return ProbSeq.from_window(hi, err, meta, omitted=omitted)


def subordinate_prob(
    outer: ProbSeq,
    inner: ProbSeq,
    N: int | None = None,
    eps_stop: float = 1e-12,
    method: str = "auto",
) -> ProbSeq:
    """``H = sum_k outer(k) inner^(k)`` on the window ``[0, N)``.

    Convolution powers of ``inner`` are accumulated until the outer mass
    not yet used, times the window mass of the current power of ``inner``,
    is at most ``eps_stop`` (window masses of successive powers cannot
    increase), or until the outer window is exhausted.  That leftover
    enters the window error.  ``N`` defaults to the longer input window.
    """
    N = max(len(outer), len(inner)) if N is None else _check_length(N, 1)
    o = outer.coeffs
    outer_rest = 1.0  # true outer mass at indices >= current k (upper bound)
    acc = np.zeros(N)
    err = outer.coeff_err
    power = np.zeros(N)
    power[0] = 1.0
    p_err = 0.0  # window error of the current inner power
    spec = None
    g_err = _window_error(inner, N)
    for k in range(o.size):
        if o[k] > 0:
            acc += o[k] * power
            err += o[k] * p_err
        outer_rest = max(0.0, outer_rest - o[k])
        mass = _fsum(power)
        # the stopping decision uses the computed mass; the error below is rigorous
        if outer_rest * mass <= eps_stop or k == o.size - 1:
            break
        if method == "direct" or min(N, len(inner)) <= 48:
            c, rnd = conv_arrays(power, inner.coeffs, N, "direct" if method == "direct" else "auto")
        else:
            if spec is None:
                spec = Spectrum(inner.coeffs, N)
            c, rnd = spec.multiply(power)
        # (P_true - P^) * G_true + P^ * (G_true - G^)
        p_err = p_err + mass * g_err + rnd
        power = np.zeros(N)
        power[: c.size] = np.clip(c.real, 0.0, None)
    # unused outer terms j > k: true outer mass <= outer_rest + coeff_err,
    # window mass of inner^(j) <= that of inner^(k)
    err += (outer_rest + outer.coeff_err) * min(1.0, _fsum(power) + p_err)
    meta = {"family": "subordinate", "params": {"outer": outer.meta, "inner": inner.meta}, "terms": k + 1}
    return ProbSeq.from_window(acc, err, meta)


def make_log_mix_sub(
    epsilon: float, beta: float, N: int, quad_order: int = 32, eps_stop: float = 1e-12
) -> ProbSeq:
    """``B_beta = sum_k A_beta(k) B^(k)``, generating function ``1 - (1 - phi_B)^beta``."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    inner = make_log_mix(epsilon, N, quad_order)
    # enough outer terms for the stopping rule; the recurrence is cheap
    outer = make_alpha_frac(beta, max(N, 4096))
    h = subordinate_prob(outer, inner, N, eps_stop)
    meta = {
        "family": "log_mix_sub",
        "params": {"epsilon": epsilon, "beta": beta, "quad_order": quad_order},
        "terms": h.meta["terms"],
    }
    return ProbSeq(h.coeffs, h.tail_bound, meta, h.coeff_err)


def make_power_tail_mix(
    terms: list[tuple[float, float]], P: TruncSeq | list | np.ndarray, N: int, tol: float = 1e-10
) -> ProbSeq:
    """``F(k) = sum_j c_j k^{-1-alpha_j} + P(k)`` for ``k >= 1``, ``F(0) = P(0)``.

    ``P`` must be finitely supported within the window; its length may not
    exceed ``N``.  Negative coefficients or a total mass differing from 1 by
    more than ``tol`` are rejected, naming the offending index.
    """
    N = _check_length(N)
    terms = [(float(c), float(a)) for c, a in terms]
    if not terms:
        raise ValueError("terms: at least one power term is required")
    alphas = [a for _, a in terms]
    if any(not 0 < a < 1 for a in alphas) or sorted(set(alphas)) != alphas:
        raise ValueError("terms: exponents must be strictly increasing in (0, 1)")
    if any(c <= 0 for c, _ in terms):
        raise ValueError("terms: power-term weights must be positive")
    p = np.asarray(P.coeffs if isinstance(P, TruncSeq) else P, dtype=float).ravel()
    if p.size > N:
        raise ValueError("perturbation P is longer than the window")
    c = np.zeros(N)
    k = np.arange(1, N, dtype=float)
    for cj, aj in terms:
        c[1:] += cj * k ** (-1 - aj)
    c[: p.size] += p
    neg = np.flatnonzero(c < 0)
    if neg.size:
        raise ValueError(f"negative coefficient {c[neg[0]]:.3g} at index {neg[0]}")
    omitted = sum(cj * hurwitz_tail(1 + aj, N) for cj, aj in terms)
    total = sum(cj * zeta(1 + aj) for cj, aj in terms) + _fsum(p)
    if abs(total - 1) > tol:
        raise ValueError(f"total mass {total!r} differs from 1 (index: whole sequence)")
    err = 4 * EPS * _fsum(c) + 1e-14
    meta = {
        "family": "power_tail_mix",
        "params": {"terms": [list(t) for t in terms], "P": p.tolist()},
    }
    return ProbSeq.from_window(c, err, meta, omitted=omitted)


def make_counterexample_log(N: int) -> ProbSeq:
    """``F(k) = 1/(k (k - 1))`` for ``k >= 2``; omitted mass ``1/(N - 1)`` exactly."""
    N = _check_length(N, 3)
    c = np.zeros(N)
    k = np.arange(2, N, dtype=float)
    c[2:] = 1.0 / (k * (k - 1))
    return ProbSeq.from_window(
        c, 4 * EPS, {"family": "counterexample_log", "params": {}}, omitted=1.0 / (N - 1)
    )


def mixture(weights: list[float], components: list[ProbSeq]) -> ProbSeq:
    """Convex combination ``sum_i lambda_i F_i`` on the longest window."""
    w = np.asarray(weights, dtype=float)
    if w.size != len(components) or w.size == 0:
        raise ValueError("weights: need one weight per component")
    if np.any(w < 0) or abs(_fsum(w) - 1) > 1e-12:
        raise ValueError("weights: mixture weights must be nonnegative and sum to 1")
    L = max(len(f) for f in components)
    c = np.zeros(L)
    err = 0.0
    omitted = 0.0
    for lam, f in zip(w, components):
        c[: len(f)] += lam * f.coeffs
        err += lam * _window_error(f, L)
        omitted += lam * f.omitted_bound
    meta = {
        "family": "mixture",
        "params": {"weights": w.tolist(), "components": [f.meta for f in components]},
    }
    return ProbSeq.from_window(c, err, meta, omitted=omitted)


# --------------------------------------------------------------------------
# declarative specs

_FAMILY_KEYS: dict[str, set[str]] = {
    "delta": {"m"},
    "bernoulli": {"beta"},
    "poisson": {"s"},
    "alpha_frac": {"alpha"},
    "zeta": {"alpha"},
    "zeta_one": set(),
    "log_mix": {"epsilon", "quad_order"},
    "log_mix_sub": {"epsilon", "beta", "quad_order"},
    "power_tail_mix": {"terms", "P"},
    "counterexample_log": set(),
    "mixture": {"weights", "components"},
    "subordinate": {"outer", "inner"},
}
_REQUIRED: dict[str, set[str]] = {
    "delta": {"m"},
    "bernoulli": {"beta"},
    "poisson": {"s"},
    "alpha_frac": {"alpha"},
    "zeta": {"alpha"},
    "log_mix": {"epsilon"},
    "log_mix_sub": {"epsilon", "beta"},
    "power_tail_mix": {"terms"},
    "mixture": {"weights", "components"},
    "subordinate": {"outer", "inner"},
}


@dataclass(frozen=True)
class FamilySpec:
    """Declarative family description, e.g. ``{"family": "alpha_frac", "alpha": 0.5, "N": 65536}``.

    Nested families (``mixture`` components, ``subordinate`` outer/inner)
    are FamilySpec dictionaries themselves.
    """

    family: str
    N: int | None = None
    params: dict = field(default_factory=dict)

    @property
    def window(self) -> int:
        """Window length used to build the family (``DEFAULT_WINDOW`` when unset)."""
        return DEFAULT_WINDOW if self.N is None else self.N

    @classmethod
    def from_dict(cls, d: dict) -> "FamilySpec":
        if not isinstance(d, dict) or "family" not in d:
            raise ValueError("family spec must be an object with a 'family' key")
        fam = d["family"]
        if fam not in _FAMILY_KEYS:
            raise ValueError(f"unknown family {fam!r}")
        params = {k: v for k, v in d.items() if k not in ("family", "N")}
        unknown = set(params) - _FAMILY_KEYS[fam]
        if unknown:
            raise ValueError(f"unknown keys for family {fam!r}: {sorted(unknown)}")
        missing = _REQUIRED.get(fam, set()) - set(params)
        if missing:
            raise ValueError(f"missing keys for family {fam!r}: {sorted(missing)}")
        if fam == "mixture":
            params["components"] = [cls.from_dict(c) for c in params["components"]]
        if fam == "subordinate":
            params["outer"] = cls.from_dict(params["outer"])
            params["inner"] = cls.from_dict(params["inner"])
        return cls(fam, None if d.get("N") is None else int(d["N"]), params)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"family": self.family}
        if self.N is not None:
            out["N"] = self.N
        for k, v in self.params.items():
            if isinstance(v, FamilySpec):
                v = v.to_dict()
            elif isinstance(v, list) and v and isinstance(v[0], FamilySpec):
                v = [x.to_dict() for x in v]
            out[k] = v
        return out


def build_family(spec: FamilySpec | dict) -> ProbSeq:
    """Construct the probability described by ``spec``."""
    if isinstance(spec, dict):
        spec = FamilySpec.from_dict(spec)
    p, N, fam = spec.params, spec.window, spec.family
    if fam == "delta":
        return make_delta(int(p["m"]), spec.N or 0)
    if fam == "bernoulli":
        return make_bernoulli(float(p["beta"]))
    if fam == "poisson":
        return make_poisson(float(p["s"]), spec.N or 0)
    if fam == "alpha_frac":
        return make_alpha_frac(float(p["alpha"]), N)
    if fam == "zeta":
        return make_zeta(float(p["alpha"]), N)
    if fam == "zeta_one":
        return make_zeta(1.0, N)
    if fam == "log_mix":
        return make_log_mix(float(p["epsilon"]), N, int(p.get("quad_order", 32)))
    if fam == "log_mix_sub":
        return make_log_mix_sub(float(p["epsilon"]), float(p["beta"]), N, int(p.get("quad_order", 32)))
    if fam == "power_tail_mix":
        return make_power_tail_mix([tuple(t) for t in p["terms"]], p.get("P", []), N)
    if fam == "counterexample_log":
        return make_counterexample_log(N)
    if fam == "mixture":
        return mixture(p["weights"], [build_family(c) for c in p["components"]])
    if fam == "subordinate":
        return subordinate_prob(build_family(p["outer"]), build_family(p["inner"]), N)
    raise ValueError(f"unknown family {fam!r}")
