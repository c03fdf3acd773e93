"""Finite-dimensional operator calculus.

Dense matrices stand in for bounded operators.  The module forms
``Psi(F; T) = sum_k F(k) T^k`` for probabilities ``F``, scans resolvents for
the Ritt and Kreiss conditions, computes fractional powers ``(I - T)^alpha``
by a binomial series, by eigendecomposition and by Kato's resolvent
integral, and builds the concrete test operators (discretized Volterra
resolvent, truncated shift, random normal contractions).

Operator norms are spectral norms (largest singular value).
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, linalg, stats

from .families import make_alpha_frac
from .seq import EPS, ProbSeq, TruncSeq, conv_power
from .transforms import gen_fn

ABORT_NORM = 1e12
EIGEN_MAX_COND = 1e10
DEFAULT_RADII = tuple(1 + 2.0**-j for j in range(0, 11))
DEFAULT_ANGLES = 256


class NotPowerBoundedWarning(UserWarning):
    """Powers of the operator grew past the abort threshold."""


@dataclass(frozen=True, eq=False)
class DenseOp:
    """A ``d x d`` complex matrix acting on ``C^d``.

    Examples
    --------
    >>> DenseOp.identity(2).norm()
    1.0
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, d: int) -> "DenseOp":
        return cls(np.eye(d))

    def norm(self) -> float:
        """Spectral norm."""
        return float(linalg.norm(self.entries, 2))

    def __matmul__(self, other: "DenseOp") -> "DenseOp":
        return DenseOp(self.entries @ other.entries)

    def __add__(self, other: "DenseOp") -> "DenseOp":
        return DenseOp(self.entries + other.entries)

    def __sub__(self, other: "DenseOp") -> "DenseOp":
        return DenseOp(self.entries - other.entries)

    def scale(self, c: complex) -> "DenseOp":
        return DenseOp(c * self.entries)

    def eigvals(self) -> np.ndarray:
        return linalg.eigvals(self.entries)

    def to_json(self) -> str:
        """Nested arrays of ``[re, im]`` pairs."""
        a = self.entries
        return json.dumps([[[float(z.real), float(z.imag)] for z in row] for row in a])

    @classmethod
    def from_json(cls, text: str) -> "DenseOp":
        data = json.loads(text)
        try:
            arr = np.array(data, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValueError("matrix JSON must be nested [re, im] pairs") from exc
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError("matrix JSON must be nested [re, im] pairs")
        return cls(arr[..., 0] + 1j * arr[..., 1])


def _as_op(T) -> DenseOp:
    return T if isinstance(T, DenseOp) else DenseOp(T)


# --------------------------------------------------------------------------
# powers and subordination


@dataclass(frozen=True)
class PowerBound:
    """``max_{n <= N} ||T^n||``; ``aborted`` marks evidence against power-boundedness."""

    value: float
    argmax: int
    horizon: int
    aborted: bool

    def __float__(self) -> float:
        return self.value


def power_bound(T: DenseOp, N: int, check_every: int = 64) -> PowerBound:
    """Largest spectral norm of ``T^n`` for ``1 <= n <= N``.

    Powers are formed by repeated multiplication; every ``check_every``
    steps the running power is compared with one computed by repeated
    squaring, and a relative drift above ``1e-8`` raises.  The scan stops
    early once a norm exceeds ``1e12``.

    Examples
    --------
    >>> power_bound(DenseOp.identity(3), 10).value
    1.0
    """
    T = _as_op(T)
    if N < 1:
        raise ValueError("horizon must be at least 1")
    a = T.entries
    p = a.copy()
    best, arg = -1.0, 0
    for n in range(1, N + 1):
        if n > 1:
            p = p @ a
        v = float(linalg.norm(p, 2))
        if v > best:
            best, arg = v, n
        if v > ABORT_NORM:
            warnings.warn(f"||T^{n}|| = {v:.3g} exceeds {ABORT_NORM:g}", NotPowerBoundedWarning)
            return PowerBound(best, arg, n, True)
        if n % check_every == 0:
            q = np.linalg.matrix_power(a, n)
            scale = max(1.0, v)
            if np.max(np.abs(q - p)) > 1e-8 * scale * max(1.0, float(np.max(np.abs(q)))):
                raise RuntimeError(f"power chain drifted at n = {n}")
    return PowerBound(best, arg, N, False)


def power_constant(T: DenseOp, horizon: int = 256) -> tuple[float, bool]:
    """Power bound ``c(T) = sup_n ||T^n||`` and whether it is certified.

    A contraction has ``c(T) = 1`` exactly; otherwise the finite-horizon
    maximum is evidence only.
    """
    T = _as_op(T)
    nrm = T.norm()
    if nrm <= 1 + 1e-12:
        return 1.0, True
    pb = power_bound(T, horizon)
    return (math.inf if pb.aborted else pb.value), False


@dataclass(frozen=True)
class PsiResult:
    """``Psi(F; T)`` with an operator-norm error bound (None if refused).

    ``rounding`` is the floating-point part of the bound alone.
    """

    op: DenseOp
    error: float | None
    c_T: float
    certified: bool
    rounding: float = 0.0


def _poly_eval(c: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, int]:
    """``sum_k c_k a^k`` by blocked Horner (Paterson-Stockmeyer)."""
    d = a.shape[0]
    n = c.size
    s = max(1, int(math.isqrt(n)))
    pw = np.empty((s + 1, d, d), dtype=complex)
    pw[0] = np.eye(d)
    for j in range(1, s + 1):
        pw[j] = pw[j - 1] @ a
    nblocks = -(-n // s)
    cc = np.zeros(nblocks * s, dtype=c.dtype)
    cc[:n] = c
    blocks = cc.reshape(nblocks, s)
    # each block is a combination of I, a, ..., a^(s-1)
    comb = np.tensordot(blocks, pw[:s], axes=(1, 0))
    acc = comb[-1]
    for b in range(nblocks - 2, -1, -1):
        acc = acc @ pw[s] + comb[b]
    return acc, s + nblocks


def psi_op(F: ProbSeq, T: DenseOp, horizon: int = 256) -> PsiResult:
    """Subordinated operator ``Psi(F; T) = sum_k F(k) T^k``.

    The truncated sum is evaluated by blocked Horner.  Its error is at most
    ``c(T) (coeff_err + min(1, ||T^N||) omitted)`` where ``N`` is the window
    length, since ``||T^k|| <= c(T) ||T^N||`` for ``k >= N``, plus a rounding
    budget.  If the powers of ``T`` show no bound the error is refused
    (None) and a warning is issued.

    Examples
    --------
    >>> from ritt_lab.seq import delta
    >>> r = psi_op(delta(0), DenseOp([[0.3, 1.0], [0.0, 0.2]]))
    >>> r.op.entries.real.tolist()
    [[1.0, 0.0], [0.0, 1.0]]
    """
    T = _as_op(T)
    c = np.asarray(F.coeffs)
    val, nmat = _poly_eval(c, T.entries)
    cT, cert = power_constant(T, horizon)
    if not math.isfinite(cT):
        warnings.warn("no power bound for T: error bound refused", NotPowerBoundedWarning)
        return PsiResult(DenseOp(val), None, cT, False, math.inf)
    tail = F.tail_bound
    if isinstance(F, ProbSeq):
        tn = float(linalg.norm(np.linalg.matrix_power(T.entries, len(F)), 2))
        tail = F.coeff_err + min(1.0, tn * (1 + 1e-8) + 1e-14) * F.omitted_bound
    rnd = 4 * (nmat + T.dim) * EPS * cT * float(np.sum(np.abs(c)))
    return PsiResult(DenseOp(val), cT * tail + rnd, cT, cert, rnd)


@dataclass(frozen=True)
class SubordinationCheck:
    """Residual of ``Psi(F;T)^n`` against ``Psi(F^(n); T)``."""

    n: int
    residual: float
    budget: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.budget


def subordination_identity_check(F: ProbSeq, T: DenseOp, n: int = 4) -> SubordinationCheck:
    """Compare ``Psi(F;T)^n`` with ``Psi(F^(n);T)`` computed independently.

    The convolution power is formed without a cap, so for a finite window
    both sides represent the same finite sum and the residual measures
    rounding only.  The budget adds the rounding parts of the two psi
    bounds (the first amplified by ``n c(T)^(n-1)``), the rounding of the
    convolution power and of the ``n``-fold matrix product.
    """
    T = _as_op(T)
    if n < 1:
        raise ValueError("n must be at least 1")
    left = psi_op(F, T)
    lhs = np.linalg.matrix_power(left.op.entries, n)
    # exact window coefficients, so the tail bound of the power is pure rounding
    fn = conv_power(TruncSeq(F.coeffs), n, cap=n * (len(F) - 1) + 1)
    right = psi_op(fn, T)
    res = float(linalg.norm(lhs - right.op.entries, 2))
    cT = left.c_T
    # same finite sum on both sides: only rounding separates them
    conv_rnd = cT * fn.tail_bound
    prod_rnd = 4 * n * T.dim * EPS * cT**n
    budget = n * cT ** (n - 1) * left.rounding + right.rounding + conv_rnd + prod_rnd
    return SubordinationCheck(n, res, budget)


# --------------------------------------------------------------------------
# resolvent scans


@dataclass
class ResolventScan:
    """Per-point values of a resolvent functional on a contour outside the disc."""

    kind: str
    contour: np.ndarray
    values: np.ndarray
    radii: np.ndarray
    singular: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if np.any(np.abs(self.contour) <= 1):
            raise ValueError("contour points must lie outside the closed unit disc")

    @property
    def constant(self) -> float:
        return float(np.max(self.values))

    def per_radius(self) -> np.ndarray:
        """Maximum value on each circle of the contour."""
        r = np.abs(self.contour)
        return np.array([float(np.max(self.values[np.isclose(r, R)])) for R in self.radii])

    def stable(self, last: int = 3, tol: float = 0.25) -> bool:
        """Whether the last ``last`` per-radius maxima agree within ``tol``."""
        p = self.per_radius()[-last:]
        if not np.all(np.isfinite(p)) or p.min() <= 0:
            return False
        return bool(p.max() / p.min() - 1 <= tol)

    def passes(self) -> bool:
        return math.isfinite(self.constant) and self.stable()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re_lambda", "im_lambda", "value"])
        for lam, v in zip(self.contour, self.values):
            w.writerow([repr(float(lam.real)), repr(float(lam.imag)), repr(float(v))])
        return buf.getvalue()


def contour(radii: Sequence[float] = DEFAULT_RADII, n_angles: int = DEFAULT_ANGLES) -> np.ndarray:
    """Points ``r e^(i theta)`` for each radius on a uniform angle grid."""
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    return np.concatenate([r * np.exp(1j * th) for r in radii])


def resolvent_scan(
    T: DenseOp,
    kind: str = "ritt",
    radii: Sequence[float] = DEFAULT_RADII,
    n_angles: int = DEFAULT_ANGLES,
) -> ResolventScan:
    """Scan ``|lambda - 1| ||R(lambda)||`` (ritt) or ``(|lambda| - 1) ||R(lambda)||`` (kreiss).

    ``||(lambda I - T)^(-1)|| = 1 / sigma_min(lambda I - T)`` is computed from
    the singular values, which gives the spectral norm exactly rather than
    an estimate.  Points where ``lambda I - T`` is numerically singular are
    recorded and get the value ``inf``; the scan continues.

    Examples
    --------
    >>> s = resolvent_scan(DenseOp.identity(1), "ritt", radii=[2.0], n_angles=8)
    >>> bool(np.allclose(s.values, 1.0))
    True
    """
    if kind not in ("ritt", "kreiss"):
        raise ValueError(f"unknown scan kind {kind!r}")
    T = _as_op(T)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 1):
        raise ValueError("radii must exceed 1")
    lam = contour(radii, n_angles)
    a = T.entries
    eye = np.eye(T.dim)
    scale = max(1.0, T.norm())
    vals = np.empty(lam.size)
    singular = []
    for i, z in enumerate(lam):
        smin = float(linalg.svdvals(z * eye - a)[-1])
        w = abs(z - 1) if kind == "ritt" else abs(z) - 1
        if smin <= 1e-14 * scale * abs(z):
            singular.append(complex(z))
            vals[i] = math.inf
        else:
            vals[i] = w / smin
    return ResolventScan(kind, lam, vals, radii, singular)


# --------------------------------------------------------------------------
# fractional powers


@dataclass(frozen=True)
class FracPower:
    """``(I - T)^alpha`` with its route, error budget and diagnostics."""

    op: DenseOp
    alpha: float
    method: str
    budget: float
    info: dict = field(default_factory=dict)


def _series_power(T: DenseOp, alpha: float, tol: float, n_max: int) -> FracPower:
    n = 1024
    while True:
        a = make_alpha_frac(alpha, n)
        r = psi_op(a, T)
        if r.error is None:
            raise ValueError("series route needs a power-bounded operator")
        if r.error <= tol or n >= n_max:
            break
        n *= 4
    op = DenseOp(np.eye(T.dim) - r.op.entries)
    return FracPower(op, alpha, "series", r.error, {"N": n, "c_T": r.c_T, "certified": r.certified})


def _eigen_power(T: DenseOp, alpha: float) -> FracPower:
    v_mat = np.eye(T.dim) - T.entries
    w, vec = linalg.eig(v_mat)
    cond = float(np.linalg.cond(vec))
    if not math.isfinite(cond) or cond > EIGEN_MAX_COND:
        raise ValueError(f"eigenvector matrix too ill-conditioned (cond = {cond:.3g})")
    wa = np.where(np.abs(w) == 0, 0.0, w.astype(complex) ** alpha)
    op = vec @ np.diag(wa) @ linalg.inv(vec)
    budget = 16 * T.dim * cond * EPS * max(1.0, float(np.max(np.abs(wa))))
    return FracPower(DenseOp(op), alpha, "eigen", budget, {"cond": cond})


def kato_resolvent(T: DenseOp, alpha: float, lam: float = 1.0, tol: float = 1e-13) -> tuple[np.ndarray, float]:
    """``(lam I + V^alpha)^(-1)`` with ``V = I - T`` from Kato's integral.

    ``(lam + V^alpha)^(-1) = (sin(pi alpha)/pi) int_0^inf t^alpha (V + t)^(-1)
    / (lam^2 + 2 lam t^alpha cos(pi alpha) + t^(2 alpha)) dt``

    for ``lam > 0`` and ``V`` with spectrum in the closed right half plane.
    The integral is taken in ``u = log t`` with adaptive vector quadrature
    and truncated where the integrand falls below ``1e-16``; the discarded
    tails are bounded in closed form.  Returns the matrix and an error
    estimate.
    """
    T = _as_op(T)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if lam <= 0:
        raise ValueError("lam must be positive")
    d = T.dim
    v = np.eye(d) - T.entries
    ev = linalg.eigvals(v)
    if np.any(ev.real < -1e-10):
        raise ValueError("spectrum of I - T must lie in the closed right half plane")
    sa, ca = math.sin(math.pi * alpha), math.cos(math.pi * alpha)
    eye = np.eye(d)

    def integrand(u):
        t = math.exp(u)
        ta = t**alpha
        den = lam * lam + 2 * lam * ta * ca + ta * ta
        return (t * ta / den) * linalg.solve(v + t * eye, eye)

    # large t: ||(V+t)^-1|| <= 1/(t - ||V||); integrand ~ t^-alpha
    vn = float(linalg.norm(v, 2))
    u_hi = max(math.log(4 * vn + 4), (math.log(1 / alpha) + 37 * math.log(10)) / alpha)
    # small t: ||(V+t)^-1|| <= C / t with C from the eigenvector condition
    u_lo = -(37 * math.log(10) + math.log(1 + 1 / lam**2)) / alpha
    val, err = integrate.quad_vec(integrand, u_lo, u_hi, epsabs=tol, epsrel=1e-12, limit=2000)
    tail_hi = 2 * math.exp(-alpha * u_hi) / alpha
    tail_lo = _small_t_bound(v, alpha, lam, u_lo)
    return sa / math.pi * val, sa / math.pi * (err + tail_hi + tail_lo)


def _small_t_bound(v: np.ndarray, alpha: float, lam: float, u_lo: float) -> float:
    t = math.exp(u_lo)
    d = v.shape[0]
    try:
        r = float(linalg.norm(linalg.solve(v + t * np.eye(d), np.eye(d)), 2))
    except linalg.LinAlgError:
        r = math.inf
    # t * ||(V + t)^-1|| is bounded near 0 for sectorial V; integrate t^alpha
    return 2 * t * r * t**alpha / (alpha * lam * lam)


def _kato_power(T: DenseOp, alpha: float, lam: float = 1.0) -> FracPower:
    res, err = kato_resolvent(T, alpha, lam)
    inv = linalg.inv(res)
    op = inv - lam * np.eye(T.dim)
    nrm = float(linalg.norm(inv, 2))
    budget = nrm * nrm * err / max(1e-300, 1 - min(0.5, nrm * err))
    return FracPower(DenseOp(op), alpha, "kato", budget, {"lam": lam, "resolvent_error": err})


def frac_power(
    T: DenseOp,
    alpha: float,
    method: str = "auto",
    tol: float = 1e-12,
    n_max: int = 1 << 20,
) -> FracPower:
    """``(I - T)^alpha`` by the binomial series, eigendecomposition or Kato's integral.

    ``series`` uses ``(I - T)^alpha = I - Psi(A_alpha; T)``; ``eigen``
    applies the principal power to the eigenvalues of ``I - T`` and rejects
    eigenvector bases with condition number above ``1e10``; ``kato`` forms
    the resolvent ``(I + V^alpha)^(-1)`` by Kato's integral and inverts it.
    ``auto`` prefers eigen, then series, then kato.  For ``1 < alpha < 2``
    the power is ``(I - T) (I - T)^(alpha - 1)``.

    Examples
    --------
    >>> t = DenseOp([[0.5]])
    >>> round(frac_power(t, 0.5, "eigen").op.entries[0, 0].real, 12)
    0.707106781187
    """
    T = _as_op(T)
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    if alpha == 1:
        return FracPower(DenseOp(np.eye(T.dim) - T.entries), 1.0, "exact", 0.0)
    if alpha > 1:
        base = frac_power(T, alpha - 1, method, tol, n_max)
        v = np.eye(T.dim) - T.entries
        op = v @ base.op.entries
        budget = float(linalg.norm(v, 2)) * base.budget
        return FracPower(DenseOp(op), alpha, base.method, budget, dict(base.info, reduced_from=alpha - 1))
    if method == "auto":
        try:
            return _eigen_power(T, alpha)
        except ValueError:
            pass
        cT, cert = power_constant(T)
        if math.isfinite(cT) and cert:
            fp = _series_power(T, alpha, tol, min(n_max, 1 << 14))
            if fp.budget <= 1e-8:
                return fp
        return _kato_power(T, alpha)
    if method == "series":
        return _series_power(T, alpha, tol, n_max)
    if method == "eigen":
        return _eigen_power(T, alpha)
    if method == "kato":
        return _kato_power(T, alpha)
    raise ValueError(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# concrete operators


def volterra_op(d: int = 256) -> DenseOp:
    """``T = (I + V)^(-1)`` for the Volterra operator discretized on ``d`` cells.

    ``V = h * (strictly lower ones) + (h/2) I`` with ``h = 1/d`` (rectangle
    rule with half weight on the diagonal), so ``T`` is lower triangular
    with every eigenvalue equal to ``1 / (1 + h/2)``.

    Examples
    --------
    >>> volterra_op(2).entries.real.round(12).tolist()
    [[0.8, 0.0], [-0.32, 0.8]]
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    h = 1.0 / d
    v = h * np.tril(np.ones((d, d)), -1) + (h / 2) * np.eye(d)
    return DenseOp(linalg.solve_triangular(np.eye(d) + v, np.eye(d), lower=True))


def volterra_spectrum_drift(dims: Sequence[int] = (16, 64, 256)) -> list[tuple[int, float]]:
    """``max |eig(T) - 1|`` for growing grids (the continuum spectrum is ``{1}``)."""
    out = []
    for d in dims:
        ev = np.diag(volterra_op(d).entries)  # triangular: eigenvalues on the diagonal
        out.append((d, float(np.max(np.abs(ev - 1)))))
    return out


def shift_op(d: int) -> DenseOp:
    """The nilpotent lower shift ``e_k -> e_(k+1)`` on ``C^d``.

    It truncates the shift on ``l1(Z+)``; unlike the shift it is nilpotent.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return DenseOp(np.eye(d, k=-1))


def random_normal_contraction(d: int, rng: np.random.Generator | int | None = None) -> DenseOp:
    """``Q diag(lambda) Q*`` with Haar-random unitary ``Q`` and eigenvalues uniform in the open disc."""
    rng = np.random.default_rng(rng)
    q = stats.unitary_group.rvs(d, random_state=rng) if d > 1 else np.eye(1)
    r = np.sqrt(rng.uniform(0, 1, d))
    lam = r * np.exp(2j * np.pi * rng.uniform(0, 1, d))
    return DenseOp(q @ np.diag(lam) @ q.conj().T)


# --------------------------------------------------------------------------
# checks


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two finite subsets of C."""
    a, b = np.asarray(a), np.asarray(b)
    dm = np.abs(a[:, None] - b[None, :])
    return float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))


@dataclass(frozen=True)
class SpectralMapCheck:
    distance: float
    budget: float
    cond: float

    @property
    def ok(self) -> bool:
        return self.distance <= self.budget


def spectral_map_check(F: ProbSeq, T: DenseOp) -> SpectralMapCheck:
    """Hausdorff distance between ``eig(Psi(F;T))`` and ``phi_F(eig(T))``.

    Both sides use the same window coefficients, so truncation cancels.  The
    budget is the generating-function error plus the psi rounding and the
    eigensolver error, scaled by the eigenvector condition number.
    """
    T = _as_op(T)
    w, vec = linalg.eig(T.entries)
    cond = float(np.linalg.cond(vec))
    r = psi_op(F, T)
    lhs = r.op.eigvals()
    rhs, err = gen_fn(F, w)
    rhs = np.atleast_1d(rhs)
    ce = float(np.max(np.atleast_1d(err)))
    d = hausdorff(lhs, rhs)
    # eigenvalues of Psi(F^;T) are exactly phi_F^(eig T); rounding separates them
    budget = ce + cond * (r.rounding + 16 * T.dim * EPS * max(1.0, r.op.norm()))
    return SpectralMapCheck(d, budget, cond)


@dataclass
class RittFromKreiss:
    alpha: float
    kreiss: ResolventScan
    ritt: ResolventScan
    power: FracPower

    @property
    def kreiss_constant(self) -> float:
        return self.kreiss.constant

    @property
    def ritt_constant(self) -> float:
        return self.ritt.constant

    def passes(self) -> bool:
        return math.isfinite(self.kreiss_constant) and self.ritt.passes()


def ritt_from_kreiss_check(
    T: DenseOp,
    alpha: float = 0.5,
    radii: Sequence[float] = DEFAULT_RADII,
    n_angles: int = DEFAULT_ANGLES,
    method: str = "auto",
) -> RittFromKreiss:
    """Kreiss scan of ``T`` and Ritt scan of ``S = I - (I - T)^alpha``."""
    T = _as_op(T)
    k = resolvent_scan(T, "kreiss", radii, n_angles)
    fp = frac_power(T, alpha, method)
    s = DenseOp(np.eye(T.dim) - fp.op.entries)
    r = resolvent_scan(s, "ritt", radii, n_angles)
    return RittFromKreiss(alpha, k, r, fp)


@dataclass
class KrittSuite:
    gammas: list[float]
    scans: list[ResolventScan]
    passed: list[bool]

    @property
    def largest_passing(self) -> float | None:
        ok = [g for g, p in zip(self.gammas, self.passed) if p]
        return max(ok) if ok else None


def kritt_equivalence_suite(
    T: DenseOp,
    gammas: Sequence[float] = (1.05, 1.1, 1.25),
    radii: Sequence[float] = DEFAULT_RADII,
    n_angles: int = DEFAULT_ANGLES,
    method: str = "auto",
) -> KrittSuite:
    """Ritt scans of ``I - (I - T)^gamma`` for each ``gamma`` in ``(1, 2)``.

    Passing means a finite constant with per-radius maxima stabilizing.  The
    largest passing ``gamma`` is numerical evidence only.
    """
    T = _as_op(T)
    if any(not 1 < g < 2 for g in gammas):
        raise ValueError("gammas must lie in (1, 2)")
    scans, passed = [], []
    for g in gammas:
        fp = frac_power(T, g, method)
        s = DenseOp(np.eye(T.dim) - fp.op.entries)
        sc = resolvent_scan(s, "ritt", radii, n_angles)
        scans.append(sc)
        passed.append(sc.passes())
    return KrittSuite(list(gammas), scans, passed)
