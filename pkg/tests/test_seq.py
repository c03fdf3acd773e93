import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from ritt_lab.families import make_alpha_frac, make_bernoulli, make_poisson, make_zeta
from ritt_lab.seq import (
    ProbSeq,
    TruncSeq,
    classify_periodicity,
    conv_arrays,
    conv_exp,
    conv_power,
    convolve,
    delta,
    diff_norm,
    first_moment,
    fourier_aperiodicity_check,
    l1_norm,
    lazy_part,
    rescale,
    seq_from_csv,
    seq_from_json,
    seq_to_csv,
    seq_to_json,
)

floats = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = st.lists(floats, min_size=1, max_size=300).map(np.array)


@st.composite
def probs(draw, max_len=40):
    w = draw(st.lists(st.floats(0, 1), min_size=1, max_size=max_len))
    w = np.array(w)
    if w.sum() == 0:
        w[0] = 1.0
    return ProbSeq(w / w.sum())


def check_prob(p: ProbSeq) -> None:
    assert p.coeffs.min() >= -1e-14
    s = float(np.sum(p.coeffs))
    assert s - p.coeff_err - 1e-12 <= 1.0 <= s + p.tail_bound + 1e-12


# --------------------------------------------------------------------------
# construction and norms


def test_l1_norm_delta():
    d = delta(0)
    assert l1_norm(d) == 1.0 and d.tail_bound == 0.0


def test_l1_norm_with_tail_brackets_mass():
    c = np.full(8, 0.9 / 8)
    p = ProbSeq(c, tail_bound=0.1)
    lo = l1_norm(p)
    assert lo == pytest.approx(0.9, abs=1e-15)
    assert lo + p.tail_bound == pytest.approx(1.0, abs=1e-15)


def test_alpha_frac_tail_is_missing_mass():
    a = make_alpha_frac(0.5, 4096)
    assert 1 - l1_norm(a) <= a.tail_bound + 1e-15


def test_probseq_rejects_bad_input():
    with pytest.raises(ValueError):
        ProbSeq([0.5, -0.1, 0.6])
    with pytest.raises(ValueError):
        ProbSeq([0.7, 0.7])
    with pytest.raises(ValueError):
        ProbSeq([0.5, 0.2])  # missing mass without a tail bound
    with pytest.raises(ValueError):
        TruncSeq([1.0, np.nan])
    with pytest.raises(ValueError):
        ProbSeq([1j])


# --------------------------------------------------------------------------
# convolution


def test_shift_convolution():
    r = convolve(delta(1), delta(1))
    np.testing.assert_array_equal(r.coeffs[:3], [0, 0, 1])


@pytest.mark.parametrize("beta", [0.1, 0.5, 0.9])
def test_bernoulli_square(beta):
    b = make_bernoulli(beta)
    r = convolve(b, b)
    np.testing.assert_allclose(r.coeffs, [(1 - beta) ** 2, 2 * beta * (1 - beta), beta**2], atol=1e-16)


def test_alpha_half_square_identity():
    # (1 - (1-w)^(1/2))^2 = 1 - 2 (1-w)^(1/2) + (1-w) = 2 phi_A(w) - w
    N = 4096
    a = make_alpha_frac(0.5, N)
    sq = convolve(a, a, cap=N)
    expected = 2 * a.coeffs.copy()
    expected[1] -= 1
    np.testing.assert_allclose(sq.coeffs[:N], expected, atol=1e-14)


@pytest.mark.parametrize("method", ["direct", "fft"])
def test_conv_power_shift(method):
    r = conv_power(delta(1), 5, method)
    assert int(np.argmax(r.coeffs)) == 5 and r.coeffs[5] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n", [1, 3, 10, 64])
def test_conv_power_binomial(n):
    beta = 0.3
    r = conv_power(make_bernoulli(beta), n)
    np.testing.assert_allclose(r.coeffs[: n + 1], stats.binom.pmf(np.arange(n + 1), n, beta), atol=1e-14)


def test_conv_power_matches_repeated_convolution():
    f = make_poisson(2.0)
    chain = f
    for _ in range(3):
        chain = convolve(chain, f, method="direct")
    p4 = conv_power(f, 4, method="fft")
    m = min(len(chain), len(p4))
    np.testing.assert_allclose(p4.coeffs[:m], chain.coeffs[:m], atol=1e-14)


@given(vectors, vectors)
def test_direct_fft_oracle(a, b):
    cd, ed = conv_arrays(a, b, method="direct")
    cf, ef = conv_arrays(a, b, method="fft")
    scale = np.abs(a).sum() * np.abs(b).sum()
    assert np.abs(cd - cf).sum() <= 1e-12 * scale + 1e-300


@given(probs(), probs())
def test_convolution_keeps_probability(f, g):
    check_prob(convolve(f, g))


@given(probs(max_len=12), st.integers(1, 6), st.integers(1, 6))
def test_conv_power_semigroup(f, m, n):
    lhs = conv_power(f, m + n)
    rhs = convolve(conv_power(f, m), conv_power(f, n))
    k = min(len(lhs), len(rhs))
    tol = lhs.tail_bound + rhs.tail_bound + 1e-13
    assert np.abs(lhs.coeffs[:k] - rhs.coeffs[:k]).sum() <= tol
    check_prob(lhs)


# --------------------------------------------------------------------------
# convolution exponentials


def test_conv_exp_zero():
    e = conv_exp(make_bernoulli(0.5), 0.0)
    np.testing.assert_array_equal(e.coeffs, [1.0])


@pytest.mark.parametrize("s", [0.5, 1.0, 7.0])
@pytest.mark.parametrize("route", ["uniformize", "squaring"])
def test_conv_exp_shift_is_poisson(s, route):
    e = conv_exp(delta(1), s, route=route)
    k = np.arange(len(e))
    np.testing.assert_allclose(e.coeffs, stats.poisson.pmf(k, s), atol=1e-13)
    check_prob(e)


def test_conv_exp_alpha_generating_function():
    a = make_alpha_frac(0.5, 1 << 12)
    for t in (0.5, 2.0, 8.0):
        e = conv_exp(a, t)
        val = np.sum(e.coeffs * 0.5 ** np.arange(len(e)))
        assert val == pytest.approx(math.exp(-t * 0.5**0.5), abs=1e-10)


@given(probs(max_len=10), st.floats(0.1, 3), st.floats(0.1, 3))
def test_conv_exp_semigroup(f, s, t):
    lhs = conv_exp(f, s + t)
    rhs = convolve(conv_exp(f, s), conv_exp(f, t))
    k = min(len(lhs), len(rhs))
    tol = lhs.tail_bound + rhs.tail_bound + 1e-12
    assert np.abs(lhs.coeffs[:k] - rhs.coeffs[:k]).sum() <= tol
    check_prob(lhs)


# --------------------------------------------------------------------------
# difference norms


def _bernoulli_diff_exact(n: int) -> Fraction:
    half = Fraction(1, 2)
    p = [Fraction(math.comb(n, k)) * half**n for k in range(n + 1)] + [Fraction(0)]
    q = [Fraction(math.comb(n + 1, k)) * half ** (n + 1) for k in range(n + 2)]
    return sum(abs(x - y) for x, y in zip(p, q))


@pytest.mark.parametrize("n", [1, 8, 64])
def test_diff_norm_bernoulli_exact(n):
    iv = diff_norm(make_bernoulli(0.5), n)
    exact = float(_bernoulli_diff_exact(n))
    assert iv.lower <= exact <= iv.upper
    assert abs(iv.estimate - exact) <= 1e-10


@pytest.mark.parametrize("n", [1, 5, 100])
def test_diff_norm_point_masses(n):
    z = diff_norm(delta(0), n)
    assert (z.lower, z.upper) == (0.0, 0.0)
    o = diff_norm(delta(1), n)
    assert o.lower == pytest.approx(2.0) and o.upper == pytest.approx(2.0)


@given(probs(max_len=12), st.integers(1, 40))
def test_diff_norm_bounded_and_monotone(f, n):
    a = diff_norm(f, n)
    b = diff_norm(f, n + 1)
    assert 0 <= a.lower <= a.upper
    assert a.lower <= 2.0 + 1e-12
    assert b.lower <= a.upper + 1e-12


# --------------------------------------------------------------------------
# moments and periodicity


def test_first_moment_finite_support():
    m = first_moment(make_bernoulli(0.3))
    assert m.kind == "finite" and m.value == pytest.approx(0.3)


def test_first_moment_poisson():
    m = first_moment(make_poisson(1.0))
    assert m.kind == "finite" and m.value == pytest.approx(1.0, abs=1e-12)


def test_first_moment_ignores_zero_padding():
    m = first_moment(make_poisson(1.0, 1 << 16))
    assert m.kind == "finite" and m.value == pytest.approx(1.0, abs=1e-12)


def test_first_moment_zeta_divergent():
    m = first_moment(make_zeta(0.5, 1 << 16))
    assert m.kind == "divergent_evidence"
    assert m.slope == pytest.approx(-1.5, abs=0.02)


def test_periodicity_examples():
    assert classify_periodicity(make_bernoulli(0.5)).kind == "aperiodic"
    c = np.zeros(9)
    c[[2, 4, 6, 8]] = 0.25
    p = classify_periodicity(ProbSeq(c))
    assert (p.kind, p.modulus) == ("not_adapted", 2)
    c = np.zeros(5)
    c[[1, 4]] = 0.5
    p = classify_periodicity(ProbSeq(c))
    assert (p.kind, p.modulus, p.offset) == ("adapted_not_aperiodic", 3, 1)
    assert classify_periodicity(delta(0)).kind == "degenerate"


def test_fourier_check_examples():
    assert fourier_aperiodicity_check(make_bernoulli(0.5), np.linspace(-np.pi, np.pi, 1024)[1:]).consistent
    chk = fourier_aperiodicity_check(delta(2))
    assert not chk.consistent and np.any(np.isclose(np.abs(chk.violations), np.pi))
    c = np.zeros(8)
    c[[1, 4, 7]] = [0.2, 0.3, 0.5]
    chk = fourier_aperiodicity_check(ProbSeq(c))
    assert not chk.consistent and 3 in chk.moduli


@given(st.integers(1, 6), st.integers(0, 5), st.lists(st.integers(0, 8), min_size=1, max_size=5))
def test_periodicity_agrees_with_fourier(m, r, idx):
    supp = sorted({r % m + m * i for i in idx})
    c = np.zeros(supp[-1] + 1)
    c[supp] = 1.0 / len(supp)
    f = ProbSeq(c)
    assert (classify_periodicity(f).kind == "aperiodic") == fourier_aperiodicity_check(f).consistent


def test_rescale_and_lazy_part():
    c = np.zeros(7)
    c[[0, 3, 6]] = [0.2, 0.5, 0.3]
    g = rescale(ProbSeq(c), 3)
    np.testing.assert_array_equal(g.coeffs, [0.2, 0.5, 0.3])
    with pytest.raises(ValueError):
        rescale(ProbSeq(c), 2)
    b = make_bernoulli(0.4)
    h = lazy_part(b, 0.5)
    np.testing.assert_allclose(h.coeffs, [0.2, 0.8])


# --------------------------------------------------------------------------
# serialization


@given(probs())
def test_json_round_trip(f):
    g = seq_from_json(seq_to_json(f))
    assert isinstance(g, ProbSeq)
    np.testing.assert_array_equal(g.coeffs, f.coeffs)
    assert g.tail_bound == f.tail_bound and g.coeff_err == f.coeff_err


@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False), min_size=1, max_size=30))
def test_complex_round_trips(z):
    x = TruncSeq(np.array(z, dtype=complex), 0.25)
    np.testing.assert_array_equal(seq_from_json(seq_to_json(x)).coeffs, x.coeffs)
    np.testing.assert_array_equal(seq_from_csv(seq_to_csv(x)).coeffs, x.coeffs)


@given(vectors)
def test_csv_round_trip(a):
    x = TruncSeq(a)
    np.testing.assert_array_equal(seq_from_csv(seq_to_csv(x)).coeffs, a)
