import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn

from ritt_lab.analytic import zeta
from ritt_lab.families import (
    FamilySpec,
    build_family,
    make_alpha_frac,
    make_bernoulli,
    make_counterexample_log,
    make_delta,
    make_log_mix,
    make_log_mix_sub,
    make_poisson,
    make_power_tail_mix,
    make_zeta,
    mixture,
    subordinate_prob,
)
from ritt_lab.seq import ProbSeq, delta
from ritt_lab.transforms import gen_fn


def gf_b(eps, w):
    lg = np.log(1 - w)
    return 1 - ((1 - w) ** eps - 1) / (eps * lg)


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_alpha_frac_leading_coefficients(alpha):
    a = make_alpha_frac(alpha, 64)
    assert a.coeffs[0] == 0
    assert a.coeffs[1] == pytest.approx(alpha, rel=1e-15)
    assert a.coeffs[2] == pytest.approx(alpha * (1 - alpha) / 2, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("N", [16, 4096, 1 << 18])
def test_alpha_frac_mass_brackets_one(alpha, N):
    a = make_alpha_frac(alpha, N)
    s = math.fsum(a.coeffs)
    assert s <= 1.0 + 1e-15
    assert s + a.tail_bound >= 1.0 - 1e-15


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_alpha_frac_asymptotics(alpha):
    k = 10**4
    a = make_alpha_frac(alpha, k + 1)
    ratio = a.coeffs[k] * k ** (1 + alpha) * gamma_fn(1 - alpha) / alpha
    assert abs(ratio - 1) <= 0.02


def test_zeta_family():
    z = make_zeta(0.5, 1 << 16)
    assert z.coeffs[0] == 0
    assert z.coeffs[1] == pytest.approx(1 / zeta(1.5), rel=1e-14)
    prev = None
    for N in (1 << 10, 1 << 14, 1 << 18):
        zn = make_zeta(0.5, N)
        deficit = 1 - math.fsum(zn.coeffs)
        assert 0 <= deficit <= zn.tail_bound + 1e-15
        assert prev is None or deficit < prev
        prev = deficit


def test_log_mix_values():
    eps = 0.5
    b = make_log_mix(eps, 4096)
    assert b.coeffs[0] == 0
    assert b.coeffs[1] == pytest.approx(eps / 2, rel=1e-13)
    v, err = gen_fn(b, 0.3)
    assert abs(v - gf_b(eps, 0.3)) <= err + 1e-13


def test_subordination_trivial_cases():
    g = make_poisson(1.5)
    h = subordinate_prob(delta(1), g)
    np.testing.assert_allclose(h.coeffs, g.coeffs, atol=1e-15)
    f = make_alpha_frac(0.5, 256)
    h = subordinate_prob(f, delta(1), 256)
    np.testing.assert_allclose(h.coeffs, f.coeffs, atol=1e-15)


def test_subordinate_generating_function():
    beta, eps = 0.5, 0.5
    h = make_log_mix_sub(eps, beta, 4096)
    v, err = gen_fn(h, 0.5)
    exact = 1 - (1 - gf_b(eps, 0.5)) ** beta
    assert abs(v - exact) <= err + 1e-12


@settings(max_examples=15)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.complex_numbers(max_magnitude=0.9))
def test_subordinate_composition_law(a, b, w):
    outer = make_alpha_frac(a, 256)
    inner = make_bernoulli(b)
    h = subordinate_prob(outer, inner, 256)
    vh, eh = gen_fn(h, w)
    vi, ei = gen_fn(inner, w)
    vo, eo = gen_fn(outer, vi)
    assert abs(vh - vo) <= eh + eo + ei + 1e-12


def test_power_tail_mix_reproduces_zeta():
    f = make_power_tail_mix([(1 / zeta(1.5), 0.5)], [], 4096)
    z = make_zeta(0.5, 4096)
    np.testing.assert_allclose(f.coeffs, z.coeffs, rtol=1e-13, atol=0)


def test_power_tail_mix_matches_mixture():
    lam, a1, a2, N = 0.3, 0.4, 0.8, 4096
    f = make_power_tail_mix([(lam / zeta(1 + a1), a1), ((1 - lam) / zeta(1 + a2), a2)], [], N)
    m = mixture([lam, 1 - lam], [make_zeta(a1, N), make_zeta(a2, N)])
    np.testing.assert_allclose(f.coeffs, m.coeffs, rtol=1e-13, atol=0)


def test_power_tail_mix_with_point_mass():
    c = 1 / zeta(1.5)
    f = make_power_tail_mix([(0.5 * c, 0.5)], [0.5], 1024)
    assert f.coeffs[0] == 0.5


def test_power_tail_mix_rejects_bad_mass():
    with pytest.raises(ValueError, match="total mass"):
        make_power_tail_mix([(0.5, 0.5)], [], 1024)
    with pytest.raises(ValueError, match="negative coefficient"):
        make_power_tail_mix([(1 / zeta(1.5), 0.5)], [0.5, -0.5], 1024)


def test_counterexample():
    N = 1 << 16
    f = make_counterexample_log(N)
    assert f.coeffs[2] == 0.5
    assert math.fsum(f.coeffs) == pytest.approx(1 - 1 / (N - 1), abs=1e-14)
    v, err = gen_fn(f, -0.5)
    assert abs((1 - v) - 1.5 * (1 - math.log(1.5))) <= err + 1e-14


@given(st.floats(0, 1), st.integers(0, 3))
def test_mixture_is_exact_convex_combination(lam, seed):
    rng = np.random.default_rng(seed)
    p = rng.uniform(size=10)
    q = rng.uniform(size=6)
    f1, f2 = ProbSeq(p / p.sum()), ProbSeq(q / q.sum())
    m = mixture([lam, 1 - lam], [f1, f2])
    expected = lam * f1.coeffs
    expected[:6] += (1 - lam) * f2.coeffs
    np.testing.assert_allclose(m.coeffs, expected, rtol=0, atol=2e-16)


@pytest.mark.parametrize(
    "spec",
    [
        {"family": "delta", "m": 3},
        {"family": "bernoulli", "beta": 0.25},
        {"family": "poisson", "s": 2.0},
        {"family": "alpha_frac", "alpha": 0.5, "N": 1024},
        {"family": "zeta", "alpha": 0.5, "N": 1024},
        {"family": "log_mix", "epsilon": 0.5, "N": 256},
        {"family": "log_mix_sub", "epsilon": 0.5, "beta": 0.5, "N": 256},
        {"family": "power_tail_mix", "terms": [[1 / zeta(1.5), 0.5]], "N": 256},
        {"family": "counterexample_log", "N": 256},
        {
            "family": "mixture",
            "weights": [0.5, 0.5],
            "components": [{"family": "bernoulli", "beta": 0.5}, {"family": "poisson", "s": 1.0}],
        },
        {
            "family": "subordinate",
            "outer": {"family": "alpha_frac", "alpha": 0.5, "N": 256},
            "inner": {"family": "bernoulli", "beta": 0.5},
            "N": 256,
        },
    ],
)
def test_build_family_round_trip(spec):
    f = build_family(spec)
    assert isinstance(f, ProbSeq)
    fs = FamilySpec.from_dict(spec)
    g = build_family(FamilySpec.from_dict(fs.to_dict()))
    np.testing.assert_array_equal(f.coeffs, g.coeffs)


def test_family_errors_name_fields():
    with pytest.raises(ValueError, match="unknown keys"):
        FamilySpec.from_dict({"family": "bernoulli", "beta": 0.5, "gamma": 1})
    with pytest.raises(ValueError, match="missing keys"):
        FamilySpec.from_dict({"family": "alpha_frac"})
    with pytest.raises(ValueError, match="alpha"):
        build_family({"family": "alpha_frac", "alpha": 1.5})
    with pytest.raises(ValueError, match="weights"):
        mixture([0.6, 0.6], [make_bernoulli(0.5), make_delta(0)])


def test_window_defaults():
    assert len(build_family({"family": "poisson", "s": 1.0})) == len(make_poisson(1.0))
    assert len(build_family({"family": "delta", "m": 2})) == 3
    assert len(build_family({"family": "alpha_frac", "alpha": 0.5})) == 1 << 16
    assert "N" not in FamilySpec.from_dict({"family": "poisson", "s": 1.0}).to_dict()


def test_poisson_cutoff():
    p = make_poisson(4.0)
    assert len(p) >= 4 + 12 * 2 + 25
    assert 1 - math.fsum(p.coeffs) <= p.tail_bound
