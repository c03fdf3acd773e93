import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ritt_lab.analytic import (
    hurwitz_tail,
    model_for,
    polylog,
    polylog_cut,
    polylog_expansion,
    polylog_ref,
    zeta,
)
from ritt_lab.families import (
    make_alpha_frac,
    make_counterexample_log,
    make_log_mix,
    make_log_mix_sub,
    make_zeta,
)
from ritt_lab.seq import ProbSeq, convolve, delta
from ritt_lab.transforms import (
    check_deriv_bound,
    check_real_lower,
    fourier,
    gen_fn,
    near_zero_grid,
    sector_report,
)


@st.composite
def probs(draw, max_len=30):
    w = np.array(draw(st.lists(st.floats(0, 1), min_size=1, max_size=max_len)))
    if w.sum() == 0:
        w[0] = 1.0
    return ProbSeq(w / w.sum())


disc = st.builds(
    lambda r, t: r * complex(math.cos(t), math.sin(t)), st.floats(0, 1), st.floats(-math.pi, math.pi)
)


# --------------------------------------------------------------------------
# closed forms against mpmath


@pytest.mark.parametrize("s", [1.25, 1.5, 1.75, 2.0, 3.5])
def test_zeta_against_mpmath(s):
    assert zeta(s) == pytest.approx(float(mpmath.zeta(s)), rel=1e-14)


@pytest.mark.parametrize("s,n", [(1.5, 1), (1.5, 10), (1.25, 1000), (1.75, 1 << 20)])
def test_hurwitz_tail_against_mpmath(s, n):
    assert hurwitz_tail(s, n) == pytest.approx(float(mpmath.zeta(s, n)), rel=1e-13)


@pytest.mark.parametrize("s", [1.5, 1.25, 2.5])
@pytest.mark.parametrize("w", [0.3, -0.8, 0.9j, 0.99 * np.exp(0.05j), np.exp(-0.2j), 1.0])
def test_polylog_against_mpmath(s, w):
    ref = complex(mpmath.polylog(s, w))
    assert abs(polylog(s, w) - ref) <= 1e-12 * max(1, abs(ref))


def test_polylog_special_values():
    assert polylog(1.5, 0) == 0
    assert polylog(1.5, 1).real == pytest.approx(zeta(1.5), rel=1e-15)
    v, err = polylog_ref(1.5, 0)
    assert v == 0 and err == 0


@pytest.mark.parametrize("xi", [0.05, 0.1, 0.2])
def test_polylog_expansion_vs_direct_series(xi):
    v, err = polylog_ref(1.5, np.exp(-1j * xi))
    assert err < 1e-11
    assert abs(polylog_expansion(1.5, -1j * xi) - v) <= 1e-10


@pytest.mark.parametrize("s", [1.5, 1.75])
def test_polylog_cut_against_mpmath(s):
    u = np.array([1e-6, 1e-3, 0.5, 3.0])
    got = polylog_cut(s, u)
    # mpmath places the branch cut on (1, inf) approached from below; take the conjugate
    with mpmath.workdps(30):
        ref = np.array([complex(mpmath.polylog(s, mpmath.mpc(1 + x, 1e-25))) for x in u])
    np.testing.assert_allclose(got, ref, rtol=1e-11)


@pytest.mark.parametrize(
    "seq",
    [
        lambda: make_alpha_frac(0.5, 1 << 12),
        lambda: make_zeta(0.5, 1 << 12),
        lambda: make_counterexample_log(1 << 12),
        lambda: make_log_mix(0.5, 1 << 12),
    ],
)
def test_models_match_truncated_sums(seq):
    f = seq()
    m = model_for(f.meta)
    w = np.array([0.0, 0.5, -0.7, 0.6j, 0.9 * np.exp(2j)])
    v, err = gen_fn(f, w)
    np.testing.assert_array_less(np.abs(m.gf(w) - v), err + 1e-12)


# --------------------------------------------------------------------------
# transforms


def test_fourier_basic():
    f = make_alpha_frac(0.5, 1 << 16)
    v, err = fourier(f, 0.0)
    assert abs(v - 1) <= f.tail_bound + err
    xi = 0.7
    assert fourier(delta(1), xi, False) == pytest.approx(np.exp(-1j * xi), abs=1e-16)
    v, err = fourier(f, 0.1)
    assert abs(v - (1 - (1 - np.exp(-0.1j)) ** 0.5)) <= err


def test_gen_fn_examples():
    a = make_alpha_frac(0.5, 1 << 14)
    v, err = gen_fn(a, 0.5j)
    assert abs(v - (1 - (1 - 0.5j) ** 0.5)) <= err
    b = make_log_mix(0.5, 1 << 14)
    v, err = gen_fn(b, -0.7)
    exact = 1 - ((1.7) ** 0.5 - 1) / (0.5 * math.log(1.7))
    assert abs(v - exact) <= err
    with pytest.raises(ValueError):
        gen_fn(a, 1.5)


@given(probs(), st.floats(-math.pi, math.pi))
def test_fourier_is_gen_fn_on_circle(f, xi):
    assert fourier(f, xi, False) == gen_fn(f, np.exp(-1j * xi), False)


@given(probs(), probs(), disc)
def test_gen_fn_multiplicative(a, b, w):
    va, ea = gen_fn(a, w)
    vb, eb = gen_fn(b, w)
    c = convolve(a, b)
    vc, ec = gen_fn(c, w)
    assert abs(vc - va * vb) <= ec + ea + eb + c.tail_bound + 1e-14


@given(probs(), disc)
def test_gen_fn_modulus_at_most_one(f, w):
    v, e = gen_fn(f, w)
    assert abs(v) <= 1 + e + 1e-15


# --------------------------------------------------------------------------
# sector angles and grid checks


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_sector_alpha_frac_limit(alpha):
    f = make_alpha_frac(alpha, 1 << 16)
    r = sector_report(f)
    det = ~r.indeterminate
    assert np.all(r.args[det] <= alpha * math.pi / 2 + r.arg_error[det] + 1e-12)
    closed = sector_report(f, model=model_for(f.meta))
    assert closed.near_zero_args[-1] == pytest.approx(alpha * math.pi / 2, abs=1e-3)
    det = ~closed.indeterminate
    assert np.all(closed.args[det] <= alpha * math.pi / 2 + closed.arg_error[det])


def test_sector_counterexample_trends_to_right_angle():
    r = sector_report(make_counterexample_log(1 << 20))
    # the arguments increase towards zero until the truncation swamps them
    assert r.limit_estimate == pytest.approx(math.pi / 2, abs=0.1)
    m = model_for({"family": "counterexample_log", "params": {}})
    closed = sector_report(make_counterexample_log(8), model=m)
    args = closed.near_zero_args
    assert np.all(np.diff(args[5:]) > 0)
    # the approach is logarithmically slow
    assert math.pi / 2 - args[-1] < 0.1


def test_sector_subordinated_family_shrinks():
    beta = 0.5
    sub = model_for({"family": "log_mix_sub", "params": {"epsilon": 0.5, "beta": beta}})
    inner = model_for({"family": "log_mix", "params": {"epsilon": 0.5}})
    f = make_log_mix_sub(0.5, beta, 64)
    rs = sector_report(f, model=sub)
    ri = sector_report(f, model=inner)
    np.testing.assert_allclose(rs.near_zero_args, beta * ri.near_zero_args, rtol=1e-9, atol=1e-12)
    assert rs.near_zero_args[-1] < rs.near_zero_args[5]


def test_sector_csv_header():
    r = sector_report(make_alpha_frac(0.5, 1024), grid=np.array([0.1, 1.0]))
    lines = r.to_csv().splitlines()
    assert lines[0] == "xi,re,im,modulus,arg,eval_error" and len(lines) == 3


def test_check_real_lower_alpha_frac():
    grid = near_zero_grid(12)
    f = make_alpha_frac(0.5, 1 << 16)
    r = check_real_lower(f, 0.5, grid, model=model_for(f.meta))
    assert r.ok
    floor = np.min(math.cos(math.pi / 4) * (2 * np.sin(grid / 2)) ** 0.5 / grid**0.5)
    assert r.constant >= floor - 1e-12
    assert r.constant == pytest.approx(0.7, abs=0.05)
    # the truncated sum certifies a smaller constant
    assert check_real_lower(f, 0.5, grid).ok


def test_check_real_lower_zeta():
    assert check_real_lower(make_zeta(0.5, 1 << 16), 0.5).ok


def test_log_mix_sub_fails_derivative_bound():
    # 1 - B_beta^ decays like |log xi|^(-beta), slower than any power: the
    # lower bound holds with growing ratios while the derivative bound fails
    m = model_for({"family": "log_mix_sub", "params": {"epsilon": 0.5, "beta": 0.5}})
    f = make_log_mix_sub(0.5, 0.5, 64)
    lower = check_real_lower(f, 0.5, near_zero_grid(40), model=m)
    assert lower.ok and np.all(np.diff(lower.ratios) > 0)
    d = check_deriv_bound(f, 0.5, near_zero_grid(40), model=m)
    assert not d.ok and d.fail_at is not None


@pytest.mark.parametrize("fam", ["alpha_frac", "zeta"])
def test_check_deriv_bound_finite(fam):
    f = make_alpha_frac(0.5, 1 << 12) if fam == "alpha_frac" else make_zeta(0.5, 1 << 12)
    r = check_deriv_bound(f, 0.5)
    assert r.ok and math.isfinite(r.constant) and r.certified


def test_check_deriv_bound_shift():
    r = check_deriv_bound(delta(1), 0.5, np.linspace(0.01, math.pi, 200))
    assert r.ok and r.constant <= math.sqrt(math.pi) + 1e-12
