"""Tests for the accelerated Euler products and residue constants."""

import math

import numpy as np
import pytest

from qdmoment.eulerprod import (
    Q2,
    R1,
    R2,
    T,
    EulerProductValue,
    P_logderiv_termwise,
    eval_Y,
    eval_product,
    log_derivative,
    prime_zeta,
    prime_zeta_tail,
)
from qdmoment.specfun import EULER_GAMMA, Y_minus, Y_plus, ZETA2, zeta, zeta_2removed


def test_prime_zeta_small_values():
    # P(2) = sum 1/p^2 = 0.4522474200... (classical)
    assert prime_zeta(2.0) == pytest.approx(0.45224742004106549850654336, rel=1e-12)
    # direct partial sum bound check
    assert abs(prime_zeta_tail(2.0, 1_000_000)) < 1.2e-6


def test_P_limit_at_large_s():
    val = eval_product("P", 10.0, 100_000).value
    assert abs(val - 1.0) < 1e-5


def test_P_half_vs_bruteforce_oracle():
    accel = eval_product("P", 0.5, 1_000_000)
    brute = eval_product("P", 0.5, 10_000_000, accelerated=False)
    assert 0 < accel.value.real < 1
    assert abs(accel.value - brute.value) < 1e-6 + brute.tail_bound


def test_P_positivity_real_axis():
    for s in (0.1, 0.5, 1.0, 3.0):
        v = eval_product("P", s, 50_000).value
        assert 0 < v.real <= 1 and abs(v.imag) < 1e-14


def test_E_cutoff_doubling():
    a = eval_product("E", 1.0 / 3.0, 100_000)
    b = eval_product("E", 1.0 / 3.0, 200_000)
    assert abs(a.value - b.value) < 1e-7
    assert abs(a.value - b.value) < a.tail_bound


def test_E_vs_bruteforce():
    accel = eval_product("E", 1.0 / 3.0, 200_000)
    brute = eval_product("E", 1.0 / 3.0, 10_000_000, accelerated=False)
    assert abs(accel.value - brute.value) < 1e-6 + brute.tail_bound


def test_E_region_guard():
    with pytest.raises(ValueError):
        eval_product("E", 1.2)
    with pytest.raises(ValueError):
        eval_product("E", -0.1)


def test_euler_factor_identity_P():
    # the two printed forms of the same factor agree per prime:
    # 1 - 1/(p^2s (p+1)) = (1 + 1/(p^2s - 1))^-1 (1 + p/((p+1)(p^2s - 1)))
    rng = np.random.default_rng(7)
    for _ in range(10):
        s = complex(rng.uniform(0.2, 1.5), rng.uniform(-1, 1))
        for p in (3.0, 5.0, 11.0, 101.0):
            lhs = 1 - 1 / (p ** (2 * s) * (p + 1))
            rhs = (1 + p / ((p + 1) * (p ** (2 * s) - 1))) \
                / (1 + 1 / (p ** (2 * s) - 1))
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_cutoff_stability_all_products():
    cases = [("P", 0.5, {}), ("E", 1.0 / 3.0, {}), ("Q", 0.5, {}),
             ("Qprod", 0.5, {}), ("PLemma52", 0.75, {"w": 1.5})]
    for which, s, kw in cases:
        a = eval_product(which, s, 100_000, **kw)
        b = eval_product(which, s, 200_000, **kw)
        assert abs(a.value - b.value) <= a.tail_bound + 1e-15, which


def test_Y_half_real_and_closed_form():
    y = eval_Y(0.5)
    assert abs(y.imag) < 1e-12
    # i Y_-(1/3) is real: equals pi^(-1/6) Gamma(5/6)/Gamma(2/3)
    iym = 1j * Y_minus(1.0 / 3.0)
    want = math.pi ** (-1 / 6) * math.gamma(5 / 6) / math.gamma(2 / 3)
    assert iym == pytest.approx(want, abs=1e-13)
    assert y == pytest.approx(Y_plus(1 / 3) * (Y_plus(1 / 3) + iym), abs=1e-13)


def test_Y_schwarz_reflection():
    for s in (0.4 + 0.1j, 0.4 - 0.1j):
        assert eval_Y(np.conj(s)) == pytest.approx(np.conj(eval_Y(s)),
                                                   abs=1e-12)


def test_Q2_half_vs_high_precision():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    two = mp.mpf(2)
    num = (1 - two ** -1) * two ** (mp.mpf(1) / 3) * (4 ** (mp.mpf(2) / 3) - 2)
    den = 3 * (two ** 2 - two ** (mp.mpf(2) / 3)) \
        * (two ** (mp.mpf(2) / 3) - two ** (mp.mpf(4) / 3) - 2)
    want = float(num / den)
    assert Q2(0.5) == pytest.approx(want, rel=1e-13)


def test_R1_pole_structure():
    # (2s-1) R1(s) stays bounded near s = 1/2
    vals = [abs((2 * s - 1) * R1(s, 50_000)) for s in (0.501, 0.5001, 0.50001)]
    assert max(vals) < 1.0
    assert np.std(vals) / np.mean(vals) < 0.01
    with pytest.raises(ValueError):
        R1(0.5)


def test_R1_real_positive_on_real_axis():
    for s in (0.3, 0.8, 1.5, 2.0):
        v = R1(s, 50_000)
        assert abs(v.imag) < 1e-12
        assert v.real > 0 or s < 0.5  # zeta_(2)(2s) < 0 left of the pole


def test_T_half_real():
    t = T(0.5, 200_000)
    assert abs(t.imag) < 1e-10


def test_R2_guards():
    with pytest.raises(ValueError):
        R2(0.5)
    with pytest.raises(ValueError):
        R2(1.6)


def test_PL52_direct_vs_reduced_form():
    # the reduced form (with zeta_(2)(2s+2w-1) factored out) must equal the
    # direct product form
    from qdmoment.eulerprod import _primes, _x_PL52_direct, _log1p_stable
    s, w = 0.75, 1.5
    primes = _primes(200_000)
    primes = primes[primes > 2].astype(np.float64)
    direct = complex(np.exp(np.sum(_log1p_stable(_x_PL52_direct(primes, s, w)))))
    reduced = eval_product("PLemma52", s, 200_000, w=w).value
    assert direct == pytest.approx(reduced, rel=1e-8)


def test_Q_consistency_with_PL52():
    # Q(s) = E(2s/3)/(zeta(4s/3) zeta(2)) * Qprod(s) must match
    # PL(2s/3, (3+2s)/6) / zeta_(2)(2s) * E(2s/3)/(zeta(4s/3) zeta(2))
    s = 0.8
    q = eval_product("Q", s, 300_000).value
    pl = eval_product("PLemma52", 2 * s / 3, 300_000, w=(3 + 2 * s) / 6).value
    e = eval_product("E", 2 * s / 3, 300_000).value
    want = e / (zeta(4 * s / 3) * ZETA2) * pl / zeta_2removed(2 * s)
    assert q == pytest.approx(want, rel=1e-9)


def test_log_derivative_P_two_methods():
    fd = log_derivative("P", 0.5, 1_000_000)
    series = P_logderiv_termwise(0.5, 10_000_000)
    assert fd == pytest.approx(series, abs=1e-6)


def test_log_derivative_degenerate_constant():
    # a product whose factors are all 1 has zero log-derivative: emulate by
    # the P-series at huge s where every factor is 1 + O(p^-21)
    assert abs(log_derivative("P", 10.0, 10_000)) < 1e-6


def test_zeta2_removed_laurent_data():
    # d/ds [(2s-1) zeta_(2)(2s)] at 1/2 equals gamma + log 2 (Laurent series)
    h = 1e-5
    f = lambda s: (2 * s - 1) * zeta_2removed(2 * s)  # noqa: E731
    val = (f(0.5 + h) - f(0.5 - h)).real / (2 * h)
    assert val == pytest.approx(EULER_GAMMA + math.log(2.0), abs=1e-8)
    assert f(0.5 + 1e-7).real == pytest.approx(0.5, abs=1e-6)


def test_product_value_dataclass_fields():
    v = eval_product("P", 0.7, 50_000)
    assert isinstance(v, EulerProductValue)
    assert v.accelerated and v.p_max == 50_000 and v.tail_bound >= 0
