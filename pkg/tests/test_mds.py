"""Tests for the double Dirichlet series machinery (cheap-scale versions of
the identity checks; the full-size runs live in test_acceptance)."""

import numpy as np
import pytest

from qdmoment.arith import (
    PSI0,
    PSI1,
    PSI2,
    PSI_M1,
    CharSpec,
    FactorTable,
    a_t,
    gauss_G,
    squarefree_odd,
)
from qdmoment.eulerprod import R1
from qdmoment.lfun import l_oracle
from qdmoment.mds import (
    A_direct,
    A_via_chars,
    B_double,
    B_product_rep,
    E_N_char,
    E1_char,
    P_finite,
    _L_principal_on_support,
    _l_w_4n_batch,
    check_fe_s,
    master_product_direct,
    rec_factor,
    residue_A_w1,
    residue_B_closed_form,
    residue_B_numeric,
)
from qdmoment.specfun import zeta


@pytest.fixture(scope="module")
def table():
    return FactorTable(700_000)


# ---------------------------------------------------------------------------
# A(s, w)
# ---------------------------------------------------------------------------

def test_A_direct_truncation_stability(table):
    a = A_direct(2.0, 2.0, 10_000, table).value
    b = A_direct(2.0, 2.0, 100_000, table).value
    # the d-tail at w = 2 is ~4e-5 at d_max = 1e4 (all-positive L(2) terms)
    assert abs(a - b) < 1e-4


def test_A_direct_large_w_is_first_term(table):
    a = A_direct(2.0, 10.0, 1_000, table).value
    l28 = l_oracle(2.0, CharSpec("top", 8))
    bound = 2 * sum(d ** -10.0 for d in range(3, 100))
    assert abs(a - l28) < bound


def test_A_direct_region_guard(table):
    with pytest.raises(ValueError):
        A_direct(2.0, 1.1, 1_000, table)  # Re w too small


def test_A_via_chars_n1_term(table):
    # the n = 1 summand is L(w, (./4)) a_2w(4) / zeta(2w) with
    # L(w, (./4)) = zeta(w)(1 - 2^-w) (principal character mod 4)
    w = 2.0
    got = _l_w_4n_batch(w, np.array([1]))[0]
    want = zeta(w) * (1 - 2.0 ** -w)
    assert got == pytest.approx(want, rel=1e-12)


def test_A_via_chars_l_values_match_oracle(table):
    w = 1.7
    ns = np.array([3, 9, 15, 25])
    got = _l_w_4n_batch(w, ns)
    for n, g in zip(ns, got):
        want = l_oracle(w, CharSpec("bottom", 4 * int(n)))
        assert g == pytest.approx(want, abs=1e-11)


def test_A_cross_representation_cheap(table):
    a1 = A_direct(2.0, 2.0, 100_000, table).value
    a2 = A_via_chars(2.0, 2.0, 3_000, table).value
    assert abs(a1 - a2) < 2e-5


def test_check_fe_s_fixed_point_is_exact(table):
    # (0.5, 2.5) is fixed by (s, w) -> (1-s, s+w-1/2) and X_+(1/2) = 1
    assert check_fe_s(0.5, 2.5, 2_000, table) < 1e-6


def test_check_fe_s_cheap_point(table):
    assert check_fe_s(0.4, 3.0, 2_000, table) < 1e-4


def test_residue_A_w1_cheap(table):
    num = residue_A_w1(1.5, 2_000, table)
    assert abs(num - R1(1.5)) < 5e-3
    assert abs(num.imag) < 1e-10
    assert num.real > 0


# ---------------------------------------------------------------------------
# B series
# ---------------------------------------------------------------------------

def test_B_double_single_cell(table):
    # with n_max = k_max = 1 only (n, k) = (1, 1) contributes: G = 1
    v = B_double(1.8, 2.0, 1.5, PSI1, PSI1, 1, 1, table)
    assert v.value == pytest.approx(1.0, abs=1e-14)


def test_B_double_small_window_matches_bruteforce(table):
    # literal double loop over n, k <= 60 as the oracle
    s, w, t = 1.8, 2.0, 1.5
    want = 0.0
    for n in range(1, 61, 2):
        for k in range(1, 61):
            g = gauss_G(n, k, table)
            if g:
                want += g * a_t(n, t, table) * PSI1(n) * PSI1(k) \
                    / (n ** (s + 0.5) * k ** w)
    got = B_double(s, w, t, PSI1, PSI1, 60, 60, table).value
    assert got == pytest.approx(want, rel=1e-12)


def test_B_product_rep_N_independence(table):
    vals = [B_product_rep(1.8, 2.0, 1.5, PSI1, PSI1, N, 100, table).value
            for N in (1, 2, 3)]
    assert abs(vals[0] - vals[1]) < 1e-6
    assert abs(vals[1] - vals[2]) < 1e-6


def test_B_product_rep_k1_term_is_pure_n_sum(table):
    # the k = 1 column reduces to sum over odd square-free n of
    # a_t(n) psi(n) n^-s (since G((./n),1) = sqrt(n) mu^2(n) for odd n);
    # the direct sum's positive tail at N is ~0.56 N^-0.8
    s, w, t = 1.8, 2.0, 1.5
    got = B_product_rep(s, w, t, PSI1, PSI1, 2, 1, table).value
    N = 60_000
    ns = squarefree_odd(1, N, table)
    direct = sum(a_t(int(n), t, table) * float(n) ** (-s) for n in ns)
    assert got == pytest.approx(direct, abs=3 * 0.56 * N ** -0.8)


def test_P_finite_k1_is_one(table):
    for psi in (PSI0, PSI1, PSI2):
        for s, t in ((1.5, 1.2), (0.75, 0.27)):
            assert P_finite(s, t, 1, psi, table) == 1.0


def test_E1_acceleration_matches_direct(table):
    # at an easy point the direct product converges; the accelerated value
    # must agree
    chi = CharSpec("bottom", 5)
    d = E1_char(1.5, 1.2, chi, table, 2_000_000, accelerated=False)
    a = E1_char(1.5, 1.2, chi, table, 100_000, accelerated=True)
    assert a == pytest.approx(d, rel=1e-9)


def test_E1_acceleration_hard_point_selfconsistent(table):
    # at the residue-extraction point the direct product is useless; the
    # accelerated value must be cutoff-stable
    chi = CharSpec("bottom", 5)
    a = E1_char(0.75, 0.27, chi, table, 200_000, accelerated=True)
    b = E1_char(0.75, 0.27, chi, table, 400_000, accelerated=True)
    assert a == pytest.approx(b, abs=5e-8)


def test_rec_factor_two_routes(table):
    chi = CharSpec("bottom", 5)
    d = rec_factor(3.9, chi, table, 1_000_000, method="direct")
    l = rec_factor(3.9, chi, table, method="lratio")
    assert d == pytest.approx(l, rel=1e-10)


def test_master_product_identity_quick(table):
    s, t, N = 1.5, 1.2, 2
    chi = CharSpec("bottom", 13)
    lhs = master_product_direct(s, t, chi, 10_000)
    rhs = E_N_char(s, t, N, chi, table, 10_000, method="direct")
    for j in range(1, N + 1):
        v = s + j * t
        rhs *= l_oracle(v, chi) / _L_principal_on_support(2 * v, [13])
    assert abs(lhs - rhs) < 1e-8


# ---------------------------------------------------------------------------
# residues of B
# ---------------------------------------------------------------------------

def test_residue_closed_form_psi2_ratio():
    s, w = 0.75, 1.5
    r11 = residue_B_closed_form(s, w, PSI1, PSI1)
    r20 = residue_B_closed_form(s, w, PSI2, PSI0)
    assert r20 == pytest.approx(r11 / (2 ** w - 2 ** (-w)), rel=1e-12)


def test_residue_closed_form_vanishing():
    assert residue_B_closed_form(0.75, 1.5, PSI_M1, PSI1) == 0.0


def test_residue_B_numeric_cheap(table):
    # small k_max: must agree with the closed form truncated to the same
    # square classes (m <= 7), here just a loose sanity band
    num = residue_B_numeric(0.75, 1.5, PSI1, PSI1, table, N=2, k_max=49,
                            deltas=(0.02, 0.01, 0.005))
    closed = residue_B_closed_form(0.75, 1.5, PSI1, PSI1)
    assert abs(num - closed) < 2e-2
    assert abs(num.imag) < 1e-8


def test_residue_B_region_guards(table):
    with pytest.raises(ValueError):
        residue_B_numeric(0.3, 1.5, PSI1, PSI1, table)
    with pytest.raises(ValueError):
        residue_B_numeric(0.75, 0.2, PSI1, PSI1, table)
