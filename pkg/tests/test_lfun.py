"""Tests for L-values: oracle vs smoothed series, K-series, functional equations."""

import math

import numpy as np
import pytest

from qdmoment.arith import PSI0, PSI_M1, CharSpec, FactorTable, chi_8d, squarefree_odd
from qdmoment.lfun import (
    central_values_batch,
    check_fe_nonprimitive,
    k_series,
    l_central_afe,
    l_general_afe,
    l_oracle,
    l_oracle_many,
    general_values_batch,
)
from qdmoment.specfun import Y_plus, zeta


@pytest.fixture(scope="module")
def table():
    return FactorTable(10_000)


def test_oracle_zeta():
    assert l_oracle(2.0, PSI0) == pytest.approx(math.pi ** 2 / 6, rel=1e-12)


def test_oracle_leibniz():
    # L(1, psi_-1) = pi/4
    assert l_oracle(1.0, PSI_M1) == pytest.approx(math.pi / 4, rel=1e-12)


def test_oracle_pole_guard():
    with pytest.raises(ValueError):
        l_oracle(1.0, PSI0)


def test_oracle_many_matches_scalar():
    chis = [PSI_M1, CharSpec("bottom", 5), chi_8d(3), CharSpec("bottom", 45)]
    got = l_oracle_many(0.7, chis)
    for chi, g in zip(chis, got):
        assert g == pytest.approx(l_oracle(0.7, chi), abs=1e-12)


def test_afe_matches_oracle_d1_and_d5(table):
    # two independent methods must agree; pins L(1/2, chi_8)
    for d in (1, 5):
        afe = l_central_afe(d, table)
        oracle = l_oracle(0.5, chi_8d(d))
        assert abs(oracle.imag) < 1e-12
        assert afe == pytest.approx(oracle.real, abs=1e-9)


def test_afe_family_reality_and_cutoff_stability(table):
    ds = squarefree_odd(1, 500, table)
    v40 = central_values_batch(ds, cutoff=40.0)
    v60 = central_values_batch(ds, cutoff=60.0)
    assert np.max(np.abs(v40 - v60)) < 1e-12


def test_afe_rejects_bad_d(table):
    with pytest.raises(ValueError):
        l_central_afe(9, table)  # 9 = 3^2
    with pytest.raises(ValueError):
        l_central_afe(6, table)


def test_general_afe_matches_oracle(table):
    for d in (1, 5, 13):
        for s in (0.5, 0.75, 0.6 + 0.3j, 1.4):
            got = l_general_afe(s, d, table)
            want = l_oracle(s, chi_8d(d))
            assert got == pytest.approx(want, abs=1e-9), (d, s)


def test_general_afe_batch_matches_scalar(table):
    ds = squarefree_odd(1, 60, table)
    got = general_values_batch(0.6, ds)
    for d, g in zip(ds, got):
        assert g == pytest.approx(l_general_afe(0.6, int(d), table), abs=1e-10)


def test_k_series_principal_is_zeta():
    # chi = psi_0 has all tau = 1: K(s, psi_0) = zeta(s)
    got = k_series(2.0, PSI0, k_max=200_000)
    # direct truncation of zeta: compare against zeta minus the crude tail
    assert got.value.real == pytest.approx(zeta(2.0).real, abs=1e-5)
    assert got.tail_bound > 0


def test_k_series_primitive_reduces_to_l():
    # primitive (./5): tau(chi,k) = chi(k) tau(chi,1), so
    # K(s,chi) = (tau(chi,1)/sqrt 5) L(s, chi)
    chi = CharSpec("bottom", 5)
    s = 2.5
    got = k_series(s, chi, k_max=400_000).value
    want = l_oracle(s, chi)  # tau(chi,1)/sqrt(5) = 1 for this real even chi
    assert got == pytest.approx(want, abs=1e-7)


def test_k_series_region_guard():
    with pytest.raises(ValueError):
        k_series(0.9, PSI0)


def test_fe_nonprimitive_45(table):
    # 45 = 9 * 5: (./45) is non-primitive
    disc = check_fe_nonprimitive(-0.5, CharSpec("bottom", 45), k_max=1_000_000)
    assert disc < 1e-6


def test_fe_primitive_5():
    disc = check_fe_nonprimitive(-0.5, CharSpec("bottom", 5), k_max=1_000_000)
    assert disc < 1e-8


def test_fe_zeta_case():
    # both sides reduce to the classical zeta functional equation
    disc = check_fe_nonprimitive(-0.5, PSI0)
    assert disc < 1e-10


def test_k_series_converges_to_k_exact():
    from qdmoment.lfun import k_exact
    chi = CharSpec("bottom", 45)
    exact = k_exact(1.5, chi)
    errs = [abs(k_series(1.5, chi, k_max=km).value - exact)
            for km in (10_000, 100_000, 1_000_000)]
    assert errs[-1] < errs[0]
    assert errs[-1] < 1e-5


def test_fe_primitive_even_real_direct():
    # for primitive even real chi of conductor q:
    # l_oracle(s,chi) = q^(1/2-s) Y_+(s) l_oracle(1-s,chi)
    for chi in (CharSpec("bottom", 5), CharSpec("bottom", 13), chi_8d(1)):
        q = chi.modulus
        for s in (0.3, 0.5, 0.7):
            lhs = l_oracle(s, chi)
            rhs = q ** (0.5 - s) * Y_plus(s) * l_oracle(1 - s, chi)
            assert lhs == pytest.approx(rhs, abs=1e-9)
