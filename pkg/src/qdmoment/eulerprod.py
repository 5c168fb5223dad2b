"""Accelerated evaluation of the explicit Euler products and residue constants.

Products handled (all entering the moment's main and secondary terms):

    P(s)   = prod_{p>2} (1 - 1/(p^(2s)(p+1)))
    E(s)   = prod_p (1 + (p^s - p^(1-s) + 1)/((p+1)(p^s+1)(p^(1-s)-1)))
    Qp(s)  = prod_{p>2} (1 + (p^(1+4s/3)+p^(1+2s/3)-p-p^(2s)) /
                             (p^(2s/3)(p^(1+2s/3)+p-p^(4s/3))(p^(1+4s/3)-1)))
    Q(s)   = E(2s/3) / (zeta(4s/3) zeta(2)) * Qp(s)
    Q2(s)  = explicit 2-adic closed form
    PL(s,w)= zeta_(2)(2s+2w-1) * prod_{p>2} (1 - (p^(1+2s)+p^(1+s)-p-p^(3s)) /
                             (p^s (p^(2s)-p^(1+s)-p)(p^(2w)-1)))
    Y(s)   = Y_+(2s/3) (Y_+((3-2s)/6) + i Y_-((3-2s)/6))
    T(s)   = Y(s) Q2(s) Q(s);   R1(s) = (2/(3 zeta(2))) zeta_(2)(2s) P(s);
    R2(s)  = zeta(2s) T(s)

Acceleration: the log of each factor expands as sum_i c_i p^(-theta_i); the
leading exponents (derived symbolically, hard-coded below) are summed in
closed form through the prime zeta function, and only the fast-decaying
remainder is summed over p <= p_max.  Every accelerated value is covered by
a brute-force cross-check in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import primes_up_to
from .lfun import l_oracle
from .specfun import Y_minus, Y_plus, ZETA2, zeta, zeta_2removed

DEFAULT_PMAX = 1_000_000
ORACLE_PMAX = 10_000_000

_MU_SMALL = (0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 0,
             -1, 0, 1, 1, -1, 0, 0, 1, 0, 0, -1, -1, -1, 0, 1, 1, 1, 0, -1,
             1, 1, 0, -1)


@lru_cache(maxsize=8)
def _primes(p_max: int) -> np.ndarray:
    return primes_up_to(p_max)


@dataclass
class EulerProductValue:
    """Accelerated product value with its prime cutoff and tail estimate."""

    value: complex
    p_max: int
    tail_bound: float
    accelerated: bool


def prime_zeta(theta: complex) -> complex:
    """P(theta) = sum_p p^-theta for Re theta > 1, via mu-weighted log zeta."""
    theta = complex(theta)
    if theta.real <= 1.0:
        raise ValueError("prime_zeta needs Re theta > 1")
    total = 0.0 + 0.0j
    for k in range(1, 41):
        mu = _MU_SMALL[k]
        if mu == 0:
            continue
        term = mu * np.log(zeta(k * theta)) / k
        total += term
        if k > 3 and abs(term) < 1e-18:
            break
    return complex(total)


def _prime_zeta_partial(theta: complex, primes: np.ndarray) -> complex:
    return complex(np.sum(primes.astype(np.float64) ** (-complex(theta))))


def prime_zeta_tail(theta: complex, p_max: int) -> complex:
    """sum_{p > p_max} p^-theta (exact: full prime zeta minus partial sum)."""
    return prime_zeta(theta) - _prime_zeta_partial(theta, _primes(p_max))


def _log1p_stable(x: np.ndarray) -> np.ndarray:
    """log(1+x) for complex x, series branch below |x| = 1e-4."""
    x = np.asarray(x, dtype=np.complex128)
    small = np.abs(x) < 1e-4
    out = np.empty_like(x)
    xs = x[small]
    out[small] = xs * (1 - xs * (0.5 - xs * (1 / 3 - xs * 0.25)))
    out[~small] = np.log(1.0 + x[~small])
    return out


# ---------------------------------------------------------------------------
# Factor functions: return x_p = factor - 1 (stable for large p)
# ---------------------------------------------------------------------------

def _pc(primes: np.ndarray, expo: complex) -> np.ndarray:
    """p^expo over the prime array, complex safe."""
    return np.exp(complex(expo) * np.log(primes.astype(np.float64)))


def _x_P(p: np.ndarray, s: complex) -> np.ndarray:
    return -1.0 / (_pc(p, 2 * s) * (p + 1.0))


def _x_E(p: np.ndarray, s: complex) -> np.ndarray:
    ps = _pc(p, s)
    p1s = _pc(p, 1 - s)
    return (ps - p1s + 1.0) / ((p + 1.0) * (ps + 1.0) * (p1s - 1.0))


def _x_Qprod(p: np.ndarray, s: complex) -> np.ndarray:
    # this is the w = 1/2 - s/3 residue's odd-prime product, i.e. the
    # PLemma52 reduced factor at (2s/3, (3+2s)/6); the third denominator
    # factor is p^(2w) - 1 = p^(1+2s/3) - 1 at that point
    num = _pc(p, 1 + 4 * s / 3) + _pc(p, 1 + 2 * s / 3) - p - _pc(p, 2 * s)
    den = _pc(p, 2 * s / 3) * (_pc(p, 1 + 2 * s / 3) + p - _pc(p, 4 * s / 3)) \
        * (_pc(p, 1 + 2 * s / 3) - 1.0)
    return num / den


def _x_PL52_reduced(p: np.ndarray, s: complex, w: complex) -> np.ndarray:
    num = _pc(p, 1 + 2 * s) + _pc(p, 1 + s) - p - _pc(p, 3 * s)
    den = _pc(p, s) * (_pc(p, 2 * s) - _pc(p, 1 + s) - p) * (_pc(p, 2 * w) - 1.0)
    return -num / den


def _x_PL52_direct(p: np.ndarray, s: complex, w: complex) -> np.ndarray:
    p2w = _pc(p, 2 * w)
    num = p * (_pc(p, 1 + s) - _pc(p, 2 * s) + p) + p2w * (
        -_pc(p, 2 + s) - p * p - _pc(p, 1 + 3 * s) + _pc(p, 1 + s)
        + _pc(p, 4 * s))
    den = (_pc(p, 2 * s) - _pc(p, 1 + s) - p) * (p2w - 1.0) \
        * (_pc(p, 2 * s + 2 * w) - p)
    return num / den


# ---------------------------------------------------------------------------
# Extraction tables: log factor = sum c * p^-theta + O(p^-theta_next)
# (coefficients derived symbolically; validated by brute-force cross-checks)
# ---------------------------------------------------------------------------

def _terms_P(s: complex) -> list[tuple[complex, complex]]:
    return [(-1, 2 * s + 1), (1, 2 * s + 2), (-1, 2 * s + 3),
            (-0.5, 4 * s + 2), (1, 2 * s + 4)]


def _next_P(s: complex) -> list[complex]:
    return [2 * s + 5, 4 * s + 3]


# E(s): coefficients at theta = i*s + j
_E_TABLE = [
    (1, 1, -1), (2, 1, 1), (3, 1, -1), (4, 1, 1),
    (-1, 2, 1), (0, 2, -1), (1, 2, 2), (2, 2, -2.5), (3, 2, 1),
    (-2, 3, 1), (-1, 3, -2), (0, 3, 3), (1, 3, -3), (2, 3, 1),
    (-3, 4, 1), (-2, 4, -2.5), (-1, 4, 4), (0, 4, -3), (1, 4, 1),
    (-4, 5, 1), (-3, 5, -2), (-2, 5, 2), (-1, 5, -1),
    (-5, 6, 1), (-4, 6, -2.5), (-3, 6, 10 / 3), (-2, 6, -2.5), (-1, 6, 1),
]


def _terms_E(s: complex, cut: float = 2.6) -> list[tuple[complex, complex]]:
    out = []
    for i, j, c in _E_TABLE:
        theta = i * s + j
        if 1.02 < theta.real <= cut:
            out.append((c, theta))
    return out


def _next_E(s: complex, cut: float = 2.6) -> list[complex]:
    rest = [i * s + j for i, j, _ in _E_TABLE
            if not (1.02 < (i * s + j).real <= cut)]
    rest.append(7 - 6 * s)  # leading term of the next lattice row
    return [t for t in rest if t.real > 1.0]


# Qprod = PL52 reduced product at (2s/3, (3+2s)/6): reuse the PL52 lattice
def _terms_Qprod(s: complex, cut: float = 2.8) -> list[tuple[complex, complex]]:
    return _terms_PL52(2 * s / 3, (3 + 2 * s) / 6, cut)


def _next_Qprod(s: complex, cut: float = 2.8) -> list[complex]:
    return _next_PL52(2 * s / 3, (3 + 2 * s) / 6, cut)


_PL52_TABLE = [
    ((0, 0, 1), 1), ((0, 0, 2), 0.5), ((0, 0, 3), 1 / 3),
    ((0, 2, 1), -1), ((1, 1, 1), -1), ((2, 0, 1), -1),
    ((2, 1, 1), 2), ((3, 0, 1), 1), ((4, 0, 1), -1),
]


def _terms_PL52(s: complex, w: complex,
                cut: float = 3.2) -> list[tuple[complex, complex]]:
    out = []
    for (i, j, k), c in _PL52_TABLE:
        theta = i * s + j + k * (2 * w)
        if 1.02 < theta.real <= cut:
            out.append((c, theta))
    return out


def _next_PL52(s: complex, w: complex, cut: float = 3.2) -> list[complex]:
    rest = [i * s + j + k * (2 * w) for (i, j, k), _ in _PL52_TABLE
            if not (1.02 < (i * s + j + k * (2 * w)).real <= cut)]
    rest.append(5 * s + 2 * w)
    return [t for t in rest if t.real > 1.0]


def _accelerated_log_product(x_fn, terms, next_thetas, p_max: int,
                             odd_only: bool) -> tuple[complex, float]:
    """Accelerated sum of log factors; returns (log value, tail bound)."""
    primes = _primes(p_max)
    if odd_only:
        primes = primes[primes > 2]
    pf = primes.astype(np.float64)
    logf = _log1p_stable(x_fn(pf))
    # subtract the extracted monomials over p <= p_max ...
    for c, theta in terms:
        logf = logf - c * _pc(pf, -theta)
    total = complex(np.sum(logf))
    # ... and add back their full prime sums (minus the p = 2 term for
    # products over odd primes)
    for c, theta in terms:
        pz = prime_zeta(theta)
        if odd_only:
            pz -= 2.0 ** (-complex(theta))
        total += c * pz
    tail = 0.0
    for theta in next_thetas:
        tail += abs(prime_zeta_tail(theta.real, p_max))
    tail *= 3.0  # safety factor over the known next exponents
    return total, tail


def eval_product(which: str, s: complex, p_max: int = DEFAULT_PMAX,
                 w: complex | None = None,
                 accelerated: bool = True) -> EulerProductValue:
    """Evaluate one of the named Euler products at s (PLemma52 also needs w).

    Accelerated mode uses the prime-zeta extraction; accelerated=False is the
    brute-force oracle (plain truncated product, larger p_max recommended).
    """
    s = complex(s)
    if which == "P":
        if s.real <= 0:
            raise ValueError("P(s) needs Re s > 0")
        spec = (_x_P, _terms_P(s), _next_P(s), True)
    elif which == "E":
        if not 0 < s.real < 1:
            raise ValueError("E(s) needs 0 < Re s < 1")
        spec = (_x_E, _terms_E(s), _next_E(s), False)
    elif which == "Qprod":
        if not 0 < s.real:
            raise ValueError("Qprod(s) needs Re s > 0")
        spec = (_x_Qprod, _terms_Qprod(s), _next_Qprod(s), True)
    elif which == "PLemma52":
        if w is None:
            raise ValueError("PLemma52 needs the w argument")
        w = complex(w)
        if s.real <= 0 or w.real <= 0.5 or (s + w).real <= 1:
            raise ValueError("PLemma52 needs Re s > 0, Re w > 1/2, Re(s+w) > 1")
        spec = (lambda p, s=s: _x_PL52_reduced(p, s, w),
                _terms_PL52(s, w), _next_PL52(s, w), True)
    elif which == "Q":
        return _eval_Q(s, p_max, accelerated)
    elif which == "Q2":
        return EulerProductValue(Q2(s), 0, 0.0, False)
    else:
        raise ValueError(f"unknown product {which!r}")

    x_fn, terms, nxt, odd_only = spec
    if which == "PLemma52":
        x_loc = x_fn
    else:
        x_loc = lambda p: x_fn(p, s)  # noqa: E731
    if not accelerated:
        # brute force: no extraction; tail dominated by the leading exponent
        nxt = [t for _, t in terms] + nxt
        terms = []
    log_total, tail = _accelerated_log_product(x_loc, terms, nxt, p_max,
                                               odd_only)
    value = complex(np.exp(log_total))
    if which == "PLemma52":
        value *= zeta_2removed(2 * s + 2 * w - 1)
    return EulerProductValue(value, p_max, tail * abs(value), accelerated)


def _eval_Q(s: complex, p_max: int, accelerated: bool) -> EulerProductValue:
    """Q(s) = E(2s/3) / (zeta(4s/3) zeta(2)) * Qprod(s); zero at s = 3/4."""
    if not 0 < s.real < 1.5:
        raise ValueError("Q(s) needs 0 < Re s < 3/2")
    e = eval_product("E", 2 * s / 3, p_max, accelerated=accelerated)
    qp = eval_product("Qprod", s, p_max, accelerated=accelerated)
    if abs(4 * s / 3 - 1.0) < 1e-13:
        return EulerProductValue(0.0, p_max, e.tail_bound + qp.tail_bound,
                                 accelerated)
    z = zeta(4 * s / 3)
    value = e.value / (z * ZETA2) * qp.value
    tail = (e.tail_bound / max(abs(e.value), 1e-300)
            + qp.tail_bound / max(abs(qp.value), 1e-300)) * abs(value)
    return EulerProductValue(value, p_max, tail, accelerated)


# ---------------------------------------------------------------------------
# Closed forms: Q2, Y, R1, T, R2
# ---------------------------------------------------------------------------

def Q2(s: complex) -> complex:
    """The explicit 2-adic factor of the w = 1/2 - s/3 residue."""
    s = complex(s)
    two = 2.0
    num = (1 - two ** (-2 * s)) * two ** (2 * s / 3) * (4 ** (0.5 + s / 3) - 2)
    den = 3 * (two ** (1.5 + s) - two ** (0.5 + s / 3)) \
        * (two ** (4 * s / 3) - two ** (2 * s / 3 + 1) - 2)
    return num / den


def eval_Y(s: complex) -> complex:
    """Y(s) = Y_+(2s/3) (Y_+((3-2s)/6) + i Y_-((3-2s)/6))."""
    s = complex(s)
    u = (3 - 2 * s) / 6
    return Y_plus(2 * s / 3) * (Y_plus(u) + 1j * Y_minus(u))


def R1(s: complex, p_max: int = DEFAULT_PMAX) -> complex:
    """Residue of A(s, w) at w = 1: (2/(3 zeta(2))) zeta_(2)(2s) P(s)."""
    s = complex(s)
    if s.real <= 0:
        raise ValueError("R1 needs Re s > 0")
    if abs(2 * s - 1.0) < 1e-12:
        raise ValueError("R1 has a pole at s = 1/2 (from zeta(2s))")
    return (2.0 / (3.0 * ZETA2)) * zeta_2removed(2 * s) \
        * eval_product("P", s, p_max).value


def T(s: complex, p_max: int = DEFAULT_PMAX) -> complex:
    """T(s) = Y(s) Q2(s) Q(s); regular at s = 1/2."""
    s = complex(s)
    return eval_Y(s) * Q2(s) * eval_product("Q", s, p_max).value


def R2(s: complex, p_max: int = DEFAULT_PMAX) -> complex:
    """Residue of A(s, w) at w = 1/2 - s/3: zeta(2s) T(s)."""
    s = complex(s)
    if not 0 < s.real < 1.5:
        raise ValueError("R2 needs 0 < Re s < 3/2")
    if abs(2 * s - 1.0) < 1e-12:
        raise ValueError("R2 has a pole at s = 1/2 (from zeta(2s))")
    return zeta(2 * s) * T(s, p_max)


# ---------------------------------------------------------------------------
# Logarithmic derivatives
# ---------------------------------------------------------------------------

def log_derivative(which: str, s0: float, p_max: int = DEFAULT_PMAX) -> float:
    """f'(s0)/f(s0) for f in {P, T} by Richardson-extrapolated central
    differences with h = 1e-3 and 5e-4."""
    if which == "P":
        f = lambda s: eval_product("P", s, p_max).value  # noqa: E731
    elif which == "T":
        f = lambda s: T(s, p_max)  # noqa: E731
    else:
        raise ValueError("log_derivative supports which in {'P', 'T'}")
    f0 = f(s0)
    d = []
    for h in (1e-3, 5e-4):
        d.append((f(s0 + h) - f(s0 - h)) / (2 * h))
    deriv = (4 * d[1] - d[0]) / 3
    out = deriv / f0
    if abs(out.imag) > 1e-8:
        raise ArithmeticError(f"log_derivative({which}) came out non-real")
    return float(out.real)


def P_logderiv_termwise(s0: float, p_max: int = ORACLE_PMAX) -> float:
    """P'(s0)/P(s0) by the termwise series sum_{p>2} 2 log p p^(-2s) /
    ((p+1) - p^(-2s)); the independent check for log_derivative('P', .)."""
    primes = _primes(p_max)
    primes = primes[primes > 2].astype(np.float64)
    p2s = primes ** (-2.0 * s0)
    return float(np.sum(2.0 * np.log(primes) * p2s / ((primes + 1.0) - p2s)))


# ---------------------------------------------------------------------------
# Residue constants for the moment predictions
# ---------------------------------------------------------------------------

@dataclass
class ResidueConstants:
    """Everything the central-point prediction polynomials P1, P2 need."""

    P_half: float
    Pprime_over_P: float
    T_half: float
    Tprime_over_T: float
    gamma_euler: float
    X_plus_prime_half: float
    zeta2: float
    phi_mellin_1: float
    phi_mellin_logderiv_1: float
    phi_mellin_third: float
    phi_mellin_logderiv_third: float


def residue_constants(phi_mellin, phi_mellin_logderiv,
                      p_max: int = DEFAULT_PMAX) -> ResidueConstants:
    """Assemble the constants bundle; the weight's Mellin data is injected
    via the two callables (see the moment module)."""
    from .specfun import EULER_GAMMA, X_plus_prime_half

    p_half = eval_product("P", 0.5, p_max).value
    if abs(p_half.imag) > 1e-10:
        raise ArithmeticError("P(1/2) came out non-real")
    t_half = T(0.5, p_max)
    if abs(t_half.imag) > 1e-10:
        raise ArithmeticError("T(1/2) came out non-real")
    return ResidueConstants(
        P_half=float(p_half.real),
        Pprime_over_P=log_derivative("P", 0.5, p_max),
        T_half=float(t_half.real),
        Tprime_over_T=log_derivative("T", 0.5, p_max),
        gamma_euler=EULER_GAMMA,
        X_plus_prime_half=X_plus_prime_half(),
        zeta2=ZETA2,
        phi_mellin_1=float(complex(phi_mellin(1.0)).real),
        phi_mellin_logderiv_1=float(complex(phi_mellin_logderiv(1.0)).real),
        phi_mellin_third=float(complex(phi_mellin(1.0 / 3.0)).real),
        phi_mellin_logderiv_third=float(
            complex(phi_mellin_logderiv(1.0 / 3.0)).real),
    )
