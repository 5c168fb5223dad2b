"""Special functions: log-gamma, digamma, incomplete gamma, Hurwitz zeta,
and the gamma-factor functions X_plus, Y_plus, Y_minus.

log_gamma / digamma / upper_gamma are thin wrappers over scipy.special (they
are plumbing with well-tested library backends); hurwitz_zeta is a vectorized
Euler-Maclaurin evaluator built here because it must accept complex s, and it
is the backbone of the exact L-value oracle.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.special as sps

# B_{2j} for j = 1..13 (exact rationals, converted once)
_BERNOULLI_2J = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6),
    Fraction(-3617, 510), Fraction(43867, 798), Fraction(-174611, 330),
    Fraction(854513, 138), Fraction(-236364091, 2730), Fraction(8553103, 6),
]
_B2J = np.array([float(b) for b in _BERNOULLI_2J])

EULER_GAMMA = float(np.euler_gamma)


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z); poles at non-positive integers."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise ValueError(f"log_gamma pole at z={z}")
    return complex(sps.loggamma(z))


def digamma(x: float) -> float:
    """psi(x) for real x > 0."""
    if x <= 0:
        raise ValueError("digamma requires x > 0")
    return float(sps.digamma(x))


def upper_gamma(a: float, y) -> float | np.ndarray:
    """Upper incomplete gamma Gamma(a, y) for real a in (0, 2], y >= 0."""
    if not 0 < a <= 2:
        raise ValueError("upper_gamma expects a in (0, 2]")
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0):
        raise ValueError("upper_gamma expects y >= 0")
    out = sps.gammaincc(a, y) * sps.gamma(a)
    return float(out) if out.ndim == 0 else out


def upper_gamma_general(a: complex, y) -> np.ndarray:
    """Gamma(a, y) for complex order a (Re a > -3) and real y > 0 (array ok).

    Series for the lower incomplete gamma when y is small, Lentz continued
    fraction otherwise; orders with Re a <= 1/2 are lifted by the recurrence
    Gamma(a, y) = (Gamma(a+1, y) - y^a e^(-y)) / a, which is cancellation-free
    in the small-y regime where it matters.
    """
    a = complex(a)
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if np.any(y <= 0):
        raise ValueError("upper_gamma_general expects y > 0")
    if a.imag == 0.0 and a.real > 0.0:
        # real positive order: scipy's regularized upper gamma is exact here
        return (sps.gammaincc(a.real, y) * sps.gamma(a.real)).astype(
            np.complex128)
    if a.real <= 0.5:
        if abs(a) < 1e-14:
            raise ValueError("order too close to the pole at a = 0")
        return (upper_gamma_general(a + 1, y) -
                np.exp(a * np.log(y) - y)) / a

    out = np.empty(y.shape, dtype=np.complex128)
    small = y < a.real + 1.0
    if small.any():
        ys = y[small]
        # gamma(a, y) = y^a e^-y sum_n y^n / (a (a+1) ... (a+n))
        term = np.full(ys.shape, 1.0 / a, dtype=np.complex128)
        total = term.copy()
        for n in range(1, 400):
            term *= ys / (a + n)
            total += term
            if np.max(np.abs(term)) < 1e-17 * np.max(np.abs(total)):
                break
        lower = np.exp(a * np.log(ys) - ys) * total
        out[small] = complex(sps.gamma(a)) - lower
    big = ~small
    if big.any():
        yb = y[big]
        # Lentz on the standard CF: Gamma(a,y) = e^-y y^a / (y+1-a- 1(1-a)/(y+3-a- ...))
        tiny = 1e-300
        b = yb + 1.0 - a
        c = np.full(yb.shape, 1.0 / tiny, dtype=np.complex128)
        d = 1.0 / np.where(np.abs(b) > tiny, b, tiny)
        h = d.copy()
        for i in range(1, 300):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < tiny, tiny, d)
            c = b + an / c
            c = np.where(np.abs(c) < tiny, tiny, c)
            d = 1.0 / d
            delta = d * c
            h *= delta
            if np.max(np.abs(delta - 1.0)) < 1e-16:
                break
        out[big] = np.exp(-yb + a * np.log(yb)) * h
    return out


def hurwitz_zeta(s: complex, a, n_terms: int | None = None,
                 n_bernoulli: int = 12) -> complex | np.ndarray:
    """Hurwitz zeta(s, a) for complex s != 1 and real a in (0, 1] (array ok).

    Euler-Maclaurin: n_terms initial terms, then the integral + boundary +
    n_bernoulli correction terms at the shifted point a + M.  Absolute
    accuracy ~1e-13 for |s| <= 50 with the default M.
    """
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise ValueError("hurwitz_zeta pole at s = 1")
    a_arr = np.atleast_1d(np.asarray(a, dtype=np.float64))
    if np.any((a_arr <= 0) | (a_arr > 1)):
        raise ValueError("hurwitz_zeta expects a in (0, 1]")
    M = n_terms if n_terms is not None else max(
        20, int(abs(s.imag)) + 10, int(0.8 * abs(s.real)) + 10)

    # sum of the first M terms, chunked so the (M, len(a)) matrix stays small
    total = np.zeros(a_arr.shape, dtype=np.complex128)
    chunk = max(1, 4_000_000 // max(len(a_arr), 1))
    for k0 in range(0, M, chunk):
        ks = np.arange(k0, min(k0 + chunk, M), dtype=np.float64)
        total += np.sum((a_arr[None, :] + ks[:, None]) ** (-s), axis=0)

    x = a_arr + M
    total += x ** (1.0 - s) / (s - 1.0)
    total += 0.5 * x ** (-s)
    # Bernoulli corrections: B_2j/(2j)! * s(s+1)...(s+2j-2) * x^(-s-2j+1)
    poch = s  # (s)_{2j-1} built incrementally
    xp = x ** (-s - 1.0)
    fact = 1.0
    for j in range(1, n_bernoulli + 1):
        fact *= (2 * j - 1) * (2 * j)
        total += (_B2J[j - 1] / fact) * poch * xp
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        xp = xp / (x * x)
    if np.ndim(a) == 0:
        return complex(total[0])
    return total


def zeta(s: complex) -> complex:
    """Riemann zeta via hurwitz_zeta(s, 1)."""
    return complex(hurwitz_zeta(s, 1.0))


def zeta_2removed(s: complex) -> complex:
    """zeta_(2)(s) = zeta(s) (1 - 2^-s): the Euler factor at 2 removed."""
    return zeta(s) * (1.0 - 2.0 ** (-complex(s)))


ZETA2 = math.pi ** 2 / 6.0


# ---------------------------------------------------------------------------
# Gamma factors
# ---------------------------------------------------------------------------

def _gamma_ratio(num: complex, den: complex) -> complex:
    """Gamma(num)/Gamma(den) with pole/zero bookkeeping."""
    def is_nonpos_int(z: complex) -> bool:
        return z.imag == 0.0 and z.real <= 0 and z.real == int(z.real)
    if is_nonpos_int(num):
        if is_nonpos_int(den):
            raise ValueError("gamma ratio 0/0 at a double pole")
        raise ValueError(f"gamma factor pole: Gamma({num}) diverges")
    if is_nonpos_int(den):
        return 0.0
    return complex(np.exp(sps.loggamma(num) - sps.loggamma(den)))


def X_plus(s: complex) -> complex:
    """X_+(s) = (pi/8)^(s-1/2) Gamma((1-s)/2) / Gamma(s/2)."""
    s = complex(s)
    return ((math.pi / 8.0) ** (s - 0.5)) * _gamma_ratio((1 - s) / 2, s / 2)


def Y_plus(s: complex) -> complex:
    """Y_+(s) = pi^(s-1/2) Gamma((1-s)/2) / Gamma(s/2)."""
    s = complex(s)
    return (math.pi ** (s - 0.5)) * _gamma_ratio((1 - s) / 2, s / 2)


def Y_minus(s: complex) -> complex:
    """Y_-(s) = -i pi^(s-1/2) Gamma((2-s)/2) / Gamma((1+s)/2)."""
    s = complex(s)
    return -1j * (math.pi ** (s - 0.5)) * _gamma_ratio((2 - s) / 2, (1 + s) / 2)


_GAMMA_FACTORS = {"X_plus": X_plus, "Y_plus": Y_plus, "Y_minus": Y_minus}


def gamma_factor(kind: str, s: complex) -> complex:
    """Evaluate one of {X_plus, Y_plus, Y_minus} at s."""
    try:
        f = _GAMMA_FACTORS[kind]
    except KeyError:
        raise ValueError(f"unknown gamma factor {kind!r}") from None
    return f(s)


def X_plus_prime_half() -> float:
    """X_+'(1/2) = log(pi/8) - psi(1/4)."""
    return math.log(math.pi / 8.0) - digamma(0.25)
