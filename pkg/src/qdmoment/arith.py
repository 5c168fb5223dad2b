"""Exact integer arithmetic: sieves, Kronecker symbols, characters, Gauss sums.

Provides:
- FactorTable: smallest-prime-factor sieve with square-free flags
- kronecker / kronecker_many: extended Kronecker symbol (a/n), scalar and vectorized
- CharSpec: the small set of characters used throughout (psi_0, psi_{+-1},
  psi_{+-2}, bottom-symbol (./n), top-symbol (m/.)) plus tabulated products
- a_t: the multiplier prod_{p|n} (1 - p^(-t))^(-1)
- tau_definitional / tau_row: Gauss sums tau(chi,k) by the defining sum / by FFT
- gauss_G: the normalized Gauss sum G((./n),k), multiplicative in n, evaluated
  from its five-case prime-power table
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_TABLE_LIMIT = 20_000_000

# bits at odd positions (within int64); (2^v & _ODD_BIT_MASK) != 0  <=>  v odd
_ODD_BIT_MASK = np.int64(0x2AAAAAAAAAAAAAAA)


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (Eratosthenes)."""
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p:: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


class FactorTable:
    """Smallest-prime-factor sieve up to `limit`, plus square-free flags.

    spf[n] is the smallest prime factor of n (n >= 2); spf[p] = p for primes.
    Immutable after construction; safe to share across worker processes.
    """

    def __init__(self, limit: int = DEFAULT_TABLE_LIMIT):
        if limit < 2:
            raise ValueError("FactorTable limit must be >= 2")
        self.limit = int(limit)
        spf = np.zeros(self.limit + 1, dtype=np.uint32)
        for p in range(2, math.isqrt(self.limit) + 1):
            if spf[p] == 0:
                block = spf[p * p:: p]
                block[block == 0] = p
        rest = np.flatnonzero(spf[2:] == 0) + 2
        spf[rest] = rest
        self.spf = spf

        sf = np.ones(self.limit + 1, dtype=bool)
        sf[0] = False
        for p in range(2, math.isqrt(self.limit) + 1):
            if spf[p] == p:
                sf[p * p:: p * p] = False
        self.squarefree = sf

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of n <= limit as [(p, e), ...], p ascending."""
        if not 1 <= n <= self.limit:
            raise ValueError(f"n={n} outside table range [1, {self.limit}]")
        out = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def is_squarefree(self, n: int) -> bool:
        if not 1 <= n <= self.limit:
            raise ValueError(f"n={n} outside table range [1, {self.limit}]")
        return bool(self.squarefree[n])

    def mobius(self, n: int) -> int:
        if not self.is_squarefree(n):
            return 0
        return -1 if len(self.factorize(n)) % 2 else 1

    def radical(self, n: int) -> int:
        return math.prod(p for p, _ in self.factorize(n))


def squarefree_odd(lo: int, hi: int, table: FactorTable) -> np.ndarray:
    """Odd square-free d in [lo, hi], ascending (int64 array).

    Requires hi <= table.limit.
    """
    if hi > table.limit:
        raise ValueError(f"hi={hi} exceeds table limit {table.limit}")
    if hi < lo or hi < 1:
        return np.array([], dtype=np.int64)
    lo = max(lo, 1)
    d = np.arange(lo | 1, hi + 1, 2, dtype=np.int64)
    return d[table.squarefree[d]]


# ---------------------------------------------------------------------------
# Kronecker symbol
# ---------------------------------------------------------------------------

def kronecker(a: int, n: int) -> int:
    """Extended Kronecker symbol (a/n) for arbitrary integers, (0,0) rejected.

    Conventions: (a/1) = (a/-1 for a>=0) = 1, (a/-1) = -1 for a < 0,
    (a/2) per a mod 8, multiplicative in both arguments.
    """
    if a == 0 and n == 0:
        raise ValueError("kronecker(0, 0) is undefined")
    if n == 0:
        return 1 if abs(a) == 1 else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # factor out the even part of n
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        e = 0
        while n % 2 == 0:
            n //= 2
            e += 1
        if e % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    return sign * _jacobi(a % n, n)


def _jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1, 0 <= a < n."""
    s = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                s = -s
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            s = -s
        a %= n
    return s if n == 1 else 0


def kronecker_many(a, n) -> np.ndarray:
    """Vectorized (a/n) for odd positive n (int64 arrays, broadcastable).

    This is the hot path of the moment engine: a binary Jacobi loop over the
    still-active lanes, compacting as lanes finish.
    """
    a0, n0 = np.broadcast_arrays(np.asarray(a, dtype=np.int64),
                                 np.asarray(n, dtype=np.int64))
    if np.any((n0 <= 0) | (n0 % 2 == 0)):
        raise ValueError("kronecker_many requires odd positive n")
    shape = a0.shape
    a0 = np.ascontiguousarray(a0).ravel()
    n0 = np.ascontiguousarray(n0).ravel()
    out = np.zeros(a0.size, dtype=np.int8)

    a0 = a0 % n0  # nonneg since n0 > 0
    sign = np.ones(a0.size, dtype=np.int8)
    idx = np.arange(a0.size)
    aa, nn = a0, n0
    while aa.size:
        # finished lanes: aa == 0 -> symbol is sign if nn == 1 else 0
        done = aa == 0
        if done.any():
            fin = idx[done]
            out[fin] = np.where(nn[done] == 1, sign[done], 0)
            keep = ~done
            aa, nn, sign, idx = aa[keep], nn[keep], sign[keep], idx[keep]
            if not aa.size:
                break
        # strip the full 2-power of aa in one step
        low = aa & -aa
        flip = ((low & _ODD_BIT_MASK) != 0) & ((nn & 7 == 3) | (nn & 7 == 5))
        np.negative(sign, out=sign, where=flip)
        aa = aa // low
        # reciprocity flip, swap, reduce
        flip = (aa & 3 == 3) & (nn & 3 == 3)
        np.negative(sign, out=sign, where=flip)
        aa, nn = nn % aa, aa
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharSpec:
    """One of the characters used by the series machinery.

    kind is one of {"psi0", "psi1", "psi-1", "psi2", "psi-2", "bottom", "top"};
    param is the defining integer for bottom(n): k -> (k/n) and
    top(m): k -> (m/k), ignored otherwise.
    """

    kind: str
    param: int = 0

    def __post_init__(self):
        if self.kind not in ("psi0", "psi1", "psi-1", "psi2", "psi-2",
                             "bottom", "top"):
            raise ValueError(f"unknown character kind {self.kind!r}")
        if self.kind == "bottom" and self.param < 1:
            raise ValueError("bottom(n) needs n >= 1")
        if self.kind == "top" and self.param == 0:
            raise ValueError("top(m) needs m != 0")

    @property
    def modulus(self) -> int:
        if self.kind == "psi0":
            return 1
        if self.kind in ("psi1", "psi-1"):
            return 4
        if self.kind in ("psi2", "psi-2"):
            return 8
        m = abs(self.param)
        # (./n) and (m/.) are periodic mod m unless m = 2 mod 4, then mod 4m
        return m if m % 4 != 2 else 4 * m

    @property
    def even(self) -> bool:
        q = self.modulus
        if q == 1:
            return True
        return self(q - 1) == 1

    def __call__(self, k: int) -> int:
        if self.kind == "psi0":
            return 1
        if self.kind == "psi1":
            return k & 1
        if self.kind == "psi-1":
            return 0 if k % 2 == 0 else (1 if k % 4 == 1 else -1)
        if self.kind == "psi2":
            return 0 if k % 2 == 0 else (1 if k % 8 in (1, 7) else -1)
        if self.kind == "psi-2":
            return 0 if k % 2 == 0 else (1 if k % 8 in (1, 3) else -1)
        if self.kind == "bottom":
            return kronecker(k, self.param)
        return kronecker(self.param, k)

    def values_mod(self) -> np.ndarray:
        """Values at 0, 1, ..., modulus-1 as an int8 array."""
        q = self.modulus
        return np.array([self(k) for k in range(q)], dtype=np.int8)

    def values_up_to(self, n: int) -> np.ndarray:
        """Values at 0, 1, ..., n (periodic extension of values_mod)."""
        vm = self.values_mod()
        reps = n // self.modulus + 1
        return np.tile(vm, reps)[: n + 1]

    @property
    def is_principal(self) -> bool:
        vm = self.values_mod()
        return bool(np.all(vm[vm != 0] == 1))


PSI0 = CharSpec("psi0")
PSI1 = CharSpec("psi1")
PSI_M1 = CharSpec("psi-1")
PSI2 = CharSpec("psi2")
PSI_M2 = CharSpec("psi-2")


def chi_8d(d: int) -> CharSpec:
    """The family character n -> (8d/n)."""
    return CharSpec("top", 8 * d)


@dataclass(frozen=True)
class TabulatedChar:
    """A character given by its value table mod q (products like (4k/.) psi)."""

    modulus: int
    table: tuple  # values at 0..q-1

    def __call__(self, k: int) -> complex:
        return self.table[k % self.modulus]

    def values_mod(self) -> np.ndarray:
        return np.asarray(self.table)

    @property
    def even(self) -> bool:
        return self.table[(self.modulus - 1) % self.modulus] == 1

    @property
    def is_principal(self) -> bool:
        vm = np.asarray(self.table)
        return bool(np.all(vm[vm != 0] == 1))


def product_char(m: int, psi: CharSpec) -> TabulatedChar:
    """The real character k -> (m/k) psi(k), tabulated mod lcm(mod(m/.), mod psi)."""
    top = CharSpec("top", m)
    q = math.lcm(top.modulus, psi.modulus)
    ks = np.arange(q)
    vals = np.array([top(int(k)) * psi(int(k)) for k in ks], dtype=np.int8)
    return TabulatedChar(q, tuple(int(v) for v in vals))


def char_square(chi: TabulatedChar | CharSpec) -> TabulatedChar:
    """chi^2 (principal on the support of chi)."""
    vm = chi.values_mod()
    return TabulatedChar(int(chi.modulus), tuple(int(v) ** 2 for v in vm))


# ---------------------------------------------------------------------------
# a_t(n) = prod_{p | n} (1 - p^(-t))^(-1)
# ---------------------------------------------------------------------------

def a_t(n: int, t: complex, table: FactorTable | None = None) -> complex:
    """The multiplier prod_{p|n} (1 - p^(-t))^(-1); a_t(1) = 1.

    Raises ZeroDivisionError-style ValueError when p^t = 1 for some p | n.
    """
    if n < 1:
        raise ValueError("a_t requires n >= 1")
    if n == 1:
        return 1.0
    if table is not None and n <= table.limit:
        ps = [p for p, _ in table.factorize(n)]
    else:
        ps = _trial_prime_divisors(n)
    out = 1.0 + 0.0j
    for p in ps:
        factor = 1.0 - p ** (-complex(t))
        if abs(factor) < 1e-15:
            raise ValueError(f"a_t singular: p^t = 1 at p={p}, t={t}")
        out /= factor
    return out if isinstance(t, complex) or np.iscomplexobj(t) else out.real


def _trial_prime_divisors(n: int) -> list[int]:
    ps = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            ps.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        ps.append(n)
    return ps


# ---------------------------------------------------------------------------
# Gauss sums
# ---------------------------------------------------------------------------

TAU_ORACLE_LIMIT = 100_000


def tau_definitional(chi, k: int) -> complex:
    """tau(chi, k) = sum_{j mod q} chi(j) e(jk/q) by the O(q) defining sum.

    The oracle for gauss_G; modulus capped at TAU_ORACLE_LIMIT.
    """
    q = chi.modulus
    if q > TAU_ORACLE_LIMIT:
        raise ValueError(f"modulus {q} above the definitional-sum limit")
    vals = chi.values_mod().astype(np.complex128)
    j = np.arange(q)
    return complex(np.sum(vals * np.exp(2j * np.pi * (j * (k % q)) / q)))


def tau_row(chi) -> np.ndarray:
    """tau(chi, k) for k = 0..q-1 in one FFT (complex128 array)."""
    q = chi.modulus
    vals = chi.values_mod().astype(np.complex128)
    return np.fft.ifft(vals) * q


def gauss_G_prime_power(p: int, j: int, k: int) -> complex:
    """G((./p^j), k) for an odd prime p from the five-case evaluation table."""
    if k == 0:
        a = j + 1  # treat v_p(0) as infinite: always in the j <= a branch
    else:
        a = 0
        kk = abs(k)
        while kk % p == 0:
            kk //= p
            a += 1
    if j <= a:
        if j % 2 == 0:
            return float(p ** j - p ** (j - 1))  # phi(p^j)
        return 0.0
    if j == a + 1:
        if j % 2 == 0:
            return float(-(p ** a))
        return kronecker(k // p ** a, p) * p ** a * math.sqrt(p)
    return 0.0


def gauss_G(n: int, k: int, table: FactorTable) -> complex:
    """G((./n), k) for odd n >= 1, assembled multiplicatively over p^j || n."""
    if n < 1 or n % 2 == 0:
        raise ValueError("gauss_G requires odd n >= 1")
    out = 1.0
    for p, e in table.factorize(n):
        out *= gauss_G_prime_power(p, e, k)
        if out == 0.0:
            return 0.0
    return out


def tau_from_G(n: int, k: int, table: FactorTable) -> complex:
    """tau((./n), k) from G((./n), k): equal for n = 1 mod 4, i*G for n = 3 mod 4."""
    g = gauss_G(n, k, table)
    return g if n % 4 == 1 else 1j * g
