"""The double Dirichlet series A(s,w), the B-series family, and the
identity / functional-equation / residue checks that tie them together.

A(s,w) = sum*_{d odd} L(s, chi_8d) / d^w has two computable representations:

- A_direct:    straight sum over odd square-free d (smoothed-series L-values)
- A_via_chars: (1/zeta(2w)) sum_n (8/n) L(w, (./4n)) a_2w(4n) / n^s

B(s,w;t,psi,psi') = sum_{n,k} G((./n),k) a_t(n) psi(n) psi'(k) / (n^(s+1/2) k^w)
is evaluated two ways as well: the literal double sum (B_double, exploiting
that G((./p^j),k) = 0 for j >= 2 unless p | k, so n = a b with a square-free
prime-to-k and b built from primes of k), and the Euler-product form over the
k-sum (B_product_rep) whose n-sum is a finite product of L-ratios times the
correction products E_N and P(s,t,k;psi).

Residues in w (at w = 1) and in t (at t = 1 - s) are extracted numerically by
Richardson extrapolation and compared against their closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import (
    PSI0,
    PSI1,
    PSI2,
    PSI_M1,
    PSI_M2,
    CharSpec,
    FactorTable,
    TabulatedChar,
    a_t,
    gauss_G_prime_power,
    kronecker,
    kronecker_many,
    product_char,
    squarefree_odd,
)
from .eulerprod import (
    DEFAULT_PMAX,
    R1,
    _log1p_stable,
    _pc,
    _primes,
    eval_product,
    prime_zeta,
    prime_zeta_tail,
)
from .lfun import central_values_batch, general_values_batch, l_oracle
from .specfun import ZETA2, X_plus, zeta

_PSI_BY_NAME = {"psi0": PSI0, "psi1": PSI1, "psi-1": PSI_M1, "psi2": PSI2,
                "psi-2": PSI_M2}


@dataclass
class SeriesEval:
    """A truncated series value with bookkeeping for its convergence check."""

    value: complex
    terms_used: int
    tail_estimate: float
    region_tag: str


# ---------------------------------------------------------------------------
# A(s, w): two representations
# ---------------------------------------------------------------------------

ORACLE_D_LIMIT = 12_000  # keeps the chi_8d modulus inside the oracle cap


def _a_direct_chunk(args):
    s, w, db, method, cutoff = args
    if method == "central":
        lv = central_values_batch(db, cutoff=cutoff)
    elif method == "afe":
        lv = general_values_batch(s, db, cutoff=cutoff)
    else:
        from .arith import chi_8d
        from .lfun import l_oracle_many
        lv = l_oracle_many(s, [chi_8d(int(d)) for d in db])
    return complex(np.sum(lv * db.astype(np.float64) ** (-w)))


def A_direct(s: complex, w: complex, d_max: int, table: FactorTable,
             cutoff: float = 40.0, method: str = "auto",
             workers: int = 1) -> SeriesEval:
    """A(s,w) = sum over odd square-free d <= d_max of L(s, chi_8d) d^-w.

    method: "central" (smoothed series, s = 1/2 only), "oracle" (Hurwitz,
    d <= 12000; the independent route used by the functional-equation
    check), "afe" (general-s smoothed series), or "auto".
    """
    s, w = complex(s), complex(w)
    if w.real <= max(1.0, 1.5 - s.real) + 0.2:
        raise ValueError("A_direct outside its region: need "
                         "Re w > max(1, 3/2 - Re s) + 0.2")
    if d_max > 1_000_000:
        raise ValueError("d_max capped at 1e6")
    if 2 * d_max > table.limit:
        raise ValueError("FactorTable too small for d_max")
    central = s == 0.5 or (s.real == 0.5 and s.imag == 0.0)
    if method == "auto":
        method = "central" if central else (
            "oracle" if d_max <= ORACLE_D_LIMIT else "afe")
    if method == "central" and not central:
        raise ValueError("central method needs s = 1/2")
    if method == "oracle" and 8 * d_max > 100_000:
        raise ValueError("oracle method needs d_max <= 12500")
    ds = squarefree_odd(1, d_max, table)
    chunk = 128 if method == "oracle" else 4096
    jobs = [(s, w, ds[i0: i0 + chunk], method, cutoff)
            for i0 in range(0, ds.size, chunk)]
    if workers > 1 and len(jobs) > 1:
        from multiprocessing import Pool
        with Pool(workers) as pool:
            parts = pool.map(_a_direct_chunk, jobs)
    else:
        parts = [_a_direct_chunk(j) for j in jobs]
    total = complex(sum(parts))
    sigma = w.real
    tail = 0.5 * d_max ** (1.0 - sigma) / (sigma - 1.0)
    return SeriesEval(total, int(ds.size), tail, f"direct/{method}")


def _l_w_4n_batch(w: complex, ns: np.ndarray) -> np.ndarray:
    """L(w, (./4n)) for a batch of odd n: equals (1 - (2/n) 2^-w) L(w, (./n)),
    with the inner values from one flat Hurwitz evaluation."""
    from .specfun import hurwitz_zeta

    w = complex(w)
    xs, wts, seg = [], [], []
    for n in ns:
        n = int(n)
        if n == 1:
            xs.append(np.array([1.0]))
            wts.append(np.array([1.0]))
        else:
            a = np.arange(1, n + 1)
            vals = kronecker_many(a, np.full(a.shape, n)).astype(np.float64)
            sup = np.flatnonzero(vals)
            xs.append((sup + 1.0) / n)
            wts.append(vals[sup])
        seg.append(xs[-1].size)
    flat = np.concatenate(xs)
    fw = np.concatenate(wts)
    hz = hurwitz_zeta(w, flat)
    parts = fw * hz
    out = np.empty(ns.size, dtype=np.complex128)
    pos = 0
    two_w = 2.0 ** (-w)
    for i, (n, m) in enumerate(zip(ns, seg)):
        n = int(n)
        ln = n ** (-w) * parts[pos: pos + m].sum()
        out[i] = (1.0 - kronecker(2, n) * two_w) * ln
        pos += m
    return out


def A_via_chars(s: complex, w: complex, n_max: int,
                table: FactorTable, workers: int = 1) -> SeriesEval:
    """A(s,w) = (1/zeta(2w)) sum_{n odd} (8/n) L(w,(./4n)) a_2w(4n) n^-s."""
    s, w = complex(s), complex(w)
    if s.real <= 1.2 or w.real <= 1.0 or (s + w).real <= 1.5:
        raise ValueError("A_via_chars outside its region: need Re s > 1.2, "
                         "Re w > 1, Re(s+w) > 3/2")
    if n_max > 20_000:
        raise ValueError("n_max capped at 2e4 (oracle moduli)")
    ns = np.arange(1, n_max + 1, 2, dtype=np.int64)
    chi8 = np.array([kronecker(8, int(n)) for n in ns], dtype=np.float64)
    a2w = np.array([a_t(4 * int(n), 2 * w, table) for n in ns],
                   dtype=np.complex128)
    if 4 * n_max > table.limit:
        raise ValueError("FactorTable too small for the a_t(4n) factors")
    chunk = 512
    blocks = [ns[i: i + chunk] for i in range(0, ns.size, chunk)]
    if workers > 1:
        from multiprocessing import Pool
        with Pool(workers) as pool:
            lvals = pool.starmap(_l_w_4n_batch,
                                 [(w, blk) for blk in blocks])
    else:
        lvals = [_l_w_4n_batch(w, blk) for blk in blocks]
    lw = np.concatenate(lvals)
    total = np.sum(chi8 * lw * a2w * ns.astype(np.float64) ** (-s)) / zeta(2 * w)
    sigma = s.real
    tail = 1.5 * n_max ** (1.0 - sigma) / (sigma - 1.0)
    return SeriesEval(complex(total), int(ns.size), tail, "via_chars")


def check_fe_s(s: complex, w: complex, d_max: int, table: FactorTable,
               workers: int = 1) -> float:
    """|A(s,w) - X_+(s) A(1-s, s+w-1/2)| by two A_direct evaluations.

    Both sides use the Hurwitz-oracle route so they are genuinely
    independent evaluations at s and 1-s (the smoothed-series route has the
    functional equation built into its construction and would be circular).
    """
    s, w = complex(s), complex(w)
    lhs = A_direct(s, w, d_max, table, method="oracle", workers=workers).value
    rhs = X_plus(s) * A_direct(1 - s, s + w - 0.5, d_max, table,
                               method="oracle", workers=workers).value
    return abs(lhs - rhs)


def _neville_to_zero(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0."""
    xs = [float(x) for x in xs]
    ys = list(ys)
    n = len(xs)
    for m in range(1, n):
        for i in range(n - m):
            ys[i] = ((0.0 - xs[i + m]) * ys[i] + (xs[i] - 0.0) * ys[i + 1]) \
                / (xs[i] - xs[i + m])
    return ys[0]


def residue_A_w1(s: float, n_max: int, table: FactorTable,
                 deltas=(0.02, 0.01, 0.005), workers: int = 1) -> complex:
    """Residue of A(s, w) at w = 1 as the Richardson limit of
    (w-1) A_via_chars(s, w); compare with eulerprod.R1(s)."""
    if s <= 1.2:
        raise ValueError("residue_A_w1 needs s > 1.2")
    gs = [d * A_via_chars(s, 1.0 + d, n_max, table, workers).value
          for d in deltas]
    return _neville_to_zero(deltas, gs)


# ---------------------------------------------------------------------------
# B(s,w;t,psi,psi'): literal double sum
# ---------------------------------------------------------------------------

def _psi_resolve(psi) -> CharSpec:
    if isinstance(psi, str):
        return _PSI_BY_NAME[psi]
    return psi


def _b_lattice(k: int, s: complex, t: complex, psi: CharSpec,
               table: FactorTable, n_max: int):
    """All b = prod p^j (p odd prime | k) with nonzero G((./b),k), b <= n_max.

    Yields (b, weight) with weight = G((./b),k) psi(b) a_t(b) b^-(s+1/2) and
    b's residue mod 4 available from b itself.
    """
    odd_pp = [(p, e) for p, e in table.factorize(k) if p != 2]
    choices = []
    for p, e in odd_pp:
        opts = [(0, 1.0)]  # j = 0: factor 1
        for j in range(1, e + 2):
            g = gauss_G_prime_power(p, j, k)
            if g != 0.0 and p ** j <= n_max:
                opts.append((j, g))
        choices.append((p, opts))
    out = [(1, 1.0 + 0.0j)]
    for p, opts in choices:
        nxt = []
        for b, gval in out:
            for j, g in opts:
                nb = b * p ** j
                if nb <= n_max:
                    nxt.append((nb, gval * g))
        out = nxt
    for b, gval in out:
        wt = gval * psi(b) * a_t(b, t, table) * b ** (-(complex(s) + 0.5))
        if wt != 0.0:
            yield b, wt


def _squarefree_profile(n_max: int, s: complex, t: complex,
                        table: FactorTable):
    """Sorted odd square-free a <= n_max and the weights a_t(a) a^-s."""
    a_sf = squarefree_odd(1, n_max, table)
    at = np.ones(a_sf.size, dtype=np.complex128)
    # multiplicative fill: each odd prime contributes (1 - p^-t)^-1 once
    # (entries are square-free so no higher powers occur)
    idx_of = np.full(n_max + 1, -1, dtype=np.int64)
    idx_of[a_sf] = np.arange(a_sf.size)
    primes = _primes(n_max)
    for p in primes[primes > 2]:
        fac = 1.0 / (1.0 - float(p) ** (-complex(t)))
        hits = idx_of[p:: 2 * p]  # odd multiples of p
        hits = hits[hits >= 0]
        at[hits] *= fac
    wa = at * a_sf.astype(np.float64) ** (-complex(s))
    return a_sf, wa


def B_double(s: complex, w: complex, t: complex, psi, psi_prime,
             n_max: int, k_max: int, table: FactorTable) -> SeriesEval:
    """The literal double sum over (n, k), using that the n-sum column for a
    fixed k is supported on n = a b with a odd square-free prime to k and b
    composed of odd primes of k."""
    s, w, t = complex(s), complex(w), complex(t)
    psi, psi_prime = _psi_resolve(psi), _psi_resolve(psi_prime)
    if s.real <= 1.5 or w.real <= 1.5 or t.real <= 0:
        raise ValueError("B_double region: Re s > 3/2, Re w > 3/2, Re t > 0")
    a_sf, wa = _squarefree_profile(n_max, s, t, table)
    vm = psi.values_mod().astype(np.float64)
    psi_a = vm[a_sf % psi.modulus] if psi.modulus > 1 else np.ones(a_sf.size)
    base = wa * psi_a
    total = 0.0 + 0.0j
    terms = 0
    for k in range(1, k_max + 1):
        pk = psi_prime(k)
        if pk == 0:
            continue
        kron = kronecker_many(np.full(a_sf.shape, k, dtype=np.int64), a_sf)
        cum = np.concatenate(([0.0 + 0.0j], np.cumsum(kron * base)))
        inner = 0.0 + 0.0j
        for b, wt_b in _b_lattice(k, s, t, psi, table, n_max):
            hi = np.searchsorted(a_sf, n_max // b, side="right")
            inner += wt_b * cum[hi]
            terms += hi
        total += pk * float(k) ** (-w) * inner
    # crude reported tail: |G| <= n d(k) comparison sum (heuristic only)
    sig = s.real
    tail_n = n_max ** (1.0 - sig) / max(sig - 1.0, 0.1)
    tail_k = k_max ** (1.0 - w.real) / (w.real - 1.0)
    return SeriesEval(complex(total), terms, 8.0 * (tail_n + tail_k),
                      "B_double")


# ---------------------------------------------------------------------------
# B_pm: the K-series form of B_+ / B_- and the four-B decomposition
# ---------------------------------------------------------------------------

def B_pm_kseries(sign: int, s: complex, w: complex, t: complex,
                 n_max: int, k_max: int, table: FactorTable) -> complex:
    """B_pm(s,w;t) summed literally from
    (1/2) sum_{n = +-1 mod 4, k} tau((./4n),k) a_t(4n) psi_2(n) / (n^(s+1/2) k^w),
    with tau((./4n),k) reduced to G((./n),k) by the 2-adic evaluation and
    tau = G or iG according to n mod 4."""
    s, w, t = complex(s), complex(w), complex(t)
    a_sf, wa = _squarefree_profile(n_max, s, t, table)
    psi2_a = np.array([PSI2(int(a)) for a in a_sf]).astype(np.float64)
    base = wa * psi2_a
    m1 = (a_sf % 4 == 1)
    at2 = a_t(2, t)
    eps = 1.0 if sign > 0 else 1.0j
    total = 0.0 + 0.0j
    for k in range(1, k_max + 1):
        if k % 2 == 1:
            continue  # tau((./4n), k) = 0 for odd k
        ck = 2.0 if k % 4 == 0 else -2.0
        kron = kronecker_many(np.full(a_sf.shape, k, dtype=np.int64), a_sf)
        c1 = np.concatenate(([0j], np.cumsum(np.where(m1, kron * base, 0))))
        c3 = np.concatenate(([0j], np.cumsum(np.where(~m1, kron * base, 0))))
        inner = 0.0 + 0.0j
        for b, wt_b in _b_lattice(k, s, t, PSI2, table, n_max):
            hi = np.searchsorted(a_sf, n_max // b, side="right")
            if (b % 4 == 1) == (sign > 0):
                inner += wt_b * c1[hi]  # a = 1 mod 4 keeps n in the class
            else:
                inner += wt_b * c3[hi]
        total += ck * float(k) ** (-w) * inner
    return complex(0.5 * eps * at2 * total)


def B_pm_decomposition(sign: int, s: complex, w: complex, t: complex,
                       n_max: int, k_max: int, table: FactorTable) -> complex:
    """The same B_pm through the four-character decomposition
    (eps a_t(2)/(2 4^w)) (B(psi2,psi0) +- B(psi-2,psi0))
    - (eps a_t(2)/(2 2^w)) (B(psi1,psi1) +- B(psi-1,psi1))."""
    s, w, t = complex(s), complex(w), complex(t)
    eps = 1.0 if sign > 0 else 1.0j
    sg = 1.0 if sign > 0 else -1.0
    at2 = a_t(2, t)
    b20 = B_double(s, w, t, PSI2, PSI0, n_max, k_max, table).value
    bm20 = B_double(s, w, t, PSI_M2, PSI0, n_max, k_max, table).value
    b11 = B_double(s, w, t, PSI1, PSI1, n_max, k_max, table).value
    bm11 = B_double(s, w, t, PSI_M1, PSI1, n_max, k_max, table).value
    return complex(eps * at2 / (2 * 4 ** w) * (b20 + sg * bm20)
                   - eps * at2 / (2 * 2 ** w) * (b11 + sg * bm11))


def B_pm_consistency(s: complex, w: complex, t: complex, table: FactorTable,
                     n_max: int = 20_000, k_max: int = 2_000) -> dict:
    """Discrepancy between the K-series form and the decomposition, both
    signs.  The K-series k-window is 4x wider so the exact term
    rearrangement k -> {4k, 2k_odd} is covered."""
    out = {}
    for sign, name in ((1, "+"), (-1, "-")):
        lhs = B_pm_kseries(sign, s, w, t, n_max, 4 * k_max, table)
        rhs = B_pm_decomposition(sign, s, w, t, n_max, k_max, table)
        out[name] = abs(lhs - rhs)
    return out


# ---------------------------------------------------------------------------
# Euler-product representation of the n-sum (finite product of L-ratios)
# ---------------------------------------------------------------------------

def _chi_on_primes(primes: np.ndarray, chi) -> np.ndarray:
    """Character values at the primes by periodic table lookup."""
    vm = chi.values_mod().astype(np.float64)
    return vm[primes % chi.modulus]


def _L_smart(v: complex, chi: TabulatedChar) -> complex:
    """L(v, chi): direct short sum for Re v >= 6 (tail < 3e-15), Hurwitz
    oracle otherwise."""
    v = complex(v)
    if v.real >= 6.0:
        m = np.arange(1, 257, dtype=np.float64)
        vals = chi.values_mod()
        return complex(np.sum(vals[np.arange(1, 257) % chi.modulus]
                              * m ** (-v)))
    return l_oracle(v, chi)


def _L_principal_on_support(v: complex, modulus_primes) -> complex:
    """L(v, chi^2) for real chi mod q: zeta(v) prod_{p|q} (1 - p^-v)."""
    out = zeta(v)
    for p in modulus_primes:
        out *= (1.0 - float(p) ** (-complex(v)))
    return complex(out)


def prime_char_sum(theta: complex, chi: TabulatedChar,
                   modulus_primes) -> complex:
    """sum_p chi(p) p^-theta for Re theta > 1, by mu-weighted log L values.

    Even powers chi^(2k) are principal on the support, handled in closed form.
    """
    theta = complex(theta)
    if theta.real <= 1.0:
        raise ValueError("prime_char_sum needs Re theta > 1")
    from .eulerprod import _MU_SMALL
    total = 0.0 + 0.0j
    for k in range(1, 41):
        mu = _MU_SMALL[k]
        if mu == 0:
            continue
        v = k * theta
        if k % 2 == 0:
            lv = _L_principal_on_support(v, modulus_primes)
        else:
            lv = _L_smart(v, chi)
        term = mu * np.log(lv) / k
        total += term
        if k > 3 and abs(term) < 1e-18:
            break
    return complex(total)


def _x_E1(p: np.ndarray, s: complex, t: complex, c: np.ndarray) -> np.ndarray:
    """E_1 factor minus 1 at chi(p) = c (values in {-1,0,1})."""
    ps, pt = _pc(p, s), _pc(p, t)
    c2 = c * c
    num = c * ps - c2 * pt + c2
    den = (_pc(p, s + t) + c) * (ps + c) * (pt - 1.0)
    return num / den


def _x_master(p: np.ndarray, s: complex, t: complex,
              c: np.ndarray) -> np.ndarray:
    """Master-product factor minus 1: chi(p)/((p^s + chi(p))(p^t - 1))."""
    return c / ((_pc(p, s) + c) * (_pc(p, t) - 1.0))


def _E1_terms(s: complex, t: complex, chi_cut: float = 1.95,
              chi0_cut: float = 2.65):
    """Extraction terms for log E_1: lists of (coeff, theta) for the
    chi-weighted and the principal-weighted prime sums."""
    chi_terms, chi0_terms = [], []
    for j in range(2, 40):
        th = s + j * t
        if 1.02 < th.real <= chi_cut:
            chi_terms.append((1.0, th))
        if th.real > chi_cut:
            break
    if 1.02 < (3 * s + t).real <= chi_cut:
        chi_terms.append((1.0, 3 * s + t))
    for j in range(1, 40):
        th = 2 * s + j * t
        if not 1.02 < th.real <= chi0_cut:
            if th.real > chi0_cut:
                break
            continue
        coeff = -1.0 if j <= 2 else (-2.0 if j == 3 else -(j + 1) / 2.0)
        chi0_terms.append((coeff, th))
    if 1.02 < (4 * s + t).real <= chi0_cut:
        chi0_terms.append((-1.0, 4 * s + t))
    return chi_terms, chi0_terms


def E1_char(s: complex, t: complex, chi, table: FactorTable,
            p_max: int = DEFAULT_PMAX, accelerated: bool = True) -> complex:
    """E_1(s, t; chi) by a (optionally accelerated) product over primes."""
    s, t = complex(s), complex(t)
    primes = _primes(p_max)
    pf = primes.astype(np.float64)
    c = _chi_on_primes(primes, chi)
    logf = _log1p_stable(_x_E1(pf, s, t, c))
    if not accelerated:
        return complex(np.exp(np.sum(logf)))
    chi_terms, chi0_terms = _E1_terms(s, t)
    qp = sorted({p for p, _ in table.factorize(chi.modulus)})
    onsup = np.abs(c) > 0.5
    total = np.sum(logf)
    for coeff, th in chi_terms:
        total -= coeff * np.sum(c * _pc(pf, -th))
        total += coeff * prime_char_sum(th, chi, qp)
    for coeff, th in chi0_terms:
        total -= coeff * np.sum(np.where(onsup, _pc(pf, -th), 0.0))
        full = prime_zeta(th) - sum(float(p) ** (-complex(th)) for p in qp)
        total += coeff * full
    return complex(np.exp(total))


def rec_factor(v: complex, chi, table: FactorTable,
               p_max: int = DEFAULT_PMAX, method: str = "direct") -> complex:
    """prod_p (1 + chi(p) p^-v)^-1.

    method="direct" multiplies over p <= p_max (fine when Re v is large);
    method="lratio" uses the Euler identity L(2v, chi^2)/L(v, chi).
    """
    v = complex(v)
    if method == "lratio":
        qp = sorted({p for p, _ in table.factorize(chi.modulus)})
        return complex(_L_principal_on_support(2 * v, qp) / _L_smart(v, chi))
    primes = _primes(p_max)
    pf = primes.astype(np.float64)
    c = _chi_on_primes(primes, chi)
    return complex(np.exp(-np.sum(_log1p_stable(c * _pc(pf, -v)))))


def E_N_char(s: complex, t: complex, N: int, chi, table: FactorTable,
             p_max: int = DEFAULT_PMAX, method: str = "direct") -> complex:
    """E_N by its recurrence: E_1 times prod_{j=2..N} (1 + chi p^-(s+jt))^-1."""
    if N < 1:
        raise ValueError("N >= 1")
    accelerated = method != "direct"
    out = E1_char(s, t, chi, table, p_max, accelerated=accelerated)
    for j in range(2, N + 1):
        out *= rec_factor(s + j * t, chi, table, p_max,
                          method="lratio" if accelerated else "direct")
    return out


def master_product_direct(s: complex, t: complex, chi,
                          p_max: int) -> complex:
    """prod_{p <= p_max} (1 + chi(p)/((p^s + chi(p))(p^t - 1)))."""
    primes = _primes(p_max)
    pf = primes.astype(np.float64)
    c = _chi_on_primes(primes, chi)
    return complex(np.exp(np.sum(_log1p_stable(_x_master(pf, s, t, c)))))


def P_finite(s: complex, t: complex, k: int, psi: CharSpec,
             table: FactorTable) -> complex:
    """P(s,t,k;psi) = prod_{p|k odd} (1 + a_t(p) sum_j G((./p^j),k) psi(p^j)
    / p^(j(s+1/2))); a finite product (G vanishes for j >= v_p(k) + 2)."""
    s, t = complex(s), complex(t)
    out = 1.0 + 0.0j
    for p, e in table.factorize(k):
        if p == 2:
            continue
        atp = 1.0 / (1.0 - float(p) ** (-t))
        inner = 0.0 + 0.0j
        for j in range(1, e + 2):
            g = gauss_G_prime_power(p, j, k)
            if g != 0.0:
                inner += g * psi(p ** j) * float(p) ** (-(s + 0.5) * j)
        out *= 1.0 + atp * inner
    return out


def B_product_rep(s: complex, w: complex, t: complex, psi, psi_prime,
                  N: int, k_max: int, table: FactorTable,
                  p_max: int = DEFAULT_PMAX,
                  method: str = "auto") -> SeriesEval:
    """B(s,w;t,psi,psi') with the n-sum replaced by its finite-product form:

        sum_k psi'(k) k^-w prod_{j=0..N} L(s+jt, (4k/.)psi)/L(2s+2jt, (.)^2)
              * E_N(s,t;(4k/.)psi) * P(s,t,k;psi).
    """
    s, w, t = complex(s), complex(w), complex(t)
    psi, psi_prime = _psi_resolve(psi), _psi_resolve(psi_prime)
    if k_max > 1_000:
        raise ValueError("k_max capped at 1e3 (oracle moduli 4k)")
    if method == "auto":
        method = "direct" if min((s + 2 * t).real, (2 * s + t).real) > 1.4 \
            else "accelerated"
    total = 0.0 + 0.0j
    for k in range(1, k_max + 1):
        pk = psi_prime(k)
        if pk == 0:
            continue
        chi = product_char(4 * k, psi)
        qp = sorted({p for p, _ in table.factorize(chi.modulus)})
        ratio = 1.0 + 0.0j
        for j in range(N + 1):
            v = s + j * t
            ratio *= _L_smart(v, chi) / _L_principal_on_support(2 * v, qp)
        en = E_N_char(s, t, N, chi, table, p_max, method=method)
        pf = P_finite(s, t, k, psi, table)
        total += pk * float(k) ** (-w) * ratio * en * pf
    tail = k_max ** (1.0 - w.real) / (w.real - 1.0)
    return SeriesEval(complex(total), k_max, tail, "B_product")


# ---------------------------------------------------------------------------
# Residues of B at t = 1 - s
# ---------------------------------------------------------------------------

def residue_B_closed_form(s: complex, w: complex, psi, psi_prime,
                          p_max: int = DEFAULT_PMAX) -> complex:
    """Closed forms of R(s,w;psi,psi') = res_{t=1-s} B(s,w;t,psi,psi'):

        R(psi1,psi1) = zeta(s) E(s)/(zeta(2s) zeta(2))
                       (1 + 2/(2^s(2-2^s)))^-1 P(s,w)
        R(psi2,psi0) = R(psi1,psi1) (2^w - 2^-w)^-1
        R(psi-1,.) = R(psi-2,.) = 0.
    """
    s, w = complex(s), complex(w)
    psi, psi_prime = _psi_resolve(psi), _psi_resolve(psi_prime)
    if psi.kind in ("psi-1", "psi-2"):
        return 0.0
    base = zeta(s) * eval_product("E", s, p_max).value \
        / (zeta(2 * s) * ZETA2) \
        / (1.0 + 2.0 / (2 ** s * (2.0 - 2 ** s))) \
        * eval_product("PLemma52", s, p_max, w=w).value
    if psi.kind == "psi1":
        return complex(base)
    if psi.kind == "psi2":
        return complex(base / (2 ** w - 2.0 ** (-w)))
    raise ValueError(f"no closed form for psi={psi.kind}")


def _residue_B_eval(args):
    s, w, d, psi_k, psip_k, N, k_max, p_max = args
    return d * B_product_rep(s, w, 1.0 - s + d, psi_k, psip_k, N, k_max,
                             _RESIDUE_TABLE, p_max,
                             method="accelerated").value


_RESIDUE_TABLE: FactorTable | None = None


def residue_B_numeric(s: float, w: float, psi, psi_prime,
                      table: FactorTable, N: int = 2, k_max: int = 900,
                      deltas=(0.02, 0.01, 0.005, 0.0025),
                      p_max: int = DEFAULT_PMAX,
                      workers: int = 1) -> complex:
    """Richardson limit of (t - (1-s)) B_product_rep(s,w;t) at t = 1-s+delta.

    Four extrapolation points by default: the analytic background has a
    large curvature in t, so the plain two-point h, h/2 scheme stalls near
    2e-2 absolute; Neville over four deltas reaches a few 1e-5.
    """
    global _RESIDUE_TABLE
    if not 0.55 < s < 0.95:
        raise ValueError("residue_B_numeric expects s in (0.55, 0.95)")
    if w <= 0.5 or s + w <= 1.0:
        raise ValueError("need Re w > 1/2 and Re(s+w) > 1")
    psi, psi_prime = _psi_resolve(psi), _psi_resolve(psi_prime)
    _RESIDUE_TABLE = table
    jobs = [(s, w, d, psi, psi_prime, N, k_max, p_max) for d in deltas]
    if workers > 1:
        from multiprocessing import Pool
        with Pool(min(workers, len(jobs))) as pool:
            gs = pool.map(_residue_B_eval, jobs)
    else:
        gs = [_residue_B_eval(j) for j in jobs]
    return _neville_to_zero(deltas, gs)
