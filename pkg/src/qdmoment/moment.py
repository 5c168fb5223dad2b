"""The smooth weight, its Mellin transform, the empirical moment engine,
and the predicted main/secondary terms with residual analysis.

The empirical moment is

    M(X) = sum over odd square-free d of Phi(d/X) L(1/2, chi_8d),

with the sum supported on d in (X/2, 2X).  The engine walks that window in
fixed-size chunks; each chunk builds the full character matrix chi_8d(n)
multiplicatively (per-prime quadratic-residue tables + one gather per
composite column), applies the incomplete-gamma kernel, and reduces in a
fixed order, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.special as sps
from scipy.integrate import quad

from .arith import FactorTable, primes_up_to, squarefree_odd
from .eulerprod import R1, R2, ResidueConstants, residue_constants
from .lfun import afe_terms_needed, general_values_batch
from .specfun import X_plus

_GAMMA_QUARTER = math.gamma(0.25)
_AFE_NORM = 2.0 / _GAMMA_QUARTER


# ---------------------------------------------------------------------------
# Weight
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSpec:
    """The smooth non-negative weight supported in [lo, hi] (default bump)."""

    kind: str = "bump"
    lo: float = 0.5
    hi: float = 2.0
    quad_tol: float = 1e-12

    def __post_init__(self):
        if self.kind != "bump":
            raise ValueError("only the standard bump weight is shipped")
        if not 0 < self.lo < self.hi:
            raise ValueError("need 0 < lo < hi")

    def phi(self, t):
        """exp(-1/((t-lo)(hi-t))) inside (lo, hi), 0 outside."""
        t = np.asarray(t, dtype=np.float64)
        inside = (t > self.lo) & (t < self.hi)
        u = np.where(inside, (t - self.lo) * (self.hi - t), 1.0)
        out = np.where(inside, np.exp(-1.0 / u), 0.0)
        return float(out) if out.ndim == 0 else out

    def phi_prime(self, t):
        """Analytic derivative of the bump (for the integration-by-parts
        identity tests)."""
        t = np.asarray(t, dtype=np.float64)
        inside = (t > self.lo) & (t < self.hi)
        u = np.where(inside, (t - self.lo) * (self.hi - t), 1.0)
        du = (self.lo + self.hi) - 2.0 * t
        out = np.where(inside, np.exp(-1.0 / u) * du / (u * u), 0.0)
        return float(out) if out.ndim == 0 else out

    def mellin(self, s: complex) -> complex:
        """Phi~(s) = int Phi(t) t^(s-1) dt by adaptive quadrature."""
        s = complex(s)

        def f_re(t):
            return (self.phi(t) * t ** (s - 1)).real

        def f_im(t):
            return (self.phi(t) * t ** (s - 1)).imag

        re, _ = quad(f_re, self.lo, self.hi, epsabs=self.quad_tol,
                     epsrel=self.quad_tol, limit=200)
        if s.imag == 0.0:
            return complex(re)
        im, _ = quad(f_im, self.lo, self.hi, epsabs=self.quad_tol,
                     epsrel=self.quad_tol, limit=200)
        return complex(re, im)

    def mellin_logderiv(self, s: complex) -> complex:
        """d/ds log Phi~(s) = int Phi(t) t^(s-1) log t dt / Phi~(s)."""
        s = complex(s)

        def g_re(t):
            return (self.phi(t) * t ** (s - 1) * math.log(t)).real

        def g_im(t):
            return (self.phi(t) * t ** (s - 1) * math.log(t)).imag

        re, _ = quad(g_re, self.lo, self.hi, epsabs=self.quad_tol,
                     epsrel=self.quad_tol, limit=200)
        if s.imag == 0.0:
            return complex(re) / self.mellin(s)
        im, _ = quad(g_im, self.lo, self.hi, epsabs=self.quad_tol,
                     epsrel=self.quad_tol, limit=200)
        return complex(re, im) / self.mellin(s)

    def mellin_gl(self, s: complex, nodes: int = 200) -> complex:
        """Gauss-Legendre evaluation of Phi~(s): the dual-quadrature oracle."""
        x, wts = np.polynomial.legendre.leggauss(nodes)
        t = 0.5 * (self.hi - self.lo) * x + 0.5 * (self.hi + self.lo)
        vals = self.phi(t) * t ** (complex(s) - 1)
        return complex(np.sum(wts * vals) * 0.5 * (self.hi - self.lo))

    @property
    def spec_hash(self) -> str:
        blob = f"{self.kind}|{self.lo!r}|{self.hi!r}".encode()
        return hashlib.sha256(blob).hexdigest()[:16]


DEFAULT_WEIGHT = WeightSpec()


# ---------------------------------------------------------------------------
# Character matrix machinery for the chi_8d family
# ---------------------------------------------------------------------------

class CharMatrixBuilder:
    """chi_8d(n) for blocks of d and all odd n <= n_max, built
    multiplicatively: quadratic-residue gathers at the primes, one
    gather-multiply per composite column."""

    def __init__(self, n_max: int):
        self.n_max = int(n_max)
        ns = np.arange(1, self.n_max + 1, 2, dtype=np.int64)
        self.ns = ns
        primes = primes_up_to(self.n_max)
        primes = primes[primes > 2]
        self.primes = primes
        self.prime_col = (primes - 1) // 2  # column index of each odd prime
        # quadratic-residue tables, concatenated
        offs = np.zeros(primes.size + 1, dtype=np.int64)
        offs[1:] = np.cumsum(primes)
        flat = np.empty(int(offs[-1]), dtype=np.int8)
        for i, p in enumerate(primes):
            p = int(p)
            tab = np.full(p, -1, dtype=np.int8)
            tab[0] = 0
            sq = np.unique((np.arange(1, (p - 1) // 2 + 1, dtype=np.int64) ** 2)
                           % p)
            tab[sq] = 1
            flat[offs[i]: offs[i + 1]] = tab
        self.qr_flat = flat
        self.qr_off = offs[:-1]
        # multiplicative links for composite odd n: n -> (spf(n), n/spf(n)),
        # grouped by Omega(n) so each level only gathers finished columns
        small = FactorTable(max(self.n_max, 4))
        omega = np.zeros(ns.size, dtype=np.int8)
        spf = np.zeros(ns.size, dtype=np.int64)
        for i, n in enumerate(ns):
            n = int(n)
            if n == 1:
                continue
            p = int(small.spf[n])
            spf[i] = p
            omega[i] = 1 if p == n else omega[(n // p - 1) // 2] + 1
        self.levels = []
        for lv in range(2, int(omega.max()) + 1):
            idx = np.flatnonzero(omega == lv)
            f1 = (spf[idx] - 1) // 2
            f2 = (ns[idx] // spf[idx] - 1) // 2
            self.levels.append((idx, f1, f2))

    def rows(self, ds: np.ndarray, n_count: int) -> np.ndarray:
        """chi_8d(n) as an int8 matrix of shape (len(ds), n_count)."""
        n_count = min(n_count, self.ns.size)
        out = np.empty((ds.size, n_count), dtype=np.int8)
        out[:, 0] = 1  # n = 1
        keep = self.prime_col < n_count
        pr = self.primes[keep]
        cols = self.prime_col[keep]
        mods = (8 * ds[:, None]) % pr[None, :]
        out[:, cols] = self.qr_flat[self.qr_off[keep][None, :] + mods]
        for idx, f1, f2 in self.levels:
            sel = idx < n_count
            if not sel.any():
                break
            out[:, idx[sel]] = out[:, f1[sel]] * out[:, f2[sel]]
        return out


# a module-level builder shared with forked workers (copy-on-write)
_BUILDER: CharMatrixBuilder | None = None


def _get_builder(n_max: int) -> CharMatrixBuilder:
    global _BUILDER
    if _BUILDER is None or _BUILDER.n_max < n_max:
        _BUILDER = CharMatrixBuilder(n_max)
    return _BUILDER


def central_row_sum(d: int, cutoff: float = 40.0) -> float:
    """L(1/2, chi_8d) for one d through the same row kernel the engine uses
    (the single-threaded reference path)."""
    builder = _get_builder(afe_terms_needed(d, cutoff))
    return float(_chunk_L_values(np.array([d], dtype=np.int64), builder,
                                 cutoff)[0])


def _chunk_L_values(ds: np.ndarray, builder: CharMatrixBuilder,
                    cutoff: float) -> np.ndarray:
    """L(1/2, chi_8d) for a contiguous block of d (row-sum kernel)."""
    n_cut = afe_terms_needed(int(ds.max()), cutoff)
    n_count = (n_cut + 1) // 2
    chi = builder.rows(ds, n_count)
    ns = builder.ns[:n_count].astype(np.float64)
    y = (math.pi / 8.0) * ns[None, :] ** 2 / ds[:, None].astype(np.float64)
    kern = sps.gammaincc(0.25, y)
    kern[y > cutoff] = 0.0
    kern *= _GAMMA_QUARTER / np.sqrt(ns)[None, :]
    kern *= chi  # in-place int8 -> float64 broadcastless multiply
    return _AFE_NORM * np.sum(kern, axis=1)


def _moment_chunk(args) -> tuple[float, int]:
    ds, X, cutoff, lo, hi = args
    builder = _get_builder(afe_terms_needed(int(ds.max()), cutoff))
    lv = _chunk_L_values(ds, builder, cutoff)
    wts = np.exp(-1.0 / ((ds / X - lo) * (hi - ds / X)))
    return float(np.sum(lv * wts)), int(ds.size)


def _moment_chunk_general(args) -> tuple[complex, int]:
    ds, X, cutoff, lo, hi, s = args
    lv = general_values_batch(s, ds, cutoff=cutoff)
    wts = np.exp(-1.0 / ((ds / X - lo) * (hi - ds / X)))
    return complex(np.sum(lv * wts)), int(ds.size)


def _kahan_total(parts) -> float:
    total = 0.0
    comp = 0.0
    for x in parts:
        y = x - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@dataclass
class MomentReport:
    """One row of the residual analysis."""

    X: float
    s: complex
    empirical: float
    main_term: float
    secondary_term: float
    residual: float
    residual_ratio: float
    d_count: int
    runtime: float
    weight_hash: str = DEFAULT_WEIGHT.spec_hash


def empirical_moment(X: float, table: FactorTable, s="central",
                     weight: WeightSpec = DEFAULT_WEIGHT,
                     cutoff: float = 40.0, workers: int = 1,
                     chunk: int = 2048):
    """sum_d mu^2(d) Phi(d/X) L(s, chi_8d) over odd d in (X/2, 2X).

    Central point: the smoothed-series kernel, X up to 1e7.  General s: the
    general smoothed series, X capped at 1e4.  Returns (value, d_count,
    seconds).  Bit-identical for any `workers` (fixed chunking + ordered
    compensated reduction).
    """
    if X < 1_000:
        raise ValueError("X below the supported minimum 1e3")
    if weight.spec_hash != DEFAULT_WEIGHT.spec_hash:
        raise ValueError("the engine kernel is specialized to the default "
                         "bump weight")
    central = s == "central" or s == 0.5
    if not central and X > 10_000:
        raise ValueError("general-s moments capped at X = 1e4")
    lo_d = int(math.floor(X / 2)) + 1
    hi_d = int(math.ceil(2 * X)) - 1
    if hi_d > table.limit:
        raise ValueError("FactorTable limit below 2X")
    t0 = time.time()
    ds = squarefree_odd(lo_d, hi_d, table)
    # warm the shared builder before forking so workers inherit it
    _get_builder(afe_terms_needed(hi_d, cutoff))
    if central:
        jobs = [(ds[i: i + chunk], float(X), cutoff, weight.lo, weight.hi)
                for i in range(0, ds.size, chunk)]
        fn = _moment_chunk
    else:
        jobs = [(ds[i: i + chunk], float(X), cutoff, weight.lo, weight.hi,
                 complex(s)) for i in range(0, ds.size, chunk)]
        fn = _moment_chunk_general
    if workers > 1 and len(jobs) > 1:
        from multiprocessing import Pool
        with Pool(workers) as pool:
            parts = pool.map(fn, jobs)
    else:
        parts = [fn(j) for j in jobs]
    count = sum(c for _, c in parts)
    if central:
        value = _kahan_total([v for v, _ in parts])
    else:
        value = complex(_kahan_total([v.real for v, _ in parts]),
                        _kahan_total([v.imag for v, _ in parts]))
    return value, count, time.time() - t0


# ---------------------------------------------------------------------------
# Predictions
# ---------------------------------------------------------------------------

def build_constants(weight: WeightSpec = DEFAULT_WEIGHT,
                    p_max: int = 1_000_000) -> ResidueConstants:
    return residue_constants(weight.mellin, weight.mellin_logderiv, p_max)


def predict_central(X: float, const: ResidueConstants) -> tuple[float, float]:
    """(main, secondary) = (X P1(log X), X^(1/3) P2(log X))."""
    x = math.log(X)
    g, l2 = const.gamma_euler, math.log(2.0)
    p1 = (const.phi_mellin_1 * const.P_half / (3.0 * const.zeta2)) * (
        x / 2.0 + 2.0 * g + 2.0 * l2 + const.Pprime_over_P
        + (const.phi_mellin_logderiv_1 - const.X_plus_prime_half) / 2.0)
    p2 = const.phi_mellin_third * const.T_half * (
        x / 6.0 + 2.0 * g + const.phi_mellin_logderiv_third / 6.0
        + const.Tprime_over_T - const.X_plus_prime_half / 2.0)
    return X * p1, X ** (1.0 / 3.0) * p2


def P2_of_logX(x: float, const: ResidueConstants) -> float:
    """The secondary-term linear polynomial P2 evaluated at x = log X."""
    return const.phi_mellin_third * const.T_half * (
        x / 6.0 + 2.0 * const.gamma_euler
        + const.phi_mellin_logderiv_third / 6.0
        + const.Tprime_over_T - const.X_plus_prime_half / 2.0)


def predict_general(s: complex, X: float,
                    weight: WeightSpec = DEFAULT_WEIGHT,
                    p_max: int = 1_000_000) -> dict:
    """The four-term general-s prediction:

    X Phi~(1) R1(s) + X^(3/2-s) Phi~(3/2-s) X_+(s) R1(1-s)
      + X^(1/2-s/3) Phi~(1/2-s/3) R2(s) + X^((2-2s)/3) Phi~((2-2s)/3)
        X_+(s) R2(1-s).
    """
    s = complex(s)
    if not (1.0 / 3.0 < s.real < 1.0) or abs(s - 0.5) < 1e-12:
        raise ValueError("predict_general needs 1/3 < Re s < 1, s != 1/2")
    xp = X_plus(s)
    t1 = X * weight.mellin(1.0) * R1(s, p_max)
    t2 = X ** (1.5 - s) * weight.mellin(1.5 - s) * xp * R1(1.0 - s, p_max)
    t3 = X ** (0.5 - s / 3) * weight.mellin(0.5 - s / 3) * R2(s, p_max)
    t4 = X ** ((2.0 - 2.0 * s) / 3) * weight.mellin((2.0 - 2.0 * s) / 3) \
        * xp * R2(1.0 - s, p_max)
    return {"term1": complex(t1), "term2": complex(t2), "term3": complex(t3),
            "term4": complex(t4),
            "total": complex(t1 + t2 + t3 + t4)}


# ---------------------------------------------------------------------------
# Residual analysis and reports
# ---------------------------------------------------------------------------

def residual_report(X_list, table: FactorTable,
                    const: ResidueConstants | None = None,
                    weight: WeightSpec = DEFAULT_WEIGHT,
                    workers: int = 1) -> list[MomentReport]:
    """Per-X rows: empirical, main, secondary, residual, and the ratio
    (empirical - main) / (X^(1/3) P2(log X))."""
    X_list = [float(x) for x in X_list]
    if any(b <= a for a, b in zip(X_list, X_list[1:])):
        raise ValueError("X_list must be strictly increasing")
    if const is None:
        const = build_constants(weight)
    rows = []
    for X in X_list:
        emp, count, secs = empirical_moment(X, table, weight=weight,
                                            workers=workers)
        main, secondary = predict_central(X, const)
        residual = emp - main - secondary
        denom = X ** (1.0 / 3.0) * P2_of_logX(math.log(X), const)
        ratio = (emp - main) / denom
        rows.append(MomentReport(X, 0.5, emp, main, secondary, residual,
                                 ratio, count, secs, weight.spec_hash))
    return rows


CSV_COLUMNS = ["X", "s_re", "s_im", "empirical", "main", "secondary",
               "residual", "ratio", "d_count", "seconds"]


def report_rows_csv(rows: list[MomentReport]) -> str:
    """CSV serialization (17 significant digits; header carries the weight
    hash so runs with different weights are never comparable by accident)."""
    out = [f"# weight={rows[0].weight_hash}" if rows else "# weight=?",
           ",".join(CSV_COLUMNS)]
    for r in rows:
        s = complex(r.s)
        vals = [r.X, s.real, s.imag, r.empirical, r.main_term,
                r.secondary_term, r.residual, r.residual_ratio]
        out.append(",".join(f"{v:.17g}" for v in vals)
                   + f",{r.d_count},{r.runtime:.3f}")
    return "\n".join(out) + "\n"


def report_rows_json(rows: list[MomentReport]) -> str:
    payload = []
    for r in rows:
        s = complex(r.s)
        payload.append({
            "X": r.X, "s_re": s.real, "s_im": s.imag,
            "empirical": r.empirical, "main": r.main_term,
            "secondary": r.secondary_term, "residual": r.residual,
            "ratio": r.residual_ratio, "d_count": r.d_count,
            "seconds": round(r.runtime, 3), "weight": r.weight_hash,
        })
    return json.dumps(payload, indent=2) + "\n"
