#!/usr/bin/env python3
"""The first moment against its predicted expansion X P1(log X) +
X^(1/3) P2(log X).

The main term is verified to ~1e-4 relative by X = 1e5.  The secondary
term's constant T(1/2) ~= 3.1e-3 makes X^(1/3) P2(log X) of size ~0.02-0.1
on this grid, which sits an order of magnitude below the fluctuating
remainder (empirically ~0.04 X^(1/4)); the ratio column therefore measures
the scale of the remainder rather than isolating the secondary term, and
the non-growth of |residual|/X^0.3 is the meaningful desk-scale statistic.
Isolating the X^(1/3) coefficient itself would need the noise term to drop
below P2(log X) X^(1/3), i.e. X beyond ~1e20.
"""

import math
import time

from qdmoment import FactorTable, build_constants, empirical_moment
from qdmoment.moment import P2_of_logX, predict_central, report_rows_csv, residual_report

X_GRID = [10_000, 20_000, 40_000, 80_000]  # extend to 640_000 when patient

table = FactorTable(int(2.1 * max(X_GRID)))
const = build_constants()

print("prediction constants:")
for key in ("P_half", "Pprime_over_P", "T_half", "Tprime_over_T",
            "phi_mellin_1", "phi_mellin_third"):
    print(f"  {key:22s} = {getattr(const, key):+.10f}")

print("\nempirical vs predicted:")
t0 = time.time()
rows = residual_report(X_GRID, table, const=const, workers=2)
print(report_rows_csv(rows))
print(f"[{time.time()-t0:.0f}s]")

print("residual scale check (|residual| / X^0.3, should not grow):")
for r in rows:
    print(f"  X={r.X:8.0f}: {abs(r.residual) / r.X ** 0.3:.4f}")

print("\nsecondary-term size vs remainder at the top grid point:")
r = rows[-1]
sec = r.X ** (1 / 3) * P2_of_logX(math.log(r.X), const)
print(f"  X^(1/3) P2(log X) = {sec:+.4f}   observed residual after the "
      f"main term = {r.empirical - r.main_term:+.4f}")
