"""Reference table of zeta-zero ordinates in (0, T_MAX], computed with Arb
(python-flint). Arb isolates zeros rigorously and shares no code with the
crate's Riemann-Siegel / Gram-point engine.

Usage: python3 scripts/gen_reference_zeros.py [T_MAX] [OUT]
Output: one ordinate per line, 12 decimals, '#' comment header.
"""
import sys
from decimal import Decimal, ROUND_HALF_EVEN

import flint

T_MAX = float(sys.argv[1]) if len(sys.argv) > 1 else 1e4
OUT = sys.argv[2] if len(sys.argv) > 2 else "crates/core/data/zeros_to_1e4.txt"
DIGITS = 12

flint.ctx.dps = 30
count = int(flint.arb(T_MAX).zeta_nzeros().unique_fmpz())
zeros = flint.acb.zeta_zeros(1, count)
quantum = Decimal(1).scaleb(-DIGITS)
with open(OUT, "w") as f:
    f.write(f"# Arb via python-flint {flint.__version__}: zeros 1..{count}, ordinates <= {T_MAX:g}\n")
    for z in zeros:
        g = Decimal(z.imag.mid().str(DIGITS + 10, radius=False))
        f.write(f"{g.quantize(quantum, rounding=ROUND_HALF_EVEN)}\n")
print(count, "zeros written to", OUT)
