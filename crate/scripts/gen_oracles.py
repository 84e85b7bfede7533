"""Independent reference values for the test suite (mpmath + Arb).

Prints Rust-ready tuples; the numbers are pasted into crates/core/tests/.
"""
import mpmath as mp
import flint

mp.mp.dps = 40
flint.ctx.dps = 40

print("// theta(t)")
for t in ["20", "100", "1000", "12345.678", "1000000.5", "10000000"]:
    print(f"    ({t}, {mp.nstr(mp.siegeltheta(mp.mpf(t)), 20)}),")

print("// Z(t) via Arb zeta and mpmath theta")
for t in ["20", "100", "1000", "5000.25", "123456.789", "1000000.5", "10000000"]:
    tt = mp.mpf(float(t))  # the exact double the tests pass in
    th = mp.siegeltheta(tt)
    z = flint.acb(flint.arb("0.5"), flint.arb(mp.nstr(tt, 40))).zeta()
    zr = mp.mpc(mp.mpf(z.real.mid().str(40, radius=False)), mp.mpf(z.imag.mid().str(40, radius=False)))
    Z = (mp.expj(th) * zr).real
    print(f"    ({t}, {mp.nstr(Z, 20)}),")

print("// N(t) from Arb, S(t) = N - 1 - theta/pi")
for t in ["20", "100", "1000", "12345.678", "1000000.5"]:
    n = int(flint.arb(t).zeta_nzeros().unique_fmpz())
    s = n - 1 - mp.siegeltheta(mp.mpf(t)) / mp.pi
    print(f"    ({t}, {n}, {mp.nstr(s, 20)}),")

print("// Gram points")
for n in [-1, 0, 1, 1000, 100000]:
    print(f"    ({n}, {mp.nstr(mp.grampoint(n), 20)}),")

print("// p^{-i tau} = exp(-i tau log p)")
for tau, p in [("123456789", 2), ("9876543.21", 999983), ("1e7", 7)]:
    ph = mp.mpf(tau) * mp.log(p)
    print(f"    ({tau}, {p}, {mp.nstr(mp.cos(ph), 20)}, {mp.nstr(-mp.sin(ph), 20)}),")

print("// smooth bump squared, support 2: phi_hat(l) = (eta*eta)(l) / (eta*eta)(0)")
mp.mp.dps = 30
eta = lambda u: mp.exp(-1 / (1 - u * u)) if abs(u) < 1 else mp.mpf(0)
conv = lambda l: mp.quad(lambda m: eta(m) * eta(l - m), [max(-1, l - 1), l / 2, min(1, l + 1)])
c0 = conv(0)
for l in ["0.1", "0.5", "1.3"]:
    print(f"    ({l}, {mp.nstr(conv(mp.mpf(l)) / c0, 20)}),")

print("// smooth bump squared, support 1: tail mass int_a^inf (1+s) phi(s) ds")
import numpy as np
u, wu = np.polynomial.legendre.leggauss(4000)
u, wu = 0.5 * u, 0.5 * wu  # [-1/2, 1/2]
eta1 = np.exp(-1 / (1 - (2 * u) ** 2))
norm = 2 * np.pi * np.sum(wu * eta1 ** 2)
x, wx = np.polynomial.legendre.leggauss(20)
def tail(a, stop=6000.0, panel=0.5):
    total = 0.0
    for left in np.arange(a, stop, panel):
        s = left + panel * (x + 1) / 2
        G = (wu * eta1) @ np.cos(np.outer(u, s))
        total += panel / 2 * np.sum(wx * (1 + s) * G ** 2 / norm)
    return total
for a in [5, 10, 20]:
    print(f"    ({a}.0, {tail(a):.12e}),")
