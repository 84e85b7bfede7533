"""Generate Taylor coefficients (in z = p - 1/2) of the Riemann-Siegel
correction functions C0..C4 and emit them as Rust constant arrays."""
import sys
import mpmath as mp

mp.mp.dps = 60
DEG = 72  # degree of the Psi series before differentiation


def series_cos(a, deg):
    # cos of a power series a(z) with a[0] handled exactly
    s = [mp.mpf(0)] * (deg + 1)
    c = [mp.mpf(0)] * (deg + 1)
    a0 = a[0]
    b = a[:]
    b[0] = mp.mpf(0)
    # cos(a0 + b) = cos(a0) cos(b) - sin(a0) sin(b)
    cb = [mp.mpf(0)] * (deg + 1)
    sb = [mp.mpf(0)] * (deg + 1)
    cb[0] = mp.mpf(1)
    term = [mp.mpf(1)] + [mp.mpf(0)] * deg
    for k in range(1, deg + 1):
        term = mul(term, b, deg)
        term = [x / k for x in term]
        if all(x == 0 for x in term):
            break
        tgt = sb if k % 2 == 1 else cb
        sign = (-1) ** ((k - 1) // 2) if k % 2 == 1 else (-1) ** (k // 2)
        for i in range(deg + 1):
            tgt[i] += sign * term[i]
    return [mp.cos(a0) * cb[i] - mp.sin(a0) * sb[i] for i in range(deg + 1)]


def mul(a, b, deg):
    r = [mp.mpf(0)] * (deg + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(deg + 1 - i):
            r[i + j] += x * b[j]
    return r


def div(a, b, deg):
    r = [mp.mpf(0)] * (deg + 1)
    for i in range(deg + 1):
        acc = a[i] - sum(r[j] * b[i - j] for j in range(i))
        r[i] = acc / b[0]
    return r


def deriv(a, m):
    for _ in range(m):
        a = [a[i] * i for i in range(1, len(a))]
    return a


deg = DEG
pi = mp.pi
# Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p), p = 1/2 + z
num_arg = [-5 * pi / 8, mp.mpf(0), 2 * pi] + [mp.mpf(0)] * (deg - 2)
den_arg = [pi, 2 * pi] + [mp.mpf(0)] * (deg - 1)
psi = div(series_cos(num_arg, deg), series_cos(den_arg, deg), deg)

def d(m):
    return deriv(psi, m)

def comb(terms):
    n = min(len(t[1]) for t in terms)
    return [sum(c * t[i] for c, t in terms) for i in range(n)]

C = [
    comb([(1, d(0))]),
    comb([(-1 / (96 * pi**2), d(3))]),
    comb([(1 / (64 * pi**2), d(2)), (1 / (18432 * pi**4), d(6))]),
    comb([(-1 / (64 * pi**2), d(1)), (-1 / (3840 * pi**4), d(5)), (-1 / (5308416 * pi**6), d(9))]),
    comb([(1 / (128 * pi**2), d(0)), (19 / (24576 * pi**4), d(4)), (11 / (5898240 * pi**6), d(8)),
          (1 / (2038431744 * pi**8), d(12))]),
]

if __name__ == "__main__":
    out = []
    for k, c in enumerate(C):
        # drop terms that cannot matter for |z| <= 1/2
        keep = len(c)
        while keep > 1 and abs(c[keep - 1]) * mp.mpf(0.5) ** (keep - 1) < mp.mpf(10) ** -22:
            keep -= 1
        out.append(f"pub(crate) const C{k}: [f64; {keep}] = [")
        for x in c[:keep]:
            out.append(f"    {mp.nstr(x, 20, min_fixed=-1, max_fixed=-1)},")
        out.append("];")
    print("\n".join(out))
