"""Regenerates exp_scaled_ei.csv: L(x) = exp(x) * Ei(-x) at 50 digits.

Grid: 121 points, log-spaced over [1e-6, 1e6] (10 per decade), plus the
method switch at x = 1.5.
"""
import mpmath as mp

mp.mp.dps = 50
xs = [mp.mpf(10) ** (mp.mpf(k) / 10 - 6) for k in range(0, 121)]
xs.append(mp.mpf("1.5"))
with open("exp_scaled_ei.csv", "w") as f:
    f.write("x,l\n")
    for x in sorted(xs):
        x64 = float(x)
        # evaluate at the double actually passed to the Rust side
        l = mp.e ** mp.mpf(x64) * mp.ei(-mp.mpf(x64))
        f.write(f"{x64!r},{mp.nstr(l, 20)}\n")
