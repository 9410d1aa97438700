"""Arbitrary-precision oracles for the frozen expected values in the C++ tests.

Run with: python3 tests/oracles/compute_oracles.py
Every value printed here is independent of the C++ implementation: it uses
mpmath (50 digits) for the special functions and mpmath.quad for integrals.
"""
import mpmath as mp

mp.mp.dps = 50


def nakagami_pdf(u, alpha):
    # unit-power Nakagami-like density 2 u^(2a-1) e^(-u^2) / Gamma(a)
    return 2 * u ** (2 * alpha - 1) * mp.e ** (-u * u) / mp.gamma(alpha)


def cdf_m2(x, om=1):
    x = mp.mpf(x)
    return (1 - mp.e ** (-x * x / om)
            - mp.sqrt(mp.pi / (2 * om)) * x * mp.e ** (-x * x / (2 * om)) * mp.erf(x / mp.sqrt(2 * om)))


def pdf_m2(x, om=1):
    x = mp.mpf(x)
    e2 = mp.e ** (-x * x / (2 * om))
    er = mp.erf(x / mp.sqrt(2 * om))
    c = mp.sqrt(mp.pi / (2 * om))
    return x / om * mp.e ** (-x * x / om) + c * x * x / om * e2 * er - c * e2 * er


def phi(w, alpha):
    x = -w * w / 4
    g = mp.gamma(alpha + mp.mpf(1) / 2) / mp.gamma(alpha)
    return mp.hyp1f1(alpha, mp.mpf(1) / 2, x) + 1j * w * g * mp.hyp1f1(alpha + mp.mpf(1) / 2, mp.mpf(3) / 2, x)


def series(m, alpha, zb, T, L):
    w0 = 2 * mp.pi / T
    s = mp.sqrt(zb)
    op = mp.mpf(0)
    lc = mp.mpf(0)
    for n in range(1, L + 1):
        k = 2 * n - 1
        p = phi(k * w0, 1) ** m * phi(-k * w0 * s, alpha)
        op += mp.im(p) / k
        lc += mp.re(p)
    return mp.mpf(1) / 2 - 2 / mp.pi * op, mp.sqrt(8 * mp.pi) / T * mp.sqrt(m + zb) * lc


def show(name, v):
    print(f"{name} = {mp.nstr(v, 17)}")


show("erf(1)", mp.erf(1))
show("1F1(1;0.5;-1)", mp.hyp1f1(1, 0.5, -1))
show("2F1(0.5,3;1.5;-1/3)", mp.hyp2f1(0.5, 3, 1.5, -mp.mpf(1) / 3))
show("B(0.25;0.5,2.5)", mp.quad(lambda t: t ** -0.5 * (1 - t) ** 1.5, [0, 0.25]))

# OP, M=2 N=1 gamma=1 z=1 incoherent: alpha=2, beta=1, outage density integral
v1 = mp.quad(lambda y: cdf_m2(y) * nakagami_pdf(y, 2), [0, 2, 5, mp.inf])
show("OP M2N1 z1 density", v1)
# LCR, same config, crossing-rate density integral, equal Doppler prefactor sqrt(pi/2)*sqrt(M+z/beta)
I2 = mp.quad(lambda y: pdf_m2(y) * nakagami_pdf(y, 2), [0, 2, 5, mp.inf])
v2 = mp.sqrt(mp.pi / 2) * mp.sqrt(3) * I2
show("LCRnorm M2N1 z1 density", v2)
# the CF integral int_0^inf Re{Phi_X Phi_Y*} = pi * I2
show("int Re{PhiX PhiY*} M2N1 z1", mp.pi * I2)
show("F_X m2(1,1)", cdf_m2(1))
show("f_X m2 (1,1)", pdf_m2(1))

# AFD M=3 N=5 gamma=1 z=1 incoherent: alpha=15 beta=1, Beaulieu T=160 L=400
op, lc = series(3, 15, 1, 160, 400)
show("OP series M3N5", op)
show("LCR series M3N5", lc)
show("AFD series M3N5", op / lc)

# Kummer reference grid (x <= 0) used to pin the large-parameter branches
print("kummer grid:")
for a in [1, 2.5, 5, 15, 30, 50]:
    for b in [0.5, 1.5]:
        for x in [-0.5, -5, -20, -60, -150, -400, -2000, -1e5]:
            print(f"    {{{a}, {b}, {x}, {mp.nstr(mp.hyp1f1(a, b, x), 17)}}},")

# Terminating 1F1 family (b - a a nonpositive integer) at large a
print("terminating 1F1:")
for a, b, x in [(10000.5, 1.5, -50), (200.5, 1.5, -30), (90.5, 1.5, -12)]:
    show(f"    1F1({a};{b};{x})", mp.hyp1f1(a, b, x))

# Branch CF at large shape: Phi(w; Omega, alpha) = phi(w sqrt(Omega), alpha)
print("large-shape CF:")
for w, om, alpha in [(3.33, 4.2, 90), (1.0, 4.2, 400)]:
    v = phi(w * mp.sqrt(om), alpha)
    print(f"    w={w} Omega={om} alpha={alpha}: {mp.nstr(mp.re(v), 20)} {mp.nstr(mp.im(v), 20)}")
