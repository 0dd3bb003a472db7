"""Computes the frozen high-precision reference values used by the C++ tests.

Run with: python3 tests/oracles/frozen_values.py
Values are printed with 20 significant digits and pasted into the tests.
"""
import mpmath as mp

mp.mp.dps = 120


def surfing(m, mu, lam):
    m, mu, lam = mp.mpf(m), mp.mpf(mu), mp.mpf(lam)
    return mp.exp(-lam * (m - mu) ** 2 / (2 * m * mu ** 2)) * mp.sqrt(lam / (2 * mp.pi * m ** 3))


def hyp2f1_series(a, b, c, z):
    total, term = mp.mpf(1), mp.mpf(1)
    for k in range(0, -b):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    return total


def response_pmf(M, m, n, N, A):
    # direct integral of prior * binomial, independent of the closed form
    f = lambda p: (n + 1) * mp.binomial(n, m) * p ** m * (1 - p) ** (n - m) \
        * mp.binomial(N, M) * (A * p) ** M * (1 - A * p) ** (N - M)
    return mp.quad(f, [0, mp.mpf(1) / 4, mp.mpf(1) / 2, mp.mpf(3) / 4, 1])


def p_view(L, mu, lam, cutoff=20000):
    w = [surfing(k, mu, lam) for k in range(1, cutoff + 1)]
    z = mp.fsum(w)
    return mp.fsum(w[L:]) / z


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


if __name__ == "__main__":
    show("surfing(14,14,14)", surfing(14, 14, 14))
    show("surfing(30,14,14)", surfing(30, 14, 14))
    show("surfing(3,7,2.5)", surfing(3, 7, 2.5))
    show("hyp2f1(4,-3,6,0.5)", hyp2f1_series(mp.mpf(4), -3, mp.mpf(6), mp.mpf(1) / 2))
    show("hyp2f1(12,-40,30,0.9)", hyp2f1_series(mp.mpf(12), -40, mp.mpf(30), mp.mpf(9) / 10))
    show("p_view(14;14,14)", p_view(14, 14, 14))
    show("p_view(1;14,14)", p_view(1, 14, 14))
    show("response_pmf(2;3,5,391,0.03)", response_pmf(2, 3, 5, 391, mp.mpf(3) / 100))
    show("response_pmf(0;3,5,391,0.03)", response_pmf(0, 3, 5, 391, mp.mpf(3) / 100))
    show("fisher[[10,0],[0,10]]", 2 / mp.binomial(20, 10))
