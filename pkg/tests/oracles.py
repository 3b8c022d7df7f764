"""Reference values by direct high-precision summation with mpmath.

These loops are written independently of the package's series code.  They
sum every term at a working precision large enough to absorb the worst
cancellation for the modest arguments used in the tests.
"""

import math

import mpmath


def _digits(scale: float) -> int:
    return 40 + int(scale / math.log(10)) + 10


def mp_prabhakar(alpha, beta, gamma_p, t, dps=None):
    """E^{gamma_p}_{alpha,beta}(t)."""
    with mpmath.workdps(dps or _digits(abs(t) ** (1 / alpha) + 20)):
        a, b, g, z = (mpmath.mpf(x) for x in (alpha, beta, gamma_p, t))
        total = mpmath.mpf(0)
        i = 0
        while True:
            term = mpmath.rf(g, i) / mpmath.factorial(i) * z**i * mpmath.rgamma(i * a + b)
            total += term
            if i > 20 and abs(term) < mpmath.mpf(10) ** (-mpmath.mp.dps) * (1 + abs(total)):
                break
            i += 1
        return float(total)


def mp_ml_deriv(l, alpha, beta, t):
    with mpmath.workdps(_digits(abs(t) ** (1 / alpha) + 20)):
        a, b, z = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(t)
        total = mpmath.mpf(0)
        i = 0
        while True:
            term = mpmath.factorial(i + l) / mpmath.factorial(i) * z**i * mpmath.rgamma((i + l) * a + b)
            total += term
            if i > 20 and abs(term) < mpmath.mpf(10) ** (-mpmath.mp.dps) * (1 + abs(total)):
                break
            i += 1
        return float(total)


def mp_bivariate(alpha, beta, gamma, u, v, delta=1.0):
    """E^{delta}_{alpha,beta,gamma}(u, v) by summing l and k up to a fixed cutoff."""
    cut = 60 + int(4 * (abs(u) ** (1 / alpha) + abs(v) ** (1 / beta)))
    with mpmath.workdps(60 + int(abs(u) + abs(v))):
        a, b, g, d = (mpmath.mpf(x) for x in (alpha, beta, gamma, delta))
        uu, vv = mpmath.mpf(u), mpmath.mpf(v)
        total = mpmath.mpf(0)
        for l in range(cut):
            for k in range(cut - l):
                total += (
                    mpmath.rf(d, l + k)
                    / (mpmath.factorial(l) * mpmath.factorial(k))
                    * uu**l
                    * vv**k
                    * mpmath.rgamma(l * a + k * b + g)
                )
        return float(total)


def mp_fox_wright(upper, lower, t, terms=400):
    with mpmath.workdps(50):
        total = mpmath.mpf(0)
        for k in range(terms):
            c = mpmath.mpf(1) / mpmath.factorial(k)
            for lam, a in upper:
                c *= mpmath.gamma(mpmath.mpf(lam) + mpmath.mpf(a) * k)
            for mu, b in lower:
                c *= mpmath.rgamma(mpmath.mpf(mu) + mpmath.mpf(b) * k)
            total += c * mpmath.mpf(t) ** k
        return float(total)
