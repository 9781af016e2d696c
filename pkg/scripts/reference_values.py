"""High-precision reference values frozen into the test suite.

Everything here is computed with mpmath, independently of the package:
B by Gauss-Legendre/tanh-sinh quadrature of the defining integral with
mpmath's regularized incomplete beta, 3F2/2F1 values with mpmath's hyper,
and the BB(2,2) moment by direct integration of its density.  Each value is
computed at 40 and 50 digits and printed only if they agree.

Usage: python scripts/reference_values.py
"""

import mpmath as mp

B_POINTS = [
    (0.5, 0.5, 1, 1, 1, 1),
    (1, 1, 1, 0.5, 1, 0.5),
    (2.5, 1.5, 0.7, 3.2, 1.3, 0.4),
    (0.3, 4.1, 2.2, 0.6, 5.5, 1.7),
    (7.2, 0.9, 3.3, 3.3, 0.45, 2.8),
    (1, 1, 1, 1, 2, 1),
    (1.7, 2.4, 0.8, 0.5, 0.8, 0.5),
]
PFQ_POINTS = [
    ([0.5, 1.2, 2.3], [3.1, 1.9]),
    ([0.3, 0.7], [2.5]),
    ([-0.4, 2.0, 3.5], [3.0, 4.2]),
    ([1.0, 1.5, 2.5, 0.5], [2.0, 3.0, 2.25]),
]
INC_BETA_POINTS = [(0.5, 0.5, 0.1), (2.5, 7.0, 0.3), (30.0, 20.0, 0.62), (0.05, 3.0, 0.4), (4.0, 0.7, 0.97)]
BB22_POINTS = [(2, 1, 1), (1.5, 2.0, 3.0), (0.5, 0.7, 1.3)]


def b_integral(p):
    lam, lam_p, mu, mu_p, nu, nu_p = [mp.mpf(v) for v in p]

    def f(t):
        w = t ** (lam - 1) * (1 - t) ** (lam_p - 1)
        return w * mp.betainc(mu, mu_p, 0, t, regularized=True) * mp.betainc(nu, nu_p, 0, t, regularized=True)

    return mp.quad(f, [0, 0.5, 1]) / mp.beta(lam, lam_p)


def bb22(lam, mu, mu_p):
    lam, mu, mu_p = mp.mpf(lam), mp.mpf(mu), mp.mpf(mu_p)

    def f(t):
        dens = t ** (mu - 1) * (1 - t) ** (mu_p - 1) / mp.beta(mu, mu_p)
        cdf = mp.betainc(mu, mu_p, 0, t, regularized=True)
        return t**lam * 6 * dens * cdf * (1 - cdf)

    return mp.quad(f, [0, 0.5, 1])


def twice(fn, *args):
    out = []
    for dps in (40, 50):
        with mp.workdps(dps):
            out.append(fn(*args))
    if abs(out[0] - out[1]) > mp.mpf(10) ** -20:
        raise RuntimeError(f"references disagree for {args}: {out}")
    return mp.nstr(out[1], 20)


def main():
    print("B_REFERENCE = {")
    for p in B_POINTS:
        print(f"    {p}: {twice(b_integral, p)},")
    print("}")
    print("PFQ_REFERENCE = [")
    for a, b in PFQ_POINTS:
        print(f"    ({a}, {b}, {twice(lambda a, b: mp.hyper(a, b, 1), a, b)}),")
    print("]")
    print("INC_BETA_REFERENCE = [")
    for a, b, x in INC_BETA_POINTS:
        print(f"    ({a}, {b}, {x}, {twice(lambda *q: mp.betainc(q[0], q[1], 0, q[2], regularized=True), a, b, x)}),")
    print("]")
    print("BB22_REFERENCE = {")
    for q in BB22_POINTS:
        print(f"    {q}: {twice(bb22, *q)},")
    print("}")


if __name__ == "__main__":
    main()
