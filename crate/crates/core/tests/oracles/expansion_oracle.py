"""High-precision reference values for the centering sequence m(N), the
correction H(x) and the accompanying CDF.

Evaluated with mpmath at 60 significant digits, term by term, independently of
the Rust implementation. The printed values are frozen into
`tests/analytic_expansion.rs`; rerun this script to regenerate them.
"""

from mpmath import mp, mpf, ln, exp, floor

mp.dps = 60


def constants(p, q1, q2):
    c = ln(1 / p)
    c0 = q1 + q2
    c1 = p * (q1 ** 2 + q2 ** 2) / (q1 * q2) - 1
    c2 = ((q1 ** 2 + q2 ** 2) * p ** 2 / (q1 * q2 * (p - 1)) + p / (p - 1)
          + 2 * (2 * p + 1) * q1 * q2 / (p - 1) ** 3)
    k = (2 * c0 * c2 - c1 ** 2 - c0 ** 2) / (2 * c * c0 ** 2)
    return c, c0, c1, c2, k


def logs(p, n):
    c = ln(1 / p)
    lg = ln(n) / c
    llg = ln(lg) / c
    return lg, llg


def centering(p, q1, q2, n):
    c, c0, c1, c2, k = constants(p, q1, q2)
    lg, ll = logs(p, n)
    r = (c1 - c0) / (c * c0)
    terms = [
        lg,
        2 * ll,
        4 * ll / (c * lg),
        r / lg,
        -4 / c * ll ** 2 / lg ** 2,
        (8 / c ** 2 - 2 * r) * ll / lg ** 2,
        (2 * r / c + k) / lg ** 2,
        16 / (3 * c) * ll ** 3 / lg ** 3,
        (-16 / c ** 2 + 4 * r) * ll ** 2 / lg ** 3,
        -(4 * k + 8 * r / c) * ll / lg ** 3,
        16 / c ** 3 * ll / lg ** 3,
        -8 / c ** 2 * ll ** 2 / lg ** 3,
        -4 * r / c * ll / lg ** 3,
    ]
    return sum(terms), terms


def h(p, q1, q2, n, x):
    c, c0, c1, c2, k = constants(p, q1, q2)
    lg, ll = logs(p, n)
    r = (c1 - c0) / (c * c0)
    x = mpf(x)
    return (-x + 2 * x / (c * lg) - 4 / c * ll / lg ** 2 * x - r / lg ** 2 * x
            + (4 * r - 8 / c ** 2) * ll / lg ** 3 * x + 8 / c * ll ** 2 / lg ** 3 * x
            - x ** 2 / (c * lg ** 2) + 4 / c * ll / lg ** 3 * x ** 2)


def accompanying(p, q1, q2, n, k):
    c = ln(1 / p)
    total, _ = centering(p, q1, q2, n)
    frac = total - floor(total)
    expo = ln((q1 + q2) * q1 * q2 / p ** 2) / c + h(p, q1, q2, n, k - frac)
    return exp(-exp(c * expo))


if __name__ == "__main__":
    third = mpf(1) / 3
    cases = [
        ("1/3,1/3,1/3", third, third, third),
        ("0.5,0.3,0.2", mpf("0.5"), mpf("0.3"), mpf("0.2")),
    ]
    for name, p, q1, q2 in cases:
        n = 3 * mpf(10) ** 6
        total, _ = centering(p, q1, q2, n)
        print(f"[{name}] m(3e6) = {mp.nstr(total, 20)}")
        print(f"[{name}] H(3e6, 0.5) = {mp.nstr(h(p, q1, q2, n, '0.5'), 20)}")
        for k in (-2, -1, 0, 1, 2):
            print(f"[{name}] accompanying(3e6, {k}) = {mp.nstr(accompanying(p, q1, q2, n, k), 20)}")
    n = mpf(3) ** 60
    total, terms = centering(third, third, third, n)
    print(f"[1/3] m(3^60) - log N - 2 log log N = {mp.nstr(total - terms[0] - terms[1], 20)}")
    print(f"[1/3] H(3^60, 1) + 1 = {mp.nstr(h(third, third, third, n, 1) + 1, 20)}")
