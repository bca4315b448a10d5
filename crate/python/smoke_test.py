"""Smoke test for the compiled extension.

Build and install first:
    pip install --no-build-isolation ./crates/py
"""

import math

import contam_runs_py as cr


def main():
    u = cr.TrialDistribution.uniform()
    assert abs(cr.window_probability(u, 3) - 13 / 27) < 1e-15
    assert abs(u.constants()[1] - 2 / 3) < 1e-15
    assert abs(cr.theorem1_limit_cdf(math.log(2)) - 0.5) < 1e-15
    assert abs(cr.longest_run_cdf(u, 5, 3) - 64 / 243) < 1e-15

    total, terms = cr.m_of_n(u, 3e6)
    assert abs(total - sum(v for _, v in terms)) < 1e-9
    cdf = cr.accompanying_cdf(u, 3e6, [-1, 0, 1, 2])
    assert all(a <= b for a, b in zip(cdf, cdf[1:]))

    a = cr.simulate_longest(u, 10_000, 50, seed=3, threads=1)
    b = cr.simulate_longest(u, 10_000, 50, seed=3, threads=2)
    assert a == b and len(a) == 50

    m = 8
    times = cr.simulate_hitting(u, m, 500, seed=5)
    scale = cr.alpha(u, m) * cr.window_probability(u, m)
    d = cr.sup_distance_exponential([t * scale for t in times if t is not None])
    assert 0 <= d < 0.15, d

    try:
        cr.TrialDistribution(0.5, 0.3, 0.3)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid distribution accepted")
    try:
        cr.longest_run_cdf(u, 10**9, 500, budget=1000)
    except OverflowError:
        pass
    else:
        raise AssertionError("budget not enforced")

    print("python smoke test: ok", cr.RNG_SCHEME)


if __name__ == "__main__":
    main()
