"""Smoke test for the `fatou` extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import math

import fatou


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


def main():
    g = fatou.RationalMap.from_name("paper-g")
    assert g.degree == 3
    assert close(g(2.0), 4.0 / 2.0, 1e-12)
    assert g(None) is None
    assert close(g(0.5), (0.125 - 1.5 + 2) / (0.75 - 1), 1e-12)

    same = fatou.RationalMap([2, -3, 0, 1], [-1, 1.5])
    assert close(same(0.3j), g(0.3j), 1e-12)

    crit = g.critical_points()
    assert sum(m - 1 for _, m in crit) == 4

    portrait = g.portrait()
    assert portrait["critically_finite"] and portrait["hyperbolic"]
    assert "inf" in portrait["postcritical_set"]

    for p, expected in [(1, 4), (2, 10)]:
        pts = g.periodic_points(p)
        assert sum(m for _, m, _ in pts) == expected, (p, pts)

    ray = g.trace_ray("1/3")
    p = (-1 - math.sqrt(17)) / 4
    assert ray["landed"]
    re, im = ray["landing"]
    assert abs(re - p) < 1e-6 and abs(im) < 1e-6

    lift = g.lift_circle(-2, 0.1)
    assert [l["degree"] for l in lift["lifts"]] == [3]

    a, b, res = fatou.pinch_params()
    assert close(a, 1.5, 1e-10) and close(b, 1.0, 1e-10) and max(res) < 1e-10

    roots = fatou.pseudo_rabbit_roots(3)
    assert len(roots) == 8
    rabbit = fatou.pseudo_rabbit(3, roots[6])
    assert rabbit.portrait()["critically_finite"]

    ppm = g.render(width=32, height=24)
    header = b"P6\n32 24\n255\n"
    assert ppm.startswith(header) and len(ppm) == len(header) + 32 * 24 * 3

    checks = fatou.run_checks(["rays"])
    assert checks and all(c["passed"] for c in checks), checks

    try:
        g.trace_ray("0.5")
    except ValueError:
        pass
    else:
        raise AssertionError("decimal angle accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
