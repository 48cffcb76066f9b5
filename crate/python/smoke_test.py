"""Smoke test for the sdpcluster extension module.

Build and install first, e.g. `pip install ./crates/python` (needs maturin),
then run `python python/smoke_test.py`.
"""

import math

import sdpcluster


def main():
    spec = sdpcluster.MixtureSpec.bernoulli(n=40, p=2000, alpha=0.2, w1=0.5)
    assert abs(spec.gamma - 0.04) < 1e-12, spec.gamma
    x, truth = spec.sample(seed=1)
    assert len(x) == 40 and len(x[0]) == 2000

    cd = sdpcluster.center(x)
    n = len(x)
    assert abs(cd.lambda_ + cd.tau / (n - 1)) < 1e-9 * abs(cd.tau)

    sol = sdpcluster.solve(cd.build_a(), seed=3)
    assert sol.converged
    sdp_rate = sdpcluster.success_rate(sol.labels(), truth)

    value, v1 = sdpcluster.top_eigen(cd.gram)
    assert value > 0 and abs(math.fsum(c * c for c in v1) - 1.0) < 1e-9
    pw_rate = sdpcluster.success_rate(sdpcluster.peng_wei_split(v1, cd.y), truth)
    print(f"sdp success {sdp_rate:.3f}, spectral success {pw_rate:.3f}")
    assert sdp_rate == 1.0 and pw_rate >= 0.9

    r = spec.reference_r()
    ref = sdpcluster.solve(r, tol=1e-12)
    assert ref.labels() in (truth, [-t for t in truth])

    try:
        sdpcluster.MixtureSpec.bernoulli(n=10, p=10, alpha=1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid alpha accepted")

    passed, rows = sdpcluster.run_verify(0)
    assert passed, [r for r in rows if not r[4]]
    print(f"verify: {len(rows)} checks passed")
    print("smoke test ok")


if __name__ == "__main__":
    main()
