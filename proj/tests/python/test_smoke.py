"""End-to-end smoke tests for the python module (built by CMake; the test
runner puts the module directory on PYTHONPATH)."""

import math

import gibbsdyn


def test_potential_shape():
    r_min = 2.0 ** (1.0 / 6.0)
    assert math.isclose(gibbsdyn.potential_value(r_min), -0.01, rel_tol=1e-12)
    assert abs(gibbsdyn.potential_gradient(r_min)) < 1e-12
    assert gibbsdyn.potential_value(1.0) == 0.0
    assert gibbsdyn.potential_value(0.5, c=0.0) == 0.0


def test_sampler_free_gas_mean_count():
    out = gibbsdyn.sample(z=0.8, c=0.0, count=2000, seed=3, burn_in=5000)
    counts = [len(s) for s in out["samples"]]
    mean = sum(counts) / len(counts)
    # Poisson(8) mean over ~2000 weakly dependent draws.
    assert abs(mean - 8.0) < 0.5
    assert out["ess"] > 100


def test_simulate_deterministic_and_diffusive():
    kw = dict(points=[[-1.0], [1.3]], side=10.0, dt=1e-3, steps=200, stride=20, seed=11)
    a = gibbsdyn.simulate("gsdad", **kw)
    b = gibbsdyn.simulate("gsdad", **kw)
    assert a["frames"] == b["frames"]
    assert a["t"][0] == 0.0 and math.isclose(a["t"][-1], 0.2, rel_tol=1e-9)
    assert a["rejections"] == 0
    c = gibbsdyn.simulate("gsdad", seed=12, **{k: v for k, v in kw.items() if k != "seed"})
    assert c["frames"][-1] != a["frames"][-1]


def test_simulate_tagged_frame():
    out = gibbsdyn.simulate(
        "coup",
        points=[[2.0], [-2.5]],
        xi=[0.3],
        side=10.0,
        boundary="periodic",
        wall="wrap",
        dt=1e-3,
        steps=50,
        stride=10,
        seed=5,
    )
    assert out["xi"] is not None and len(out["xi"]) == len(out["t"])
    assert all(len(x) == 1 for x in out["xi"])


def test_k_transform_subset_sum():
    # K of the empty-set indicator is identically 1.
    empty = lambda pts: 1.0 if len(pts) == 0 else 0.0
    assert gibbsdyn.k_transform(empty, 0, [[0.5], [-1.0], [2.0]]) == 1.0
    # K of a one-body function sums it over the configuration.
    one = lambda pts: pts[0][0] if len(pts) == 1 else (1.0 if not pts else 0.0)
    val = gibbsdyn.k_transform(one, 1, [[0.5], [-1.0], [2.0]])
    assert math.isclose(val, 1.0 + 1.5, rel_tol=1e-12)


def test_verify_reports_structure():
    reports = gibbsdyn.verify(z=0.3, samples=2000, seed=21, sign="minus")
    assert len(reports) == 10
    ids = {r["id"] for r in reports}
    assert "ibp_a" in ids and "dirichlet_coup" in ids and "symmetry_env" in ids
    for r in reports:
        assert set(r) >= {"id", "estimate", "se", "z", "n", "pass", "inconclusive"}
        assert r["n"] > 0
