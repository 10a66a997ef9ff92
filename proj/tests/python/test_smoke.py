import math

import numpy as np
import pytest

maxnorm = pytest.importorskip("maxnorm")


def test_norms_of_identity():
    n = maxnorm.matrix_norms(np.eye(3))
    assert n["rank"] == 3
    assert n["trace"] == pytest.approx(3.0)
    assert n["frobenius"] == pytest.approx(math.sqrt(3.0))
    assert n["linf"] == 1.0


def test_simulate_and_fit_recovers_low_rank_truth():
    truth = maxnorm.make_ground_truth(20, 20, 2, alpha=1.0, seed=4)
    assert np.abs(truth).max() == 1.0
    obs = maxnorm.simulate(truth, 400, seed=3, noise="none")
    res = maxnorm.fit(obs["d1"], obs["d2"], obs["rows"], obs["cols"], obs["values"],
                      alpha=1.0, radius=math.sqrt(2.0), k=2, seed=1)
    assert res["feasible_rows"] and res["feasible_linf"]
    assert np.mean((res["completed"] - truth) ** 2) < 1e-4
    trace = res["objective_trace"]
    assert all(b <= a + 1e-9 for a, b in zip(trace[1:], trace[2:]))


def test_estimate_rank_returns_candidate_errors():
    truth = maxnorm.make_ground_truth(12, 10, 2, seed=5)
    obs = maxnorm.simulate(truth, 100, seed=2, noise="gaussian", sigma=0.05)
    est = maxnorm.estimate_rank(obs["d1"], obs["d2"], obs["rows"], obs["cols"], obs["values"],
                                r_max=4)
    assert set(est["errors"]) == {2, 3, 4}
    assert est["r_star"] in est["errors"]
    assert est["completed"].shape == (12, 10)


def test_spectral_magnitude_of_constant_column():
    f = maxnorm.spectral_magnitude(np.full((8, 1), 2.0))
    assert f[0, 0] == pytest.approx(16.0)
    assert np.abs(f[1:, 0]).max() < 1e-12


def test_theory_calculators():
    rates = maxnorm.rate_bounds(1.0, 1.0, math.sqrt(3.0), 50, 50, 2000)
    assert float(rates["upper_rate"]) == pytest.approx(math.sqrt(3.0) * math.sqrt(0.05))
    rad = maxnorm.rademacher_sign_sup(2, 2, [0, 0, 1, 1], [0, 1, 0, 1], draws=200, seed=1)
    assert float(rad["mc_mean"]) <= float(rad["bound"])
    mats = maxnorm.packing_generate(32, 32, r=2.0, count=5, seed=1)
    assert len(mats) == 5
    assert all(np.abs(m).max() == 1.0 for m in mats)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        maxnorm.fit(2, 2, [0], [0], [1.0], alpha=2.0, radius=1.0)
    with pytest.raises(RuntimeError):
        maxnorm.fit(2, 2, [0, 1], [0, 1], [1e200, -1e200], alpha=1.0, radius=1.0)
