import math

import numpy as np
import pytest

from treekuramoto import (
    NetworkModel,
    NoiseSpec,
    RandomStream,
    build_tree,
    drift_estimate,
    drift_function_V,
    drift_sweep,
    edge_box_sampler,
    fixed_initial,
    recurrence_experiment,
    simulate,
)
from treekuramoto.analysis import ESCAPE_TOLERANCE, InvalidInitSampler
from treekuramoto.dynamics import edge_geodesics
from treekuramoto.noise import sample_noise

from conftest import THETA0_5, make_line5_model, random_tree

PI = math.pi
GAMMA = PI / 2 - 0.05


def two_node_model(kappa=1.0, tau=0.3, omega=(0.0, 0.0)):
    g = build_tree(2, [(0, 1)])
    return NetworkModel(
        graph=g,
        omega=np.array(omega, dtype=float),
        noise=NoiseSpec.none(2),
        kappa=kappa,
        tau=tau,
        variant="undirected",
    )


# --- simulate ------------------------------------------------------------------


def test_constant_trajectory_for_locked_silent_network():
    g = build_tree(3, [(0, 1), (1, 2)])
    model = NetworkModel(g, np.zeros(3), NoiseSpec.none(3), 1.0, 0.1, "undirected")
    rec = simulate(model, np.full(3, 0.4), 50, GAMMA, RandomStream(seed=1))
    assert np.all(rec.theta == 0.4)
    assert np.all(rec.drift_v == 0.0)
    assert np.all(rec.in_set)
    assert np.all(rec.max_edge_distance == 0.0)


def test_record_internal_consistency():
    model = make_line5_model()
    rec = simulate(model, THETA0_5, 400, GAMMA, RandomStream(seed=2))
    assert rec.steps[0] == 0 and rec.steps[-1] == 400
    assert rec.theta.shape == (401, 5)
    recomputed_v = np.array(
        [drift_function_V(model.graph, rec.theta[k], GAMMA) for k in range(401)]
    )
    assert np.allclose(rec.drift_v, recomputed_v, atol=1e-12)
    assert np.array_equal(rec.in_set, rec.max_edge_distance <= GAMMA)
    assert np.array_equal(
        rec.edge_distances, edge_geodesics(model.graph, rec.theta)
    )
    assert np.array_equal(rec.max_edge_distance, rec.edge_distances.max(axis=1))


def test_reference_zero_mean_run_stays_cohesive():
    model = make_line5_model()
    rec = simulate(model, THETA0_5, 5000, GAMMA, RandomStream(seed=10))
    assert bool(rec.in_set.all())
    assert rec.max_edge_distance.max() < GAMMA


def test_realized_frequency_column_matches_stream():
    model = make_line5_model()
    stream = RandomStream(seed=3)
    rec = simulate(model, THETA0_5, 20, GAMMA, stream)
    noise_stream = stream.child(purpose="noise")
    for k in (0, 7, 20):
        expected = model.omega + sample_noise(model.noise, noise_stream, k)
        assert np.array_equal(rec.realized_frequency[k], expected)


def test_simulation_reproducible_bitwise():
    model = make_line5_model()
    a = simulate(model, THETA0_5, 300, GAMMA, RandomStream(seed=4))
    b = simulate(model, THETA0_5, 300, GAMMA, RandomStream(seed=4))
    assert np.array_equal(a.theta, b.theta)
    assert np.array_equal(a.realized_frequency, b.realized_frequency)
    assert np.array_equal(a.drift_v, b.drift_v)


def test_simulate_validations():
    model = make_line5_model()
    with pytest.raises(ValueError):
        simulate(model, THETA0_5, 0, GAMMA, RandomStream(seed=1))
    with pytest.raises(ValueError):
        simulate(model, np.zeros(3), 10, GAMMA, RandomStream(seed=1))


# --- initial-state samplers -------------------------------------------------------


def test_edge_box_sampler_band_and_determinism():
    rng = np.random.default_rng(5)
    for trial in range(30):
        g = random_tree(rng, int(rng.integers(2, 10)))
        sampler = edge_box_sampler(0.7, 1.1)
        stream = RandomStream(seed=trial, purpose="init")
        theta = sampler(g, stream)
        again = sampler(g, stream)
        assert np.array_equal(theta, again)
        dist = edge_geodesics(g, theta)
        assert np.all(dist >= 0.7) and np.all(dist < 1.1)
        assert theta[0] == 0.0


def test_edge_box_sampler_validation():
    with pytest.raises(ValueError):
        edge_box_sampler(-0.1, 1.0)
    with pytest.raises(ValueError):
        edge_box_sampler(1.0, 1.0)
    with pytest.raises(ValueError):
        edge_box_sampler(0.0, PI)


def test_invalid_init_sampler_detected():
    model = two_node_model()

    def bad_sampler(graph, stream):
        return np.array([0.0, PI - 0.1])  # edge distance above pi/2

    with pytest.raises(InvalidInitSampler):
        recurrence_experiment(model, bad_sampler, GAMMA, 2, 10, RandomStream(seed=1))


# --- recurrence ----------------------------------------------------------------


def oracle_trial_stats(max_edge, gamma):
    """Independent scalar re-implementation of the per-trial bookkeeping."""
    level = PI / 2 - ESCAPE_TOLERANCE
    in0 = max_edge[0] <= gamma
    exited = False
    return_time = -1
    escape_time = 0 if max_edge[0] >= level else -1
    for k in range(1, len(max_edge)):
        inside = max_edge[k] <= gamma
        if return_time < 0 and inside and (not in0 or exited):
            return_time = k
        if in0 and not inside:
            exited = True
        if escape_time < 0 and max_edge[k] >= level:
            escape_time = k
    if in0 and not exited:
        return_time = 1
    return return_time, escape_time, float(max_edge.max())


def test_batch_trials_equal_sequential_simulation():
    model = make_line5_model(kappa=5.0)  # weaker coupling: some exits happen
    base = RandomStream(seed=11)
    sampler = edge_box_sampler(0.0, PI / 2)
    horizon, trials = 300, 6
    stats = recurrence_experiment(model, sampler, GAMMA, trials, horizon, base)
    for t in range(trials):
        theta0 = sampler(model.graph, base.child(trial=t, purpose="init"))
        rec = simulate(model, theta0, horizon, GAMMA, base.child(trial=t))
        rt, et, mx = oracle_trial_stats(rec.max_edge_distance, GAMMA)
        assert stats.return_time[t] == rt
        assert stats.escape_time[t] == et
        assert stats.max_excursion[t] == pytest.approx(mx, abs=0.0)
        assert stats.returned[t] == (rt >= 0)
        assert stats.started_in_set[t] == (rec.max_edge_distance[0] <= GAMMA)


def test_two_node_rotation_returns():
    # With (numerically) uncoupled oscillators and distinct frequencies
    # the relative phase rotates by tau * (w0 - w1) each step and
    # re-enters the cohesive set periodically.
    g = build_tree(2, [(0, 1)])
    model = NetworkModel(
        g, np.array([1.0, 0.0]), NoiseSpec.none(2), 1e-9, 0.1, "undirected"
    )
    gamma = 1.0
    d0 = 1.35
    stats = recurrence_experiment(
        model, fixed_initial([d0 / 2, -d0 / 2]), gamma, 3, 500, RandomStream(seed=1)
    )
    # closed-form oracle on the scalar rotation
    d, expect = d0, None
    for k in range(1, 501):
        d = d + 0.1
        geo = min(abs(d) % (2 * PI), 2 * PI - abs(d) % (2 * PI))
        if geo <= gamma:
            expect = k
            break
    assert stats.return_fraction == 1.0
    assert np.all(stats.return_time == expect)


def test_two_node_contraction_regime():
    # kappa * tau <= 1: the edge distance is non-increasing step by step.
    for kt in (0.3, 0.9, 1.0):
        model = two_node_model(kappa=kt, tau=1.0)
        for d0 in (0.3, 1.0, 1.5, PI / 2):
            rec = simulate(
                model,
                np.array([d0 / 2, -d0 / 2]),
                200,
                GAMMA,
                RandomStream(seed=5),
            )
            diffs = np.diff(rec.max_edge_distance)
            assert np.all(diffs <= 1e-12)
    # in the rest of the recurrent window monotonicity can fail (a step
    # can overshoot past zero, transiently even beyond pi/2) but every
    # trajectory still returns to the cohesive set
    for kt in (1.2, 1.5):
        model = two_node_model(kappa=kt, tau=1.0)
        stats = recurrence_experiment(
            model,
            edge_box_sampler(0.0, PI / 2),
            GAMMA,
            20,
            200,
            RandomStream(seed=6),
        )
        assert stats.return_fraction == 1.0


def test_escape_detected_in_strong_negative_regime():
    model = make_line5_model(means=np.array([0.0, 0.0, -3.0, 0.0, 0.0]))
    stats = recurrence_experiment(
        model, fixed_initial(THETA0_5), GAMMA, 10, 2000, RandomStream(seed=7)
    )
    assert stats.escaped_fraction > 0.5
    assert np.all(stats.escape_time[stats.escaped] >= 1)
    assert np.all(stats.max_excursion[stats.escaped] >= PI / 2 - ESCAPE_TOLERANCE)


def test_recurrence_validations():
    model = two_node_model()
    sampler = edge_box_sampler()
    with pytest.raises(ValueError):
        recurrence_experiment(model, sampler, GAMMA, 0, 10, RandomStream(seed=1))
    with pytest.raises(ValueError):
        recurrence_experiment(model, sampler, GAMMA, 2, 0, RandomStream(seed=1))


# --- drift ---------------------------------------------------------------------


def test_drift_estimate_deterministic_when_silent():
    model = two_node_model(kappa=0.5, tau=0.2)
    state = np.array([0.6, -0.6])
    est = drift_estimate(model, state, GAMMA, 100, RandomStream(seed=8))
    from treekuramoto.dynamics import step_theta

    v0 = drift_function_V(model.graph, state, GAMMA)
    v1 = drift_function_V(
        model.graph, step_theta(model, state, np.zeros(2)), GAMMA
    )
    assert est.stderr == 0.0
    assert est.estimate == pytest.approx(v1 - v0, abs=1e-15)


def test_drift_negative_on_annulus_for_reference_model():
    model = make_line5_model()
    sampler = edge_box_sampler(GAMMA, PI / 2)
    for trial in range(5):
        theta = sampler(model.graph, RandomStream(seed=trial, purpose="probe"))
        est = drift_estimate(model, theta, GAMMA, 2000, RandomStream(seed=trial))
        assert est.estimate + 3.0 * est.stderr < 0.0


def test_negative_mean_flips_drift_sign_at_mixed_states():
    # Where the failure regime actually escapes: states whose node-2
    # edges are large while the outer edges are small. There the
    # expected one-step drift is strongly positive once the node-2
    # disturbance mean is -3, and negative for zero means. (On the
    # all-edges-large annulus the total drift stays negative in both
    # cases; escape is driven through this mixed region.)
    diffs = np.array([0.1, 1.5, -1.5, -0.1])
    theta = np.zeros(5)
    g = make_line5_model().graph
    for e, (tail, head) in enumerate(g.edges):
        theta[head] = theta[tail] - diffs[e]

    bad = make_line5_model(means=np.array([0.0, 0.0, -3.0, 0.0, 0.0]))
    est_bad = drift_estimate(bad, theta, GAMMA, 20_000, RandomStream(seed=31))
    assert est_bad.estimate - 3.0 * est_bad.stderr > 0.3

    zero = make_line5_model()
    est_zero = drift_estimate(zero, theta, GAMMA, 20_000, RandomStream(seed=31))
    assert est_zero.estimate + 3.0 * est_zero.stderr < -0.2


def test_boundary_graze_contracts_after_one_step():
    # A start a few millirad inside the admissible boundary can be
    # pushed a fraction of a millirad past pi/2 by the first strong
    # coupling step; the pull inward then wins immediately. This is the
    # one mechanism by which cohesive-regime trials register escapes.
    model = make_line5_model()
    base = RandomStream(seed=501)
    sampler = edge_box_sampler()
    stats = recurrence_experiment(model, sampler, GAMMA, 200, 50, base)
    grazed = np.flatnonzero(stats.escaped)
    assert grazed.size >= 1
    t = int(grazed[0])
    assert stats.escape_time[t] == 1
    assert stats.returned[t]
    assert stats.return_time[t] <= 5
    # the overshoot is marginal: well under a millirad past pi/2
    assert stats.max_excursion[t] < PI / 2 + 1e-3
    theta0 = sampler(model.graph, base.child(trial=t, purpose="init"))
    assert edge_geodesics(model.graph, theta0).max() > PI / 2 - 1e-2


def test_drift_requires_two_samples():
    model = two_node_model()
    with pytest.raises(ValueError):
        drift_estimate(model, np.zeros(2), GAMMA, 1, RandomStream(seed=1))


def test_drift_sweep_empty_and_band():
    model = make_line5_model()
    assert drift_sweep(model, GAMMA, 0, 10, RandomStream(seed=1)) == []
    estimates = drift_sweep(model, GAMMA, 8, 64, RandomStream(seed=2))
    assert len(estimates) == 8
    for est in estimates:
        dist = edge_geodesics(model.graph, est.theta)
        assert np.all(dist >= GAMMA) and np.all(dist < PI / 2)
        assert est.samples == 64
    # distinct probe coordinates give distinct states
    assert not np.array_equal(estimates[0].theta, estimates[1].theta)


def test_drift_sweep_reproducible():
    model = make_line5_model()
    a = drift_sweep(model, GAMMA, 3, 50, RandomStream(seed=9))
    b = drift_sweep(model, GAMMA, 3, 50, RandomStream(seed=9))
    for x, y in zip(a, b):
        assert np.array_equal(x.theta, y.theta)
        assert x.estimate == y.estimate
        assert x.stderr == y.stderr
