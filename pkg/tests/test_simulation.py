import json

import numpy as np
import pytest

from desync_lab.core import SUM_TOLERANCE, builtin_topology
from desync_lab.errors import ConfigError
from desync_lab.export import dumps
from desync_lab.simulation import (
    DESYNC_METRIC,
    InitialState,
    SimConfig,
    SimulationMode,
    desync_error,
    random_gaps,
    run_simulation,
)


class TestSimConfig:
    def test_defaults(self):
        config = SimConfig(mode="single-hop", n=6)
        assert config.mode is SimulationMode.SINGLE_HOP
        assert config.initial is InitialState.EQUILIBRIUM
        assert config.convergence_threshold == pytest.approx(1e-3)
        assert config.period_rounds == 6

    def test_sweep_rounds_are_periods(self):
        assert SimConfig(mode="single-hop", n=6, sweep=True).period_rounds == 1
        assert SimConfig(mode="multi-hop", n=6).period_rounds == 1

    def test_explicit_gaps_switch_initial_state(self):
        config = SimConfig(mode="single-hop", n=3, gaps=[200, 300, 500])
        assert config.initial is InitialState.EXPLICIT
        assert config.gaps == (200.0, 300.0, 500.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(mode="hybrid", n=5),
            dict(mode="single-hop", n=2),
            dict(mode="single-hop", n=5, rounds=0),
            dict(mode="single-hop", n=5, stride=0),
            dict(mode="single-hop", n=5, perturbation=250.0),
            dict(mode="single-hop", n=5, perturbation=1.0, perturb_node=5),
            dict(mode="single-hop", n=3, gaps=[500, 500]),
            dict(mode="single-hop", n=3, gaps=[200, 300, 500], initial="random"),
            dict(mode="single-hop", n=3, initial="explicit"),
            dict(mode="single-hop", n=5, tolerance=0.0),
            dict(mode="multi-hop", n=5, perception_mode="three-hop"),
            dict(mode="multi-hop", n=3),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            SimConfig(**kwargs)

    def test_topology_size_mismatch(self):
        config = SimConfig(mode="multi-hop", n=6, topology=builtin_topology("ring", 5))
        with pytest.raises(ConfigError):
            run_simulation(config)


class TestInitialState:
    def test_random_gaps_are_admissible(self, rng):
        for n in (3, 8, 30):
            gaps = random_gaps(n, 1000.0, rng)
            assert gaps.gaps.min() >= 1000.0 / (10 * n ** 2)
            assert abs(gaps.gaps.sum() - 1000.0) <= SUM_TOLERANCE * 1000.0

    def test_seed_reproduces(self):
        first = run_simulation(SimConfig(mode="single-hop", n=8, initial="random", seed=11))
        again = run_simulation(SimConfig(mode="single-hop", n=8, initial="random", seed=11))
        other = run_simulation(SimConfig(mode="single-hop", n=8, initial="random", seed=12))
        assert first.trace[0].gaps == again.trace[0].gaps
        assert first.trace[0].gaps != other.trace[0].gaps

    def test_invalid_explicit_gaps(self):
        config = SimConfig(mode="single-hop", n=3, gaps=[100, 100, 100])
        with pytest.raises(ConfigError):
            run_simulation(config)

    def test_perturbation_applied(self):
        result = run_simulation(SimConfig(mode="single-hop", n=4, perturbation=10.0, perturb_node=1))
        assert result.trace[0].gaps == (260.0, 240.0, 250.0, 250.0)
        assert result.initial_error == pytest.approx(10.0)


class TestRun:
    def test_equilibrium_stays(self):
        result = run_simulation(SimConfig(mode="single-hop", n=5, rounds=10))
        assert result.converged
        assert result.final_error == 0.0
        assert result.rounds_executed == 10
        assert [record.round for record in result.trace] == list(range(11))
        assert result.metric == DESYNC_METRIC

    def test_stride_keeps_last_round(self):
        result = run_simulation(SimConfig(mode="multi-hop", n=6, rounds=10, stride=3))
        assert [record.round for record in result.trace] == [0, 3, 6, 9, 10]

    def test_trace_errors_match_gaps(self):
        result = run_simulation(SimConfig(mode="multi-hop", n=6, rounds=5, perturbation=8.0))
        for record in result.trace:
            assert record.desync_error == pytest.approx(float(np.max(np.abs(np.array(record.gaps) - 1000.0 / 6))))
        assert result.trace[0].max_force == 0.0
        assert result.trace[1].max_force > 0.0

    @pytest.mark.parametrize("mode", ["single-hop", "multi-hop"])
    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_small_perturbation_decays_tenfold(self, mode, n):
        config = SimConfig(mode=mode, n=n, rounds=500, perturbation=1000.0 / (1000 * n), perturb_node=1)
        result = run_simulation(config)
        assert result.failure is None
        assert result.initial_error == pytest.approx(1.0 / n)
        assert result.final_error <= result.initial_error / 10

    def test_star_trace_matches_golden(self, golden):
        config = SimConfig(mode="multi-hop", n=8, rounds=500, perturbation=1000.0 / 8000, stride=25)
        golden("star8_trace.json", dumps(run_simulation(config)))

    def test_sweep_equals_firings(self):
        config = dict(mode="single-hop", n=7, perturbation=4.0)
        swept = run_simulation(SimConfig(rounds=3, sweep=True, **config))
        fired = run_simulation(SimConfig(rounds=21, **config))
        assert swept.trace[-1].gaps == fired.trace[-1].gaps
        assert len(swept.envelope) == 3

    @pytest.mark.parametrize("topology", ["star", "full", "ring"])
    def test_multi_hop_converges(self, topology):
        config = SimConfig(mode="multi-hop", n=8, rounds=2000, topology=topology, perturbation=5.0, perturb_node=2)
        result = run_simulation(config)
        assert result.failure is None
        assert result.converged
        assert result.final_error <= config.convergence_threshold

    def test_one_hop_ring(self):
        config = SimConfig(mode="multi-hop", n=8, rounds=2000, topology="ring", perception_mode="one-hop", perturbation=5.0)
        assert run_simulation(config).converged

    def test_topology_file(self, tmp_path):
        path = tmp_path / "ring.json"
        path.write_text(json.dumps({"n": 6, "edges": [[i, (i + 1) % 6] for i in range(6)]}))
        from_file = run_simulation(SimConfig(mode="multi-hop", n=6, rounds=20, topology=str(path), perturbation=3.0))
        builtin = run_simulation(SimConfig(mode="multi-hop", n=6, rounds=20, topology="ring", perturbation=3.0))
        assert from_file.trace[-1].gaps == builtin.trace[-1].gaps

    def test_envelope_blocks(self):
        result = run_simulation(SimConfig(mode="single-hop", n=5, rounds=53, perturbation=6.0))
        assert len(result.envelope) == 11
        assert result.envelope[-1] < result.envelope[0]

    def test_envelope_decreases_over_the_run(self):
        result = run_simulation(SimConfig(mode="multi-hop", n=8, rounds=600, perturbation=5.0))
        assert result.envelope[-1] < 1e-3 * result.envelope[0]
        assert max(result.envelope) <= result.initial_error * (1 + 1e-6)

    def test_overshoot_is_reported(self):
        config = SimConfig(mode="single-hop", n=4, rounds=5, coupling=50.0, gaps=[10.0, 400.0, 400.0, 190.0])
        result = run_simulation(config)
        assert result.failure["round"] == 1
        assert result.failure["index"] == 2
        assert result.failure["value"] < 0
        assert not result.converged
        assert result.rounds_executed == 0
        assert result.envelope == ()
        assert result.trace[-1].round == 0

    def test_early_stop_keeps_last_force(self):
        # the first firing moves 75 ms; the second would drive gap 2 negative
        config = SimConfig(mode="single-hop", n=4, rounds=10, stride=5, coupling=50.0, gaps=[400.0, 100.0, 250.0, 250.0])
        result = run_simulation(config)
        assert result.failure["round"] == 2
        assert result.failure["index"] == 2
        assert result.rounds_executed == 1
        assert [record.round for record in result.trace] == [0, 1]
        assert result.trace[-1].max_force == pytest.approx(75.0)
        assert result.trace[-1].gaps == pytest.approx((100.0, 250.0, 325.0, 325.0))

    def test_perturbation_of_explicit_gaps_is_a_config_error(self):
        config = SimConfig(mode="single-hop", n=4, gaps=[10.0, 400.0, 400.0, 190.0], perturbation=20.0)
        with pytest.raises(ConfigError, match="perturbation rejected"):
            run_simulation(config)

    def test_coupling_override_is_reported(self):
        result = run_simulation(SimConfig(mode="single-hop", n=4, coupling=0.5))
        assert result.coupling == 0.5


def test_desync_error_metric(rng):
    gaps = random_gaps(5, 1000.0, rng)
    assert desync_error(gaps) == pytest.approx(float(np.max(np.abs(gaps.gaps - 200.0))))
