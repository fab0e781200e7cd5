import json
import math

import numpy as np
import pytest

from desync_lab.core import (
    ZETA_2,
    GapVector,
    PerceptionMatrix,
    PhaseVector,
    SystemConfig,
    Topology,
    amplification,
    builtin_topology,
    coupling_constant,
    equilibrium_gaps,
    force_reach,
    gap_phases,
    load_topology,
    partial_inverse_square_sum,
    perception_matrix,
    perturb,
    ring_gaps,
)
from desync_lab.errors import ConfigError, DegenerateStateError, DomainError, StorageError


class TestConstants:
    def test_coupling_rejects_single_node(self):
        with pytest.raises(DomainError):
            coupling_constant(1, 1000.0)

    def test_coupling_rejects_non_positive_period(self):
        with pytest.raises(DomainError):
            coupling_constant(4, 0.0)

    def test_coupling_two_nodes(self):
        value = coupling_constant(2, 1000.0)
        assert value == pytest.approx(38.597 * 2 ** -1.874, rel=1e-12)
        assert value == pytest.approx(10.538, rel=1e-3)

    def test_coupling_is_linear_in_period(self):
        assert coupling_constant(10, 2000.0) == pytest.approx(2 * coupling_constant(10, 1000.0), rel=1e-12)

    def test_amplification_power_law(self):
        assert amplification(2) / 0.038597 == pytest.approx(2 ** 0.126, rel=1e-12)
        assert amplification(10) == pytest.approx(0.051593, rel=1e-3)

    def test_amplification_rejects_single_node(self):
        with pytest.raises(DomainError):
            amplification(1)

    @pytest.mark.parametrize("n", range(2, 65))
    def test_amplification_matches_coupling(self, n):
        assert amplification(n) == pytest.approx(coupling_constant(n, 500.0) * n ** 2 / 500.0, rel=1e-12)
        assert amplification(n) * 700.0 / n ** 2 == pytest.approx(coupling_constant(n, 700.0), rel=1e-12)

    def test_system_config_derives_coupling(self):
        config = SystemConfig(8, 1000.0)
        assert config.coupling == coupling_constant(8, 1000.0)
        assert config.amplification == pytest.approx(amplification(8), rel=1e-12)
        assert config.reach == 3

    def test_system_config_override(self):
        config = SystemConfig(8, 1000.0, coupling=2.0)
        assert config.coupling == 2.0
        assert config.amplification == pytest.approx(2.0 * 64 / 1000.0)

    @pytest.mark.parametrize("kwargs", [dict(n=1), dict(n=4, period=-1.0), dict(n=4, coupling=0.0)])
    def test_system_config_rejects(self, kwargs):
        with pytest.raises(DomainError):
            SystemConfig(**kwargs)


class TestInverseSquareSums:
    def test_single_term(self):
        assert partial_inverse_square_sum(1, 4) == 1.0

    def test_empty_sum(self):
        assert partial_inverse_square_sum(2, 4) == 0.0

    def test_eight_nodes(self):
        assert partial_inverse_square_sum(1, 8) == pytest.approx(1 + 1 / 4 + 1 / 9, rel=1e-15)

    def test_odd_node_count_uses_reach(self):
        assert force_reach(5) == 2
        assert partial_inverse_square_sum(1, 5) == pytest.approx(1.25)

    def test_rejects_zero_start(self):
        with pytest.raises(DomainError):
            partial_inverse_square_sum(0, 8)

    def test_monotone_and_bounded(self):
        for n in range(4, 80):
            values = [partial_inverse_square_sum(s, n) for s in range(1, n)]
            assert all(a >= b for a, b in zip(values, values[1:]))
            assert partial_inverse_square_sum(1, n + 1) >= partial_inverse_square_sum(1, n)
            assert values[0] <= ZETA_2


class TestGapVector:
    def test_rejects_non_positive_gap(self):
        with pytest.raises(DegenerateStateError):
            GapVector([500.0, 500.0, 0.0], 1000.0)

    def test_rejects_wrong_sum(self):
        with pytest.raises(DomainError):
            GapVector([300.0, 300.0, 300.0], 1000.0)

    def test_is_read_only(self):
        gaps = equilibrium_gaps(4, 1000.0)
        with pytest.raises(ValueError):
            gaps.gaps[0] = 1.0

    def test_equilibrium(self):
        gaps = equilibrium_gaps(8, 1000.0)
        assert np.all(gaps.gaps == 125.0)
        assert gaps.n == 8

    def test_perturb_moves_one_node(self):
        gaps = perturb(equilibrium_gaps(4, 1000.0), node=1, magnitude=10.0)
        assert gaps.as_tuple() == (260.0, 240.0, 250.0, 250.0)

    def test_perturb_wraps_around(self):
        gaps = perturb(equilibrium_gaps(4, 1000.0), node=0, magnitude=10.0)
        assert gaps.as_tuple() == (240.0, 250.0, 250.0, 260.0)

    def test_perturb_rejects_bad_node(self):
        with pytest.raises(DomainError):
            perturb(equilibrium_gaps(4, 1000.0), node=4, magnitude=1.0)


class TestRingGaps:
    def test_equilibrium(self):
        gaps = ring_gaps(PhaseVector([0, 250, 500, 750], 1000.0))
        assert gaps.as_tuple() == (250.0, 250.0, 250.0, 250.0)

    def test_direct_subtraction(self):
        gaps = ring_gaps(PhaseVector([0, 100, 500], 1000.0))
        assert gaps.as_tuple() == (100.0, 400.0, 500.0)

    def test_wraparound(self):
        phases = [900.0, 100.0, 500.0]
        ordered = np.sort(np.mod(np.array(phases) - phases[0], 1000.0))
        expected = np.diff(np.append(ordered, 1000.0))
        gaps = ring_gaps(PhaseVector(phases, 1000.0))
        assert gaps.as_tuple() == pytest.approx((200.0, 400.0, 400.0))
        np.testing.assert_allclose(gaps.gaps, expected)

    def test_duplicate_phases(self):
        with pytest.raises(DegenerateStateError):
            ring_gaps(PhaseVector([0, 100, 100], 1000.0))

    def test_phases_must_be_in_range(self):
        with pytest.raises(DomainError):
            PhaseVector([0, 1000.0], 1000.0)

    def test_round_trip(self, rng):
        for n in (3, 5, 8, 13):
            raw = rng.dirichlet(np.ones(n)) * 1000.0
            gaps = GapVector(raw * 1000.0 / raw.sum(), 1000.0)
            again = ring_gaps(gap_phases(gaps))
            np.testing.assert_allclose(again.gaps, gaps.gaps, atol=1e-12 * 1000.0)


class TestTopology:
    def test_builtin_star(self):
        topology = builtin_topology("star", 5)
        assert topology.adjacency[0, 1:].all()
        assert not topology.adjacency[1:, 1:].any()

    def test_builtin_ring_and_chain(self):
        ring = builtin_topology("ring", 5)
        chain = builtin_topology("chain", 5)
        assert ring.adjacency.sum() == 10
        assert chain.adjacency.sum() == 8
        assert ring.adjacency[4, 0] and not chain.adjacency[4, 0]

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            builtin_topology("mesh", 5)

    def test_rejects_asymmetric(self):
        adjacency = np.zeros((3, 3), dtype=bool)
        adjacency[0, 1] = True
        with pytest.raises(ConfigError):
            Topology(adjacency)

    def test_components(self):
        adjacency = np.zeros((4, 4), dtype=bool)
        adjacency[0, 1] = adjacency[1, 0] = True
        topology = Topology(adjacency)
        assert topology.components() == 3
        assert not topology.is_connected
        assert builtin_topology("chain", 6).is_connected

    def test_load(self, tmp_path):
        path = tmp_path / "chain.json"
        path.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2]]}))
        topology = load_topology(path)
        assert np.array_equal(topology.adjacency, builtin_topology("chain", 3).adjacency)

    @pytest.mark.parametrize("edges", [[[0, 1], [1, 0]], [[1, 1]], [[0, 3]], [[0]]])
    def test_load_rejects_bad_edges(self, tmp_path, edges):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n": 3, "edges": edges}))
        with pytest.raises(ConfigError):
            load_topology(path)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(StorageError) as excinfo:
            load_topology(tmp_path / "missing.json")
        assert excinfo.value.exit_code == 4
        assert "missing.json" in str(excinfo.value)


class TestPerception:
    def test_chain_one_hop(self):
        c = perception_matrix(builtin_topology("chain", 3), "one-hop").c
        assert c[0, 1] and c[1, 0] and c[1, 2] and c[2, 1]
        assert not c[0, 2] and not c[2, 0]

    def test_chain_two_hop(self):
        c = perception_matrix(builtin_topology("chain", 3), "two-hop").c
        assert np.array_equal(c, ~np.eye(3, dtype=bool))

    def test_star_two_hop_is_full(self):
        c = perception_matrix(builtin_topology("star", 6), "two-hop").c
        assert np.array_equal(c, PerceptionMatrix.full(6).c)

    def test_diagonal_is_cleared(self):
        c = perception_matrix(builtin_topology("full", 5), "two-hop").c
        assert not np.diag(c).any()

    @pytest.mark.parametrize("mode", ["one-hop", "two-hop"])
    def test_symmetric(self, rng, mode):
        for _ in range(20):
            upper = np.triu(rng.random((9, 9)) < 0.3, k=1)
            topology = Topology(upper | upper.T)
            c = perception_matrix(topology, mode).c
            assert np.array_equal(c, c.T)

    def test_records_mode(self):
        perception = perception_matrix(builtin_topology("ring", 6), "one-hop")
        assert perception.mode.value == "one-hop"

    def test_rejects_self_perception(self):
        with pytest.raises(ConfigError):
            PerceptionMatrix(np.eye(3, dtype=bool))


def test_zeta_constant():
    assert ZETA_2 == pytest.approx(math.pi ** 2 / 6)
