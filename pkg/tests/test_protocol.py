"""
Tests for the distribution protocol, the baseline and the simulation loop
"""

import numpy as np
import pytest

from vanet_pcd.core.channel import LinkSnapshot
from vanet_pcd.core.content import ContentState
from vanet_pcd.core.metrics import per_slot_series
from vanet_pcd.core.protocol import (
    SimulationState, resolve_deliveries, run_slot_baseline, run_slot_proposed, simulate, split_network,
)
from vanet_pcd.utils.config import ScenarioConfig
from vanet_pcd.utils.random_streams import RandomStreams

from conftest import edges_to_adjacency


def _links(n, edges, probability=1.0):
    adjacency = edges_to_adjacency(n, edges)
    return LinkSnapshot.from_matrices(adjacency, np.full((n, n), probability))


def _state(make_fleet, config, sets, num_packets, slot=1):
    fleet = make_fleet([(0, 100.0 * i, 30.0) for i in range(len(sets))])
    content = ContentState.from_sets(sets, num_packets)
    return SimulationState(config=config, fleet=fleet, content=content, slot=slot)


class TestSplitNetwork:
    """Test subnetwork construction"""

    def test_disconnected(self, make_fleet):
        """Test isolated OBUs each found their own subnetwork"""
        fleet = make_fleet([(0, 0.0, 30.0)] * 1 + [(0, 1000.0 * i, 30.0) for i in range(1, 5)])
        subnetworks = split_network(fleet, np.zeros((5, 5), dtype=bool), 8, np.random.default_rng(0))
        assert sorted(s.size for s in subnetworks) == [1] * 5

    def test_clique_fits(self, make_fleet):
        """Test a clique of N_max OBUs forms one subnetwork"""
        fleet = make_fleet([(0, 0.0, 30.0)] * 8)
        adjacency = ~np.eye(8, dtype=bool)
        subnetworks = split_network(fleet, adjacency, 8, np.random.default_rng(0))
        assert [s.size for s in subnetworks] == [8]

    def test_clique_overflow(self, make_fleet):
        """Test the ninth OBU of a clique founds a new subnetwork"""
        fleet = make_fleet([(0, 0.0, 30.0)] * 9)
        adjacency = ~np.eye(9, dtype=bool)
        subnetworks = split_network(fleet, adjacency, 8, np.random.default_rng(0))
        assert sorted(s.size for s in subnetworks) == [1, 8]

    def test_partitions_the_fleet(self, make_fleet):
        """Test subnetworks are disjoint, cover the fleet and respect N_max"""
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 15))
            upper = np.triu(rng.random((n, n)) < 0.4, k=1)
            adjacency = upper | upper.T
            fleet = make_fleet([(0, 0.0, 30.0)] * n)
            subnetworks = split_network(fleet, adjacency, 3, rng)
            members = [i for s in subnetworks for i in s.members]
            assert sorted(members) == list(range(n))
            assert all(s.size <= 3 for s in subnetworks)

    def test_invalid_limit(self, make_fleet):
        """Test N_max must be positive"""
        with pytest.raises(ValueError):
            split_network(make_fleet([(0, 0.0, 30.0)]), np.zeros((1, 1), dtype=bool), 0,
                          np.random.default_rng(0))


class TestResolveDeliveries:
    """Test the global collision rule"""

    def test_single_transmitter(self):
        """Test a lone transmitter reaches every neighbor lacking its packet"""
        links = _links(3, [(0, 1), (0, 2)])
        content = ContentState.from_sets([[0], [], [0]], 1)
        deliveries = resolve_deliveries({0: 0}, links, content, np.random.default_rng(0))
        assert [(d.receiver, d.packet, d.transmitter) for d in deliveries] == [(1, 0, 0)]

    def test_hidden_terminal(self):
        """Test a receiver between two transmitters gets nothing"""
        links = _links(3, [(0, 1), (1, 2)])
        content = ContentState.from_sets([[0], [], [1]], 2)
        assert resolve_deliveries({0: 0, 2: 1}, links, content, np.random.default_rng(0)) == []

    def test_transmitters_do_not_receive(self):
        """Test adjacent transmitters never receive from each other"""
        links = _links(2, [(0, 1)])
        content = ContentState.from_sets([[0], [1]], 2)
        assert resolve_deliveries({0: 0, 1: 1}, links, content, np.random.default_rng(0)) == []

    def test_unusable_link(self):
        """Test a zero success probability never delivers"""
        links = _links(2, [(0, 1)], probability=0.0)
        content = ContentState.from_sets([[0], []], 1)
        assert resolve_deliveries({0: 0}, links, content, np.random.default_rng(0)) == []

    def test_packet_must_be_owned(self):
        """Test broadcasting a packet one does not hold is rejected"""
        links = _links(2, [(0, 1)])
        content = ContentState.from_sets([[0], []], 2)
        with pytest.raises(ValueError):
            resolve_deliveries({0: 1}, links, content, np.random.default_rng(0))

    def test_matches_brute_force_oracle(self):
        """Test agreement with an exhaustive per-receiver oracle on random instances"""
        rng = np.random.default_rng(99)
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(1, 5))
            upper = np.triu(rng.random((n, n)) < 0.5, k=1)
            adjacency = upper | upper.T
            probabilities = np.triu(rng.integers(0, 2, size=(n, n)).astype(float), k=1)
            probabilities = probabilities + probabilities.T
            links = LinkSnapshot.from_matrices(adjacency, probabilities)
            possession = rng.random((n, m)) < 0.5
            content = ContentState(possession=possession)

            transmissions = {}
            for i in range(n):
                owned = np.flatnonzero(possession[i])
                if owned.size and rng.random() < 0.5:
                    transmissions[i] = int(rng.choice(owned))

            expected = set()
            for receiver in range(n):
                if receiver in transmissions:
                    continue
                heard = [t for t in transmissions if adjacency[t, receiver]]
                if len(heard) == 1:
                    packet = transmissions[heard[0]]
                    if not possession[receiver, packet] and probabilities[heard[0], receiver] == 1.0:
                        expected.add((receiver, packet, heard[0]))

            realized = resolve_deliveries(transmissions, links, content, np.random.default_rng(0))
            assert {tuple(d) for d in realized} == expected


class TestBaselineSlot:
    """Test the carrier-sense baseline"""

    def test_isolated_obu_transmits(self, make_fleet, default_config):
        """Test an OBU with nobody to sense always transmits"""
        for seed in range(10):
            state = _state(make_fleet, default_config, [[0, 1], []], 2)
            report = run_slot_baseline(state, _links(2, []), RandomStreams(seed))
            assert report.transmitters == frozenset({0})
            assert report.transmissions[0] in (0, 1)

    def test_adjacent_pair_one_transmits(self, make_fleet, default_config):
        """Test exactly one of two adjacent OBUs transmits"""
        for seed in range(10):
            state = _state(make_fleet, default_config, [[0], [1]], 2)
            report = run_slot_baseline(state, _links(2, [(0, 1)]), RandomStreams(seed))
            assert report.num_transmitters == 1
            assert len(report.deliveries) == 1
            assert report.switch_count == 0

    def test_hidden_terminal_collision(self, make_fleet, default_config):
        """Test the chain ends both transmit and the middle receives nothing"""
        state = _state(make_fleet, default_config, [[0], [], [1]], 2)
        report = run_slot_baseline(state, _links(3, [(0, 1), (1, 2)]), RandomStreams(0))
        assert report.transmitters == frozenset({0, 2})
        assert report.deliveries == ()
        assert state.content.total == 2


class TestProposedSlot:
    """Test one slot of the coalition-based scheme"""

    def test_completed_state(self, make_fleet, default_config):
        """Test nobody transmits when every OBU holds every packet"""
        state = _state(make_fleet, default_config, [[0, 1], [0, 1], [0, 1]], 2)
        report = run_slot_proposed(state, _links(3, [(0, 1), (1, 2)]), RandomStreams(0))
        assert report.transmissions == {}
        assert report.deliveries == ()

    def test_greedy_broadcast(self, make_fleet, default_config):
        """Test the best coalitions broadcast their greedy packets"""
        state = _state(make_fleet, default_config, [[0], [1], [], []], 2)
        report = run_slot_proposed(state, _links(4, [(0, 2), (1, 3)]), RandomStreams(0))
        assert report.transmissions == {0: 0, 1: 1}
        assert {(d.receiver, d.packet) for d in report.deliveries} == {(2, 0), (3, 1)}
        assert report.total == 4
        assert report.normalized_total == 0.5
        assert report.expected_rates == (1.0, 1.0)

    def test_cross_subnetwork_collision(self, make_fleet, default_config):
        """Test a receiver hearing transmitters of two subnetworks gets nothing"""
        config = default_config.replace(N_max=1)
        state = _state(make_fleet, config, [[0], [], [1]], 2)
        report = run_slot_proposed(state, _links(3, [(0, 1), (1, 2)]), RandomStreams(0))
        assert len(report.subnetworks) == 3
        assert report.transmitters == frozenset({0, 2})
        assert report.deliveries == ()

    def test_split_period(self, make_fleet, default_config):
        """Test subnetworks are kept between splits and recomputed every K slots"""
        state = _state(make_fleet, default_config, [[0], []], 1)
        links = _links(2, [(0, 1)], probability=0.0)
        run_slot_proposed(state, links, RandomStreams(0))
        first = state.subnetworks
        state.slot = 2
        run_slot_proposed(state, _links(2, []), RandomStreams(0))
        assert state.subnetworks is first
        state.slot = default_config.K + 1
        run_slot_proposed(state, _links(2, []), RandomStreams(0))
        assert len(state.subnetworks) == 2


class TestSimulate:
    """Test whole runs"""

    def test_full_initial_allocation(self):
        """Test a large RSU coverage leaves nothing to distribute"""
        trace = simulate(ScenarioConfig(D=800.0))
        assert len(trace) == 0
        assert trace.completed
        assert trace.completion_slot == 0

    def test_reproducible(self, small_config):
        """Test identical seeds give identical traces"""
        for scheme in ("proposed", "baseline"):
            first = simulate(small_config, scheme, RandomStreams(3))
            second = simulate(small_config, scheme, RandomStreams(3))
            assert per_slot_series(first) == per_slot_series(second)

    def test_conservation(self, small_config):
        """Test P(t) is non-decreasing and bounded by NM"""
        for scheme in ("proposed", "baseline"):
            trace = simulate(small_config, scheme, RandomStreams(1))
            totals = [trace.initial_total] + trace.totals
            assert all(a <= b for a, b in zip(totals, totals[1:]))
            assert totals[-1] <= small_config.total_demand
            assert len(trace) <= small_config.t_max

    def test_slot_report_invariants(self, small_config):
        """Test deliveries come from transmitters, once per receiver, to non-transmitters"""
        trace = simulate(small_config, "proposed", RandomStreams(2))
        for report in trace.reports:
            receivers = [d.receiver for d in report.deliveries]
            assert len(receivers) == len(set(receivers))
            for delivery in report.deliveries:
                assert report.transmissions[delivery.transmitter] == delivery.packet
                assert delivery.receiver not in report.transmitters
            assert all(s.size <= small_config.N_max for s in report.subnetworks)
            selected = set()
            for group in report.broadcasting:
                if group is not None:
                    selected |= group
            assert report.transmitters <= selected

    def test_baseline_has_no_switches(self, small_config):
        """Test baseline traces never report switch operations"""
        trace = simulate(small_config, "baseline", RandomStreams(4))
        assert trace.total_switches == 0

    def test_warm_start(self, small_config):
        """Test runs seeded with the previous partition stay valid"""
        trace = simulate(small_config.replace(warm_start=True), "proposed", RandomStreams(5))
        assert trace.final_total <= small_config.total_demand

    def test_unknown_scheme(self, small_config):
        """Test unknown schemes are rejected"""
        with pytest.raises(ValueError):
            simulate(small_config, "flooding")

    def test_defaults_to_config_seed(self, small_config):
        """Test the config seed drives runs without explicit streams"""
        config = small_config.replace(seed=6)
        assert per_slot_series(simulate(config)) == per_slot_series(simulate(config, streams=RandomStreams(6)))

    def test_baseline_reports_no_unstable_formations(self, small_config):
        """Test only the coalition scheme counts history-blocked formations"""
        trace = simulate(small_config, "baseline", RandomStreams(4))
        assert all(report.unstable == 0 for report in trace.reports)

    @pytest.mark.slow
    def test_default_scenario_runs_to_horizon(self):
        """Test history-blocked formations never abort a run of the default scenario"""
        config = ScenarioConfig(t_max=90)
        for seed in range(20):
            trace = simulate(config, "proposed", RandomStreams(seed))
            assert len(trace) <= config.t_max
            for report in trace.reports:
                assert 0 <= report.unstable <= len(report.subnetworks)
