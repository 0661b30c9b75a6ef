"""
Pytest configuration and fixtures for the content distribution simulator tests
"""

import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add the parent directory to Python path for imports
import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from vanet_pcd.core.channel import LinkSnapshot
from vanet_pcd.core.content import ContentState
from vanet_pcd.core.game import SlotContext
from vanet_pcd.core.mobility import FleetState, VehicleState
from vanet_pcd.utils.config import ScenarioConfig


@pytest.fixture
def default_config():
    """Scenario with every parameter at its default"""
    return ScenarioConfig()


@pytest.fixture
def small_config():
    """Small, fast scenario with strong links so that packets actually flow"""
    return ScenarioConfig(N=4, L=400.0, D=20.0, M=10, Ms=10e6, eta=1e12, t_max=60)


@pytest.fixture
def temp_output_dir():
    """Create a temporary output directory during tests"""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir)


@pytest.fixture
def make_fleet():
    """Build a FleetState from (lane, position, speed) triples, ids in order"""
    def _make(specs, slot=0):
        vehicles = tuple(
            VehicleState(id=i, lane=lane, position=float(position), speed=float(speed))
            for i, (lane, position, speed) in enumerate(specs)
        )
        return FleetState(vehicles=vehicles, slot=slot)
    return _make


def edges_to_adjacency(n, edges):
    """Symmetric boolean adjacency from an edge list"""
    adjacency = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        adjacency[i, j] = adjacency[j, i] = True
    return adjacency


@pytest.fixture
def make_context():
    """Build a SlotContext from an edge list, a uniform or per-edge probability and packet sets

    Args (of the returned builder):
        n: number of OBUs
        edges: iterable of (i, j) pairs
        sets: per-OBU packet index lists
        num_packets: M
        probability: float for every edge, or dict {(i, j): p}
    """
    def _make(n, edges, sets, num_packets, probability=1.0, alpha=100.0, beta=1.0, remaining=None):
        edges = list(edges)
        adjacency = edges_to_adjacency(n, edges)
        probabilities = np.zeros((n, n))
        for i, j in edges:
            p = probability[(i, j)] if isinstance(probability, dict) else probability
            probabilities[i, j] = probabilities[j, i] = p
        links = LinkSnapshot.from_matrices(adjacency, probabilities)
        content = ContentState.from_sets(sets, num_packets)
        return SlotContext(links=links, content=content, alpha=alpha, beta=beta, remaining_demand=remaining)
    return _make


def random_context(rng, n, num_packets=6, edge_probability=0.5, alpha=100.0, beta=1.0):
    """Random slot context: random graph, random link quality, random packet sets"""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_probability]
    adjacency = edges_to_adjacency(n, edges)
    probabilities = np.zeros((n, n))
    for i, j in edges:
        probabilities[i, j] = probabilities[j, i] = rng.uniform(0.0, 1.0)
    possession = rng.random((n, num_packets)) < 0.4
    links = LinkSnapshot.from_matrices(adjacency, probabilities)
    return SlotContext(links=links, content=ContentState(possession=possession), alpha=alpha, beta=beta)


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line(
        "markers", "integration: mark test as integration test"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow running (trend sweeps over many seeds)"
    )
