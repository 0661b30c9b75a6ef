"""
V2V channel model
Rician small-scale fading, Shannon capacity and per-packet success probability
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from vanet_pcd.core.mobility import FleetState, pairwise_distances
from vanet_pcd.utils.constants import MIN_LINK_DISTANCE, PATH_LOSS_EXPONENT
from vanet_pcd.utils.exceptions import ChannelDomainError

logger = logging.getLogger("vanet_pcd.channel")

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ChannelParams:
    """Link budget parameters

    Attributes:
        bandwidth: W in Hz
        snr: transmit SNR eta (linear)
        rician_k: kappa, LOS to scattered power ratio (linear)
        path_loss_exponent: n
        slot_length: T in seconds
        packet_size: s in bits
    """

    bandwidth: float
    snr: float
    rician_k: float
    path_loss_exponent: float = PATH_LOSS_EXPONENT
    slot_length: float = 0.1
    packet_size: float = 1e6

    def __post_init__(self):
        for name in ("bandwidth", "snr", "slot_length", "packet_size"):
            if not getattr(self, name) > 0:
                raise ValueError(f"ChannelParams.{name} must be positive, got {getattr(self, name)}")
        if not self.rician_k >= 0:
            raise ValueError(f"ChannelParams.rician_k must be non-negative, got {self.rician_k}")


def sample_rician_gain(rng: np.random.Generator, kappa: float, size=None):
    """Draw Rician channel gains with unit mean power

    h = sqrt(k/(k+1)) e^{j theta} + sqrt(1/(k+1)) w, theta ~ U[0, 2pi),
    w ~ CN(0, 1). An infinite kappa gives the pure LOS gain |h| = 1.
    """
    if kappa < 0:
        raise ValueError(f"Rician factor must be non-negative, got {kappa}")

    theta = rng.uniform(0.0, 2 * np.pi, size=size)
    los = np.exp(1j * theta)
    if math.isinf(kappa):
        return los

    scattered = (rng.standard_normal(size=size) + 1j * rng.standard_normal(size=size)) / np.sqrt(2.0)
    return np.sqrt(kappa / (kappa + 1.0)) * los + np.sqrt(1.0 / (kappa + 1.0)) * scattered


def capacity(d: float, h: complex, params: ChannelParams, adjacent: bool = True) -> float:
    """Shannon capacity W log2(1 + eta |h|^2 d^-n) in b/s, zero without line of sight

    Raises:
        ChannelDomainError: d <= 0
    """
    if not d > 0:
        raise ChannelDomainError(f"Capacity is undefined for co-located transceivers (d={d})")
    if not adjacent:
        return 0.0
    gain = abs(h) ** 2
    return float(params.bandwidth * np.log2(1.0 + params.snr * gain * d ** (-params.path_loss_exponent)))


def _capacity_array(distances: np.ndarray, gains: np.ndarray, params: ChannelParams) -> np.ndarray:
    received = params.snr * gains * distances ** (-params.path_loss_exponent)
    return params.bandwidth * np.log2(1.0 + received)


def success_probability(c: ArrayLike, params: ChannelParams) -> ArrayLike:
    """Per-slot delivery probability of one packet over a link of capacity c

    With throughput g = T c: 0 below s, (g - s) / 4s on [s, 5s], 1 above 5s.
    """
    throughput = params.slot_length * np.asarray(c, dtype=float)
    if np.any(throughput < 0):
        raise ValueError("Capacity must be non-negative")
    s = params.packet_size
    probability = np.clip((throughput - s) / (4.0 * s), 0.0, 1.0)
    if probability.ndim == 0:
        return float(probability)
    return probability


@dataclass(frozen=True, eq=False)
class LinkSnapshot:
    """Per-slot link state; all matrices are N x N, symmetric and read-only"""

    distances: np.ndarray
    adjacency: np.ndarray
    probabilities: np.ndarray
    gains: np.ndarray = field(default=None)
    _neighbors: Optional[List[frozenset]] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        for array in (self.distances, self.adjacency, self.probabilities):
            array.setflags(write=False)
        neighbors = [frozenset(np.flatnonzero(row).tolist()) for row in self.adjacency]
        object.__setattr__(self, "_neighbors", neighbors)

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]

    def neighbors(self, i: int) -> frozenset:
        """Omega_i, the line-of-sight neighbors of OBU i"""
        return self._neighbors[i]

    @classmethod
    def from_matrices(cls, adjacency, probabilities, distances=None) -> "LinkSnapshot":
        """Snapshot from hand-built matrices (tests, oracles)"""
        adjacency = np.array(adjacency, dtype=bool)
        probabilities = np.array(probabilities, dtype=float) * adjacency
        if distances is None:
            distances = np.where(adjacency, 1.0, np.inf)
            np.fill_diagonal(distances, 0.0)
        return cls(distances=np.array(distances, dtype=float), adjacency=adjacency,
                   probabilities=probabilities)


def build_link_snapshot(fleet: FleetState, adjacency: np.ndarray, params: ChannelParams,
                        rng: np.random.Generator) -> LinkSnapshot:
    """Draw one fading gain per adjacent unordered pair and derive p_ij

    Non-adjacent pairs get p = 0. Pairs are visited in row-major upper
    triangle order so the draw sequence depends only on the adjacency.
    """
    n = fleet.size
    distances = pairwise_distances(fleet)
    adjacency = np.array(adjacency, dtype=bool)
    rows, cols = np.nonzero(np.triu(adjacency, k=1))

    gains = np.zeros((n, n))
    probabilities = np.zeros((n, n))
    if rows.size:
        h = sample_rician_gain(rng, params.rician_k, size=rows.size)
        pair_gains = np.abs(h) ** 2
        pair_distances = np.maximum(distances[rows, cols], MIN_LINK_DISTANCE)
        pair_probabilities = success_probability(_capacity_array(pair_distances, pair_gains, params), params)

        gains[rows, cols] = gains[cols, rows] = pair_gains
        probabilities[rows, cols] = probabilities[cols, rows] = pair_probabilities

    logger.debug(f"Link snapshot: {rows.size} links, {int(np.count_nonzero(np.triu(probabilities, 1)))} usable")
    return LinkSnapshot(distances=distances, adjacency=adjacency, probabilities=probabilities, gains=gains)
