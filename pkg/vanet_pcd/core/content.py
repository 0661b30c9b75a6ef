"""
Packet possession bookkeeping
Initial V2R allocation as circular arcs and per-slot delivery updates
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from vanet_pcd.core.mobility import FleetState

logger = logging.getLogger("vanet_pcd.content")

# Absorbs binary rounding before flooring packet counts (e.g. 49.999999...)
_FLOOR_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class PacketSet:
    """Membership vector over the M packets one OBU possesses"""

    owned: np.ndarray

    def __post_init__(self):
        self.owned.setflags(write=False)

    @property
    def cardinality(self) -> int:
        return int(np.count_nonzero(self.owned))

    @property
    def indices(self) -> List[int]:
        return np.flatnonzero(self.owned).tolist()

    def __contains__(self, packet: int) -> bool:
        return bool(self.owned[packet])

    def __len__(self) -> int:
        return self.cardinality


@dataclass(frozen=True, eq=False)
class ContentState:
    """Possession matrix for the whole fleet, rows are OBUs"""

    possession: np.ndarray

    def __post_init__(self):
        self.possession.setflags(write=False)

    @property
    def num_obus(self) -> int:
        return self.possession.shape[0]

    @property
    def num_packets(self) -> int:
        return self.possession.shape[1]

    @property
    def total(self) -> int:
        """P, the number of possessed (OBU, packet) pairs"""
        return int(np.count_nonzero(self.possession))

    @property
    def demand(self) -> int:
        """N * M"""
        return self.possession.size

    @property
    def remaining(self) -> int:
        """N * M - P"""
        return self.demand - self.total

    @property
    def complete(self) -> bool:
        return self.remaining == 0

    @property
    def sets(self) -> Tuple[PacketSet, ...]:
        return tuple(self.packet_set(i) for i in range(self.num_obus))

    def packet_set(self, i: int) -> PacketSet:
        return PacketSet(owned=self.possession[i].copy())

    def owns(self, i: int, packet: int) -> bool:
        return bool(self.possession[i, packet])

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]], num_packets: int) -> "ContentState":
        """State from explicit per-OBU packet index lists"""
        rows = []
        for owned in sets:
            row = np.zeros(num_packets, dtype=bool)
            row[list(owned)] = True
            rows.append(row)
        return cls(possession=np.array(rows, dtype=bool).reshape(len(rows), num_packets))


def packets_received(rate: float, span: float, speed: float, packet_size: float) -> int:
    """floor(rate * span / (speed * s)), the packets fetched while covering span meters"""
    return int(np.floor(rate * span / (speed * packet_size) + _FLOOR_EPS))


def initial_allocation(fleet_at_t0: FleetState, config) -> ContentState:
    """Packets each OBU holds when it leaves the RSU coverage

    OBU i receives n_i = floor(c_0 D / (v_i s)) consecutive packets (mod M),
    clipped to M. The front-most OBU starts at packet 0; every other OBU starts
    at its predecessor's offset plus floor(c_0 d_ij / (v_i s)), where the
    predecessor is the nearest vehicle ahead in either lane.
    """
    m = config.M
    s = config.packet_size
    possession = np.zeros((fleet_at_t0.size, m), dtype=bool)

    previous = None
    offset = 0
    for vehicle in fleet_at_t0.front_to_back():
        if previous is not None:
            gap = previous.position - vehicle.position
            offset = (offset + packets_received(config.c_0, gap, vehicle.speed, s)) % m

        count = min(max(packets_received(config.c_0, config.D, vehicle.speed, s), 0), m)
        possession[vehicle.id, (offset + np.arange(count)) % m] = True
        previous = vehicle

    state = ContentState(possession=possession)
    logger.debug(f"Initial allocation: P = {state.total} of {state.demand}")
    return state


def apply_deliveries(state: ContentState, deliveries: Iterable[Tuple[int, int]]) -> ContentState:
    """Union each (receiver, packet) into the possession matrix

    Redundant deliveries are no-ops; the returned state is a new value.
    """
    deliveries = list(deliveries)
    if not deliveries:
        return state

    possession = state.possession.copy()
    for receiver, packet in deliveries:
        if not 0 <= packet < state.num_packets:
            raise IndexError(f"Packet index {packet} outside [0, {state.num_packets})")
        possession[receiver, packet] = True
    return ContentState(possession=possession)
