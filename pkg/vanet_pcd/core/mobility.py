"""
Highway mobility for the two-lane fleet
Random acceleration with security distance, lane changes and catch-up
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from vanet_pcd.utils.constants import ERROR_MESSAGES
from vanet_pcd.utils.exceptions import FleetConstructionError

logger = logging.getLogger("vanet_pcd.mobility")

LANES = (0, 1)


@dataclass(frozen=True)
class VehicleState:
    """Kinematic state of one OBU"""

    id: int
    lane: int
    position: float  # m, increasing in the direction of travel
    speed: float  # m/s

    def to_dict(self):
        """Convert the vehicle to a dictionary for serialization"""
        return {
            "id": self.id,
            "lane": self.lane,
            "position": self.position,
            "speed": self.speed,
        }


@dataclass(frozen=True)
class FleetState:
    """All vehicles at one slot, ordered by id"""

    vehicles: Tuple[VehicleState, ...]
    slot: int = 0

    def __post_init__(self):
        ids = sorted(v.id for v in self.vehicles)
        if ids != list(range(len(self.vehicles))):
            raise ValueError(f"Vehicle ids must be a permutation of 0..{len(self.vehicles) - 1}")
        ordered = tuple(sorted(self.vehicles, key=lambda v: v.id))
        object.__setattr__(self, "vehicles", ordered)

    @property
    def size(self) -> int:
        return len(self.vehicles)

    @property
    def positions(self) -> np.ndarray:
        return np.array([v.position for v in self.vehicles], dtype=float)

    @property
    def speeds(self) -> np.ndarray:
        return np.array([v.speed for v in self.vehicles], dtype=float)

    @property
    def lanes(self) -> np.ndarray:
        return np.array([v.lane for v in self.vehicles], dtype=int)

    def front_to_back(self) -> List[VehicleState]:
        """Vehicles sorted by descending position (ties by id)"""
        return sorted(self.vehicles, key=lambda v: (-v.position, v.id))


def _spaced_positions(count: int, length: float, gap: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform positions in [0, length] whose sorted consecutive gaps are >= gap"""
    if count == 0:
        return np.empty(0)
    slack = length - (count - 1) * gap
    points = np.sort(rng.uniform(0.0, slack, size=count))
    return points + gap * np.arange(count)


def init_fleet(config, rng: np.random.Generator) -> FleetState:
    """Place N vehicles at random on both lanes of a stretch of length L

    Args:
        config: ScenarioConfig
        rng: Random generator for the placement

    Returns:
        FleetState at slot 0

    Raises:
        FleetConstructionError: N * d_min exceeds the 2L the two lanes offer
    """
    n = config.N
    length = config.fleet_length
    d_min = config.d_min

    if n * d_min > 2 * length:
        raise FleetConstructionError(
            ERROR_MESSAGES["INFEASIBLE_FLEET"].format(n=n, d_min=d_min, length=length))

    # Largest lane population keeping consecutive gaps above d_min
    capacity = int(np.floor(length / d_min)) + 1
    if (capacity - 1) * d_min >= length:
        capacity -= 1
    capacity = max(capacity, 1)

    lanes = rng.integers(0, 2, size=n)
    for lane in LANES:
        overflow = int(np.sum(lanes == lane)) - capacity
        if overflow > 0:
            movers = np.flatnonzero(lanes == lane)[:overflow]
            lanes[movers] = 1 - lane
    if max(int(np.sum(lanes == lane)) for lane in LANES) > capacity:
        raise FleetConstructionError(
            ERROR_MESSAGES["INFEASIBLE_FLEET"].format(n=n, d_min=d_min, length=length))

    positions = np.zeros(n)
    for lane in LANES:
        members = np.flatnonzero(lanes == lane)
        placed = _spaced_positions(len(members), length, d_min, rng)
        positions[rng.permutation(members)] = placed

    speeds = rng.uniform(config.v_min, config.v_max, size=n)

    vehicles = tuple(
        VehicleState(id=i, lane=int(lanes[i]), position=float(positions[i]), speed=float(speeds[i]))
        for i in range(n)
    )
    logger.debug(f"Placed {n} vehicles over {length:.0f} m "
                 f"({int(np.sum(lanes == 0))} in lane 0, {int(np.sum(lanes == 1))} in lane 1)")
    return FleetState(vehicles=vehicles, slot=0)


def _leader_gap(position: float, lane: int, ahead: List[VehicleState]) -> Optional[float]:
    """Gap to the nearest vehicle of ``ahead`` in the given lane, None if there is none"""
    gaps = [other.position - position for other in ahead if other.lane == lane]
    return min(gaps) if gaps else None


def step_mobility(fleet: FleetState, config, rng: np.random.Generator) -> FleetState:
    """Advance the fleet by one slot

    Order per vehicle, front to back: random speed draw, security-distance rule,
    catch-up rule, then position integration with the new speed. The security
    distance is checked on the positions the vehicle and the already updated
    vehicles in front reach at the end of the slot, so a vehicle with a free
    lane never ends within d_min of its leader. The catch-up rule uses slot-t
    gaps with the lanes already decided for the vehicles in front.
    """
    v_min, v_max = config.v_min, config.v_max
    d_min, d_max = config.d_min, config.d_max

    order = fleet.front_to_back()
    draws = rng.random(size=len(order))
    current: List[VehicleState] = []  # slot-t positions, decided lanes
    updated: List[VehicleState] = []

    for draw, vehicle in zip(draws, order):
        speed = vehicle.speed
        if draw < config.p:
            speed = min(speed + config.a, v_max)
        elif draw < 2 * config.p:
            speed = max(speed - config.a, v_min)

        lane = vehicle.lane
        other_lane = 1 - lane

        reach = vehicle.position + speed * config.T
        same_next = _leader_gap(reach, lane, updated)
        if same_next is not None and same_next <= d_min:
            other_next = _leader_gap(reach, other_lane, updated)
            if other_next is None or other_next > d_min:
                lane = other_lane
            else:
                speed = v_min
        else:
            same_gap = _leader_gap(vehicle.position, lane, current)
            other_gap = _leader_gap(vehicle.position, other_lane, current)
            if same_gap is not None:
                if same_gap >= d_max:
                    speed = v_max
                elif other_gap is not None and other_gap >= d_max:
                    lane = other_lane
                    speed = v_max

        current.append(replace(vehicle, lane=lane))
        updated.append(replace(
            vehicle,
            lane=lane,
            speed=speed,
            position=vehicle.position + speed * config.T,
        ))

    return FleetState(vehicles=tuple(updated), slot=fleet.slot + 1)


def pairwise_distances(fleet: FleetState) -> np.ndarray:
    """Longitudinal distance matrix |x_i - x_j|; lanes are treated as co-located"""
    positions = fleet.positions
    return np.abs(positions[:, None] - positions[None, :])


def compute_links(fleet: FleetState, config) -> Tuple[np.ndarray, np.ndarray]:
    """Distances and line-of-sight neighbor adjacency for the fleet

    Returns:
        (distances, adjacency): adjacency[i, j] is True iff i != j and
        d_ij <= R_los; symmetric and irreflexive
    """
    distances = pairwise_distances(fleet)
    adjacency = distances <= config.R_los
    np.fill_diagonal(adjacency, False)
    return distances, adjacency
