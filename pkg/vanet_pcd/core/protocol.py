"""
Popular content distribution protocol
Network splitting, per-slot coalition formation, broadcast resolution and the
carrier-sense baseline, composed into the full V2V simulation loop
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Tuple

import networkx as nx
import numpy as np

from vanet_pcd.core.channel import LinkSnapshot, build_link_snapshot
from vanet_pcd.core.coalition import FormationResult, Partition, run_formation
from vanet_pcd.core.content import ContentState, apply_deliveries, initial_allocation
from vanet_pcd.core.game import Coalition, SlotContext, coalition_value
from vanet_pcd.core.metrics import Trace
from vanet_pcd.core.mobility import FleetState, compute_links, init_fleet, step_mobility
from vanet_pcd.utils.constants import DEFAULT_MAX_ROUNDS, SCHEMES
from vanet_pcd.utils.random_streams import RandomStreams

logger = logging.getLogger("vanet_pcd.protocol")


@dataclass(frozen=True)
class Subnetwork:
    """Group of OBUs that form coalitions together between two splits"""

    id: int
    members: FrozenSet[int]

    @property
    def size(self) -> int:
        return len(self.members)


class Delivery(NamedTuple):
    """One packet successfully received in a slot"""

    receiver: int
    packet: int
    transmitter: int


@dataclass(frozen=True)
class SlotReport:
    """Outcome of one V2V slot

    Attributes:
        slot: slot index, starting at 1
        subnetworks: subnetworks in force (empty for the baseline)
        partitions: final partition per subnetwork, aligned with subnetworks
        broadcasting: selected coalition per subnetwork, None when it stays silent
        expected_rates: expected service rate x of each selected coalition (0 if silent)
        transmissions: transmitter -> chosen packet
        deliveries: realized receptions
        switch_count: switch operations executed during formation
        total: P(t) after the slot
        demand: N * M
        components: connected components of the line-of-sight graph
        unstable: subnetworks whose formation ended on a history-blocked,
            not Nash-stable partition
    """

    slot: int
    subnetworks: Tuple[Subnetwork, ...]
    partitions: Tuple[Partition, ...]
    broadcasting: Tuple[Optional[Coalition], ...]
    expected_rates: Tuple[float, ...]
    transmissions: Dict[int, int]
    deliveries: Tuple[Delivery, ...]
    switch_count: int
    total: int
    demand: int
    components: int
    unstable: int = 0

    @property
    def transmitters(self) -> FrozenSet[int]:
        return frozenset(self.transmissions)

    @property
    def num_transmitters(self) -> int:
        return len(self.transmissions)

    @property
    def normalized_total(self) -> float:
        return self.total / self.demand

    def to_dict(self):
        """Per-slot row for serialization"""
        return {
            "slot": self.slot,
            "normalized_P": self.normalized_total,
            "transmitters": self.num_transmitters,
            "switches": self.switch_count,
            "subnetworks": len(self.subnetworks),
            "components": self.components,
            "deliveries": len(self.deliveries),
        }


@dataclass
class SimulationState:
    """Mutable state carried from slot to slot"""

    config: object
    fleet: FleetState
    content: ContentState
    slot: int = 0
    subnetworks: Tuple[Subnetwork, ...] = ()
    partitions: Dict[int, Partition] = field(default_factory=dict)


def adjacency_graph(adjacency: np.ndarray) -> nx.Graph:
    """Undirected line-of-sight graph with one node per OBU"""
    adjacency = np.asarray(adjacency, dtype=bool)
    graph = nx.Graph()
    graph.add_nodes_from(range(adjacency.shape[0]))
    rows, cols = np.nonzero(np.triu(adjacency, k=1))
    graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
    return graph


def split_network(fleet: FleetState, adjacency: np.ndarray, n_max: int,
                  rng: np.random.Generator) -> List[Subnetwork]:
    """Group OBUs into subnetworks of at most n_max members

    OBUs arrive in random order. Each joins the largest subnetwork that already
    holds one of its neighbors and still has room (earliest founded on ties),
    otherwise it founds a new subnetwork.
    """
    if n_max < 1:
        raise ValueError(f"N_max must be at least 1, got {n_max}")

    graph = adjacency_graph(adjacency)
    if graph.number_of_nodes() != fleet.size:
        raise ValueError("Adjacency size does not match the fleet")

    groups: List[set] = []
    owner: Dict[int, int] = {}
    for i in rng.permutation(fleet.size).tolist():
        nearby = sorted({owner[j] for j in graph.neighbors(i) if j in owner})
        open_groups = [g for g in nearby if len(groups[g]) < n_max]
        if open_groups:
            chosen = max(open_groups, key=lambda g: (len(groups[g]), -g))
        else:
            chosen = len(groups)
            groups.append(set())
        groups[chosen].add(i)
        owner[i] = chosen

    subnetworks = [Subnetwork(id=k, members=frozenset(g)) for k, g in enumerate(groups)]
    logger.debug(f"Split {fleet.size} OBUs into {len(subnetworks)} subnetworks "
                 f"(sizes {[s.size for s in subnetworks]})")
    return subnetworks


def resolve_deliveries(transmissions: Mapping[int, int], links: LinkSnapshot,
                       content: ContentState, rng: np.random.Generator) -> List[Delivery]:
    """Realize receptions under the global collision rule

    A non-transmitting OBU adjacent to exactly one transmitter receives that
    transmitter's packet with probability p_ij, provided it lacks the packet.
    Receivers are visited in ascending id with one draw each.
    """
    for transmitter, packet in transmissions.items():
        if not content.owns(transmitter, packet):
            raise ValueError(f"OBU {transmitter} cannot broadcast packet {packet} it does not own")

    transmitters = sorted(transmissions)
    if not transmitters:
        return []

    deliveries: List[Delivery] = []
    for receiver in range(links.size):
        if receiver in transmissions:
            continue
        heard = [t for t in transmitters if links.adjacency[t, receiver]]
        if len(heard) != 1:
            continue
        transmitter = heard[0]
        packet = transmissions[transmitter]
        if content.owns(receiver, packet):
            continue
        if rng.random() < links.probabilities[transmitter, receiver]:
            deliveries.append(Delivery(receiver=receiver, packet=packet, transmitter=transmitter))
    return deliveries


def _select_broadcaster(result: FormationResult, ctx: SlotContext) -> Tuple[Optional[Coalition], float]:
    """Coalition of the final partition with the highest expected service rate

    Ties go to the coalition with the smallest member; x = 0 means silence.
    """
    best, best_rate = None, 0.0
    for group in result.partition:
        rate = coalition_value(group, ctx).service_rate
        if rate > best_rate:
            best, best_rate = group, rate
    return best, best_rate


def _coalition_transmissions(group: Coalition, ctx: SlotContext) -> Dict[int, int]:
    """Packets broadcast by the members of the selected coalition

    Members without a useful packet still occupy the channel with their
    lowest-index packet; members holding nothing stay silent.
    """
    evaluation = coalition_value(group, ctx)
    transmissions = {}
    for i in sorted(group):
        packet = evaluation.packets[i]
        if packet is None:
            owned = np.flatnonzero(ctx.content.possession[i])
            if owned.size == 0:
                continue
            packet = int(owned[0])
        transmissions[i] = packet
    return transmissions


def _finish_slot(state: SimulationState, links: LinkSnapshot, transmissions: Dict[int, int],
                 streams: RandomStreams) -> Tuple[Tuple[Delivery, ...], int]:
    deliveries = resolve_deliveries(transmissions, links, state.content,
                                    streams.generator("delivery", state.slot))
    state.content = apply_deliveries(state.content, [(d.receiver, d.packet) for d in deliveries])
    components = nx.number_connected_components(adjacency_graph(links.adjacency))
    return tuple(deliveries), components


def run_slot_proposed(state: SimulationState, links: LinkSnapshot, streams: RandomStreams,
                      max_rounds: int = DEFAULT_MAX_ROUNDS) -> SlotReport:
    """One slot of the coalition-based scheme; updates state.content in place

    Subnetworks are recomputed on slots 1, K+1, 2K+1, ... Every subnetwork runs
    coalition formation and only its coalition with the highest expected
    service rate broadcasts.
    """
    config = state.config
    slot = state.slot

    if not state.subnetworks or (slot - 1) % config.K == 0:
        state.subnetworks = tuple(split_network(
            state.fleet, links.adjacency, config.N_max, streams.generator("split", slot)))
        state.partitions = {}

    ctx = SlotContext(links=links, content=state.content, alpha=config.alpha, beta=config.beta)

    partitions: List[Partition] = []
    broadcasting: List[Optional[Coalition]] = []
    rates: List[float] = []
    transmissions: Dict[int, int] = {}
    switches = 0
    unstable = 0

    for subnetwork in state.subnetworks:
        previous = state.partitions.get(subnetwork.id)
        if config.warm_start and previous is not None:
            initial = previous.restrict(subnetwork.members)
        else:
            initial = Partition.singletons(subnetwork.members)

        result = run_formation(subnetwork.members, initial, ctx,
                               streams.generator("formation", slot, subnetwork.id), max_rounds=max_rounds)
        switches += result.switch_count
        unstable += not result.stable
        partitions.append(result.partition)
        state.partitions[subnetwork.id] = result.partition

        group, rate = _select_broadcaster(result, ctx)
        broadcasting.append(group)
        rates.append(rate)
        if group is not None:
            transmissions.update(_coalition_transmissions(group, ctx))

    deliveries, components = _finish_slot(state, links, transmissions, streams)
    logger.debug(f"Slot {slot}: {len(transmissions)} transmitters, {len(deliveries)} deliveries, "
                 f"{switches} switches")

    return SlotReport(
        slot=slot,
        subnetworks=state.subnetworks,
        partitions=tuple(partitions),
        broadcasting=tuple(broadcasting),
        expected_rates=tuple(rates),
        transmissions=transmissions,
        deliveries=deliveries,
        switch_count=switches,
        total=state.content.total,
        demand=state.content.demand,
        components=components,
        unstable=unstable,
    )


def run_slot_baseline(state: SimulationState, links: LinkSnapshot, streams: RandomStreams) -> SlotReport:
    """One slot of the non-cooperative scheme; updates state.content in place

    OBUs sense the channel in random order and transmit a random packet of
    their own when no neighbor has already committed to transmit.
    """
    slot = state.slot
    rng = streams.generator("baseline", slot)

    transmissions: Dict[int, int] = {}
    for i in rng.permutation(links.size).tolist():
        owned = np.flatnonzero(state.content.possession[i])
        if owned.size == 0:
            continue
        if any(j in transmissions for j in links.neighbors(i)):
            continue
        transmissions[i] = int(rng.choice(owned))

    deliveries, components = _finish_slot(state, links, transmissions, streams)
    logger.debug(f"Slot {slot}: {len(transmissions)} transmitters, {len(deliveries)} deliveries")

    return SlotReport(
        slot=slot,
        subnetworks=(),
        partitions=(),
        broadcasting=(),
        expected_rates=(),
        transmissions=transmissions,
        deliveries=deliveries,
        switch_count=0,
        total=state.content.total,
        demand=state.content.demand,
        components=components,
    )


def simulate(config, scheme: Optional[str] = None, streams: Optional[RandomStreams] = None) -> Trace:
    """Run the V2V phase until every OBU holds the file or t_max slots pass

    Args:
        config: ScenarioConfig
        scheme: "proposed" or "baseline"; defaults to config.scheme
        streams: Random streams; defaults to streams of config.seed

    Returns:
        Trace of all slot reports
    """
    scheme = scheme or config.scheme
    if scheme not in SCHEMES:
        raise ValueError(f"Unknown scheme '{scheme}', expected one of: {', '.join(SCHEMES)}")
    streams = streams or RandomStreams(config.seed)

    fleet = init_fleet(config, streams.generator("fleet"))
    content = initial_allocation(fleet, config)
    state = SimulationState(config=config, fleet=fleet, content=content)
    params = config.channel_params()

    logger.info(f"Simulating {scheme} scheme: N={config.N}, L={config.fleet_length:g} m, "
                f"D={config.D:g} m, seed={streams.seed}")

    reports: List[SlotReport] = []
    while not state.content.complete and state.slot < config.t_max:
        state.slot += 1
        state.fleet = step_mobility(state.fleet, config, streams.generator("mobility", state.slot))
        _, adjacency = compute_links(state.fleet, config)
        links = build_link_snapshot(state.fleet, adjacency, params, streams.generator("fading", state.slot))

        if scheme == "proposed":
            report = run_slot_proposed(state, links, streams)
        else:
            report = run_slot_baseline(state, links, streams)
        reports.append(report)

    trace = Trace(
        config=config,
        scheme=scheme,
        seed=streams.seed,
        initial_total=content.total,
        demand=content.demand,
        reports=tuple(reports),
    )
    unstable = sum(report.unstable for report in reports)
    if unstable:
        logger.warning(f"{unstable} formations ended history-blocked without a Nash-stable partition")
    if trace.completed:
        logger.info(f"{scheme} run completed at slot {trace.completion_slot}")
    else:
        logger.warning(f"{scheme} run stopped at t_max={config.t_max} with "
                       f"{trace.completion_fraction:.1%} of the demand served")
    return trace
