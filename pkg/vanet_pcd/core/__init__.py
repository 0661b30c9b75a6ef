"""
Core package for the content distribution simulator
Contains mobility, channel, content, game, coalition formation, protocol,
metrics and experiment management
"""

from .mobility import FleetState, VehicleState, init_fleet, step_mobility, compute_links
from .channel import ChannelParams, LinkSnapshot, build_link_snapshot, capacity, success_probability
from .content import ContentState, PacketSet, apply_deliveries, initial_allocation
from .game import SlotContext, CoalitionEvaluation, coalition_value, greedy_packet, utility
from .coalition import (
    FormationResult, HistoryCollection, Partition, Preference,
    is_nash_stable, prefers, run_formation, try_switch,
)
from .metrics import Trace, average_delay, standard_average_delay, summarize
from .protocol import (
    SimulationState, SlotReport, Subnetwork, resolve_deliveries,
    run_slot_baseline, run_slot_proposed, simulate, split_network,
)

__all__ = [
    "FleetState", "VehicleState", "init_fleet", "step_mobility", "compute_links",
    "ChannelParams", "LinkSnapshot", "build_link_snapshot", "capacity", "success_probability",
    "ContentState", "PacketSet", "apply_deliveries", "initial_allocation",
    "SlotContext", "CoalitionEvaluation", "coalition_value", "greedy_packet", "utility",
    "FormationResult", "HistoryCollection", "Partition", "Preference",
    "is_nash_stable", "prefers", "run_formation", "try_switch",
    "Trace", "average_delay", "standard_average_delay", "summarize",
    "SimulationState", "SlotReport", "Subnetwork", "resolve_deliveries",
    "run_slot_baseline", "run_slot_proposed", "simulate", "split_network",
]
