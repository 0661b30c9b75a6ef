"""
Per-slot value structure of the broadcast game

A coalition S is a set of OBUs broadcasting together in one slot. Its value
is the delay-reduction utility of its expected service rate minus a
synchronization cost, split among members by their expected contribution.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np

from vanet_pcd.core.channel import LinkSnapshot
from vanet_pcd.core.content import ContentState

logger = logging.getLogger("vanet_pcd.game")

Coalition = FrozenSet[int]


@dataclass(frozen=True, eq=False)
class SlotContext:
    """Everything a coalition evaluation depends on within one slot

    Attributes:
        links: adjacency and success probabilities
        content: packets possessed by each OBU
        alpha: utility pricing factor
        beta: cost pricing factor
        remaining_demand: R = NM - P(t); derived from ``content`` when omitted
    """

    links: LinkSnapshot
    content: ContentState
    alpha: float
    beta: float
    remaining_demand: Optional[int] = None
    _cache: Dict[Coalition, "CoalitionEvaluation"] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.remaining_demand is None:
            object.__setattr__(self, "remaining_demand", self.content.remaining)
        if self.remaining_demand < 0:
            raise ValueError(f"Remaining demand must be non-negative, got {self.remaining_demand}")
        if not self.alpha > 0 or not self.beta > 0:
            raise ValueError(f"Pricing factors must be positive (alpha={self.alpha}, beta={self.beta})")
        if self.links.size != self.content.num_obus:
            raise ValueError("Link snapshot and content state disagree on the number of OBUs")

    @property
    def num_obus(self) -> int:
        return self.content.num_obus

    @property
    def cache_size(self) -> int:
        return len(self._cache)


@dataclass(frozen=True)
class CoalitionEvaluation:
    """Outcome of evaluating one coalition in isolation"""

    members: Coalition
    packets: Dict[int, Optional[int]]
    contributions: Dict[int, float]
    service_rate: float
    utility: float
    cost: float
    value: float
    payoffs: Dict[int, float]

    def payoff(self, i: int) -> float:
        return self.payoffs[i]


def _as_coalition(members: Iterable[int]) -> Coalition:
    return members if isinstance(members, frozenset) else frozenset(members)


def eligible_receivers(i: int, S: Iterable[int], ctx: SlotContext) -> Coalition:
    """Omega_i*: neighbors of i that are not transmitting and hear no transmitter but i"""
    S = _as_coalition(S)
    if i not in S:
        raise ValueError(f"OBU {i} is not a member of the transmitter set {sorted(S)}")

    links = ctx.links
    receivers = set()
    for j in links.neighbors(i):
        if j in S:
            continue
        if (links.neighbors(j) - {i}) & S:
            continue
        receivers.add(j)
    return frozenset(receivers)


def packet_scores(i: int, S: Iterable[int], ctx: SlotContext) -> np.ndarray:
    """Expected deliveries per packet if i broadcasts it: sum of p_ij over receivers lacking it

    Entries for packets i does not own are zero.
    """
    receivers = sorted(eligible_receivers(i, S, ctx))
    owned = ctx.content.possession[i]
    if not receivers:
        return np.zeros(ctx.content.num_packets)

    probabilities = ctx.links.probabilities[i, receivers]
    lacking = ~ctx.content.possession[receivers, :]
    return (probabilities @ lacking) * owned


def greedy_choice(i: int, S: Iterable[int], ctx: SlotContext) -> Tuple[Optional[int], float]:
    """Best packet for i and its score; lowest index wins ties, None when nothing helps"""
    scores = packet_scores(i, S, ctx)
    if not ctx.content.possession[i].any():
        return None, 0.0
    best = int(np.argmax(scores))
    score = float(scores[best])
    if score <= 0.0:
        return None, 0.0
    return best, score


def greedy_packet(i: int, S: Iterable[int], ctx: SlotContext) -> Optional[int]:
    """The packet i broadcasts as a member of S, or None"""
    return greedy_choice(i, S, ctx)[0]


def expected_service_rate(S: Iterable[int], ctx: SlotContext) -> float:
    """x: expected packets delivered when exactly the members of S broadcast"""
    S = _as_coalition(S)
    return float(sum(greedy_choice(i, S, ctx)[1] for i in S))


def utility(x: float, remaining: float, alpha: float) -> float:
    """Delay-reduction utility alpha (x^2/2 + (R - 1/2) x - R)

    Zero at x = 1, the one-packet-per-slot reference rate.
    """
    return alpha * (x * x / 2.0 + (remaining - 0.5) * x - remaining)


def cost(size: int, beta: float) -> float:
    """Synchronization cost beta |S| for real coalitions, free for singletons"""
    return beta * size if size > 1 else 0.0


def coalition_value(S: Iterable[int], ctx: SlotContext) -> CoalitionEvaluation:
    """Evaluate S as the sole transmitter set; memoized per coalition within the context

    Payoffs are proportional to each member's expected deliveries; when the
    coalition delivers nothing the value is split equally.
    """
    S = _as_coalition(S)
    if not S:
        raise ValueError("Cannot evaluate the empty coalition")

    cached = ctx._cache.get(S)
    if cached is not None:
        return cached

    packets: Dict[int, Optional[int]] = {}
    contributions: Dict[int, float] = {}
    for i in sorted(S):
        packet, score = greedy_choice(i, S, ctx)
        packets[i] = packet
        contributions[i] = score

    x = float(sum(contributions.values()))
    u = utility(x, ctx.remaining_demand, ctx.alpha)
    c = cost(len(S), ctx.beta)
    v = u - c

    if x > 0:
        payoffs = {i: contributions[i] / x * v for i in contributions}
    else:
        payoffs = {i: v / len(S) for i in contributions}

    evaluation = CoalitionEvaluation(
        members=S,
        packets=packets,
        contributions=contributions,
        service_rate=x,
        utility=u,
        cost=c,
        value=v,
        payoffs=payoffs,
    )
    ctx._cache[S] = evaluation
    return evaluation
