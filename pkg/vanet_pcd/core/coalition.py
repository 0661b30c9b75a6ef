"""
Hedonic coalition formation
Preference relation, switch operations with history and the round-robin dynamics
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

import numpy as np

from vanet_pcd.core.game import Coalition, SlotContext, coalition_value
from vanet_pcd.utils.constants import DEFAULT_MAX_ROUNDS, PAYOFF_TOLERANCE
from vanet_pcd.utils.exceptions import CoalitionContractError, NonConvergenceError

logger = logging.getLogger("vanet_pcd.coalition")

EMPTY: Coalition = frozenset()


class Preference(Enum):
    """Outcome of comparing two coalitions from one OBU's point of view"""

    STRICT = "strict"
    WEAK = "weak"
    NOT_PREFERRED = "not_preferred"


class Partition:
    """Disjoint non-empty coalitions covering a member set

    Coalitions are kept sorted by their smallest member, which is also the
    order in which switch targets are scanned.
    """

    def __init__(self, coalitions: Iterable[Iterable[int]]):
        groups = [frozenset(c) for c in coalitions]
        if any(not group for group in groups):
            raise CoalitionContractError("A partition cannot hold an empty coalition")

        owner: Dict[int, Coalition] = {}
        for group in groups:
            for i in group:
                if i in owner:
                    raise CoalitionContractError(f"OBU {i} appears in more than one coalition")
                owner[i] = group

        self._coalitions: Tuple[Coalition, ...] = tuple(sorted(groups, key=min))
        self._owner = owner

    @classmethod
    def singletons(cls, members: Iterable[int]) -> "Partition":
        """The non-cooperative partition, every OBU on its own"""
        return cls([i] for i in members)

    @property
    def coalitions(self) -> Tuple[Coalition, ...]:
        return self._coalitions

    @property
    def members(self) -> FrozenSet[int]:
        return frozenset(self._owner)

    def coalition_of(self, i: int) -> Coalition:
        """S_Pi(i)"""
        try:
            return self._owner[i]
        except KeyError:
            raise CoalitionContractError(f"OBU {i} is not covered by the partition") from None

    def switch(self, i: int, target: Coalition) -> "Partition":
        """Move i from its coalition into target (EMPTY opens a new singleton)"""
        current = self.coalition_of(i)
        if target and target not in self._coalitions:
            raise CoalitionContractError(f"Target {sorted(target)} is not a coalition of the partition")

        groups: List[Coalition] = []
        for group in self._coalitions:
            if group == current:
                if len(group) > 1:
                    groups.append(group - {i})
            elif group == target:
                groups.append(group | {i})
            else:
                groups.append(group)
        if not target:
            groups.append(frozenset({i}))
        return Partition(groups)

    def restrict(self, members: Iterable[int]) -> "Partition":
        """Intersect every coalition with members; uncovered members become singletons"""
        members = frozenset(members)
        groups = [group & members for group in self._coalitions]
        groups = [group for group in groups if group]
        missing = members - frozenset(self._owner)
        groups.extend(frozenset({i}) for i in sorted(missing))
        return Partition(groups)

    def __len__(self) -> int:
        return len(self._coalitions)

    def __iter__(self) -> Iterator[Coalition]:
        return iter(self._coalitions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return set(self._coalitions) == set(other._coalitions)

    def __hash__(self) -> int:
        return hash(frozenset(self._coalitions))

    def __repr__(self) -> str:
        return f"Partition({[sorted(c) for c in self._coalitions]})"


@dataclass
class HistoryCollection:
    """H(i): coalitions each OBU has visited and then left during one formation run"""

    visited: Dict[int, Set[Coalition]] = field(default_factory=dict)

    def record(self, i: int, coalition: Coalition):
        self.visited.setdefault(i, set()).add(frozenset(coalition))

    def contains(self, i: int, coalition: Coalition) -> bool:
        return frozenset(coalition) in self.visited.get(i, ())

    def size(self, i: int) -> int:
        return len(self.visited.get(i, ()))

    def clear(self):
        self.visited.clear()


@dataclass(frozen=True)
class FormationResult:
    """Final partition of one formation run

    Attributes:
        partition: partition after the last quiet round
        switch_count: executed switch operations
        rounds: rounds including the final quiet one
        history: coalitions each OBU left during the run
        stable: whether the partition passes the Nash-stability check; when
            False every remaining profitable deviation leads into history
    """

    partition: Partition
    switch_count: int
    rounds: int
    history: HistoryCollection = field(default_factory=HistoryCollection)
    stable: bool = True


def is_least_preferred(i: int, coalition: Coalition, ctx: SlotContext) -> bool:
    """True when some other member would earn more without i

    A coalition whose remaining members are hurt by i's presence is the least
    preferred coalition for i.
    """
    others = coalition - {i}
    if not others:
        return False

    with_i = coalition_value(coalition, ctx)
    without_i = coalition_value(others, ctx)
    return any(with_i.payoff(j) < without_i.payoff(j) - PAYOFF_TOLERANCE for j in others)


def prefers(i: int, first: Iterable[int], second: Iterable[int], ctx: SlotContext) -> Preference:
    """Compare first against second for OBU i

    Returns:
        STRICT when first is strictly preferred, WEAK when i is indifferent
        or first is at least as good, NOT_PREFERRED otherwise

    Raises:
        CoalitionContractError: i belongs to neither or only one coalition
    """
    first, second = frozenset(first), frozenset(second)
    if i not in first or i not in second:
        raise CoalitionContractError(
            f"OBU {i} must belong to both compared coalitions ({sorted(first)}, {sorted(second)})")

    if is_least_preferred(i, first, ctx):
        return Preference.NOT_PREFERRED
    if is_least_preferred(i, second, ctx):
        return Preference.STRICT

    gain = coalition_value(first, ctx).payoff(i) - coalition_value(second, ctx).payoff(i)
    if gain > PAYOFF_TOLERANCE:
        return Preference.STRICT
    if gain >= -PAYOFF_TOLERANCE:
        return Preference.WEAK
    return Preference.NOT_PREFERRED


def _candidate_targets(partition: Partition) -> List[Coalition]:
    """Existing coalitions by ascending smallest member, then the empty set"""
    return list(partition.coalitions) + [EMPTY]


def try_switch(i: int, partition: Partition, history: HistoryCollection,
               ctx: SlotContext, respect_history: bool = True) -> Optional[Coalition]:
    """First admissible switch target for i, or None

    EMPTY means i leaves to form a singleton. With respect_history False,
    coalitions in H(i) are admissible again.
    """
    current = partition.coalition_of(i)
    for target in _candidate_targets(partition):
        if target == current:
            continue
        joined = target | {i}
        if joined == current:
            continue
        if respect_history and history.contains(i, joined):
            continue
        if prefers(i, joined, current, ctx) is Preference.STRICT:
            return target
    return None


def run_formation(members: Iterable[int], initial: Partition, ctx: SlotContext,
                  rng: np.random.Generator, max_rounds: int = DEFAULT_MAX_ROUNDS) -> FormationResult:
    """Run switch rounds until a full round changes nothing

    Each round visits the members in a fresh random order and lets each one
    attempt a single switch. The coalition an OBU leaves enters its history and
    is never re-entered, which bounds the number of switches. Under the
    least-preferred guard some contexts admit no Nash-stable partition, so the
    result records whether the final partition passed the stability check.

    Raises:
        CoalitionContractError: initial does not partition members
        NonConvergenceError: no quiet round within max_rounds
    """
    members = sorted(set(members))
    if initial.members != frozenset(members):
        raise CoalitionContractError(
            f"Initial partition covers {sorted(initial.members)}, expected {members}")

    partition = initial
    history = HistoryCollection()
    switches = 0
    rounds = 0

    while True:
        rounds += 1
        if rounds > max_rounds:
            raise NonConvergenceError(
                f"Coalition formation over {members} did not settle within {max_rounds} rounds")

        moved = 0
        for i in rng.permutation(members).tolist():
            target = try_switch(i, partition, history, ctx)
            if target is None:
                continue
            history.record(i, partition.coalition_of(i))
            partition = partition.switch(i, target)
            moved += 1

        switches += moved
        if moved == 0:
            break

    stable = is_nash_stable(partition, ctx)
    logger.debug(f"Formation over {len(members)} OBUs: {len(partition)} coalitions, "
                 f"{switches} switches, {rounds} rounds{'' if stable else ', history-blocked'}")
    return FormationResult(partition=partition, switch_count=switches, rounds=rounds,
                           history=history, stable=stable)


def is_nash_stable(partition: Partition, ctx: SlotContext) -> bool:
    """True iff no OBU strictly prefers joining another coalition or going alone"""
    history = HistoryCollection()
    return all(try_switch(i, partition, history, ctx, respect_history=False) is None
               for i in sorted(partition.members))


def iter_partitions(members: Iterable[int]) -> Iterator[Partition]:
    """Every set partition of members (Bell-number many)"""
    elements = sorted(set(members))

    def _extend(remaining: List[int]) -> Iterator[List[Set[int]]]:
        if not remaining:
            yield []
            return
        first, rest = remaining[0], remaining[1:]
        for blocks in _extend(rest):
            for index in range(len(blocks)):
                yield blocks[:index] + [blocks[index] | {first}] + blocks[index + 1:]
            yield [{first}] + blocks

    for blocks in _extend(elements):
        yield Partition(blocks)


def best_partition(members: Iterable[int], ctx: SlotContext) -> Tuple[Partition, float]:
    """Exhaustive search for the partition maximizing the summed coalition value

    Each coalition is evaluated in isolation, matching the formation payoffs.
    Only practical for small subnetworks.
    """
    best, best_total = None, -np.inf
    for partition in iter_partitions(members):
        total = sum(coalition_value(group, ctx).value for group in partition)
        if total > best_total + PAYOFF_TOLERANCE:
            best, best_total = partition, total
    return best, float(best_total)
