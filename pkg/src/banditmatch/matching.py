"""Capacity-aware stable matching: proposal algorithms, stability certification,
and a brute-force enumeration oracle.

Players and arms are integer ids. A matching maps every player of an instance
to an arm id or to ``None``, the virtual "unmatched" assignment. Arm rankings
are total strict orders over the instance's players; player rankings may cover
only a subset of the arms (anything unranked is unacceptable to that player).
"""

from __future__ import annotations

import heapq
import itertools
from bisect import insort
from dataclasses import dataclass

UNMATCHED = None

# Size guard for the brute-force oracle: (K+1)^N assignments are enumerated.
ORACLE_MAX_PLAYERS = 6
ORACLE_MAX_ARMS = 6


class InvalidInstanceError(ValueError):
    """A MatchInstance (or a matching checked against one) is malformed."""


class OracleSizeError(ValueError):
    """The brute-force oracle was asked for an instance beyond its size guard."""


@dataclass(frozen=True)
class MatchInstance:
    """One round's stable-matching problem.

    players:      ordered player ids taking part this round
    arms:         ordered arm ids present this round
    player_prefs: player id -> strict ranking over a subset of ``arms``
    arm_prefs:    arm id -> strict ranking over all of ``players``
    capacities:   arm id -> seat count (>= 1)
    """

    players: tuple[int, ...]
    arms: tuple[int, ...]
    player_prefs: dict[int, tuple[int, ...]]
    arm_prefs: dict[int, tuple[int, ...]]
    capacities: dict[int, int]

    def validate(self) -> None:
        """Raise InvalidInstanceError unless all structural invariants hold."""
        players, arms = self.players, self.arms
        player_set, arm_set = set(players), set(arms)
        if len(player_set) != len(players):
            raise InvalidInstanceError("duplicate player ids")
        if len(arm_set) != len(arms):
            raise InvalidInstanceError("duplicate arm ids")
        if set(self.player_prefs) != player_set:
            raise InvalidInstanceError("player_prefs keys must match players")
        if set(self.arm_prefs) != arm_set or set(self.capacities) != arm_set:
            raise InvalidInstanceError("arm_prefs/capacities keys must match arms")
        for p, ranking in self.player_prefs.items():
            seen = set(ranking)
            if len(seen) != len(ranking):
                raise InvalidInstanceError(f"player {p} ranking has duplicates")
            if not seen <= arm_set:
                raise InvalidInstanceError(f"player {p} ranks unknown arms")
        for a, ranking in self.arm_prefs.items():
            if len(set(ranking)) != len(ranking) or set(ranking) != player_set:
                raise InvalidInstanceError(
                    f"arm {a} ranking must be a total strict order over players"
                )
            cap = self.capacities[a]
            if not isinstance(cap, int) or cap < 1:
                raise InvalidInstanceError(f"arm {a} capacity must be an integer >= 1")

    def render(self) -> str:
        """Canonical textual form, stable across runs (used in golden tests)."""
        lines = [f"MatchInstance({len(self.players)} players, {len(self.arms)} arms)"]
        for p in self.players:
            ranked = " > ".join(f"a{a}" for a in self.player_prefs[p]) or "(none)"
            lines.append(f"  p{p}: {ranked}")
        for a in self.arms:
            ranked = " > ".join(f"p{p}" for p in self.arm_prefs[a])
            lines.append(f"  a{a} [cap {self.capacities[a]}]: {ranked}")
        return "\n".join(lines)


Matching = dict  # player id -> arm id | None


def validate_matching(inst: MatchInstance, matching: Matching) -> None:
    """Check that ``matching`` covers the instance's players, uses only its
    arms, and respects every capacity."""
    if set(matching) != set(inst.players):
        raise InvalidInstanceError("matching must assign every player (or None)")
    load: dict[int, int] = {}
    for p, a in matching.items():
        if a is UNMATCHED:
            continue
        if a not in inst.capacities:
            raise InvalidInstanceError(f"player {p} matched to unknown arm {a}")
        load[a] = load.get(a, 0) + 1
    for a, n in load.items():
        if n > inst.capacities[a]:
            raise InvalidInstanceError(f"arm {a} over capacity ({n} > {inst.capacities[a]})")


def player_proposing_gs(inst: MatchInstance, *, validate: bool = True) -> Matching:
    """Deferred acceptance with players proposing.

    Free players are processed lowest id first; an arm at capacity keeps its
    ``capacity`` best proposers under its own ranking and rejects the worst.
    Returns the player-optimal stable matching. Players whose ranking is
    exhausted (or empty) stay unmatched.
    """
    if validate:
        inst.validate()
    arm_rank = {a: {p: r for r, p in enumerate(inst.arm_prefs[a])} for a in inst.arms}
    next_choice = {p: 0 for p in inst.players}
    held: dict[int, list[tuple[int, int]]] = {a: [] for a in inst.arms}
    matching: Matching = {p: UNMATCHED for p in inst.players}
    free = list(inst.players)
    heapq.heapify(free)
    while free:
        p = heapq.heappop(free)
        prefs = inst.player_prefs[p]
        k = next_choice[p]
        if k >= len(prefs):
            continue
        a = prefs[k]
        next_choice[p] = k + 1
        seats = held[a]
        r = arm_rank[a][p]
        if len(seats) < inst.capacities[a]:
            insort(seats, (r, p))
            matching[p] = a
        else:
            worst_r, worst_p = seats[-1]
            if r < worst_r:
                seats.pop()
                insort(seats, (r, p))
                matching[p] = a
                matching[worst_p] = UNMATCHED
                heapq.heappush(free, worst_p)
            else:
                heapq.heappush(free, p)
    return matching


def arm_proposing_gs(inst: MatchInstance, *, validate: bool = True) -> Matching:
    """Deferred acceptance with arms proposing.

    Each arm with capacity c proposes from c unit-capacity seats sharing the
    arm's player ranking; free seats are processed by lowest (arm, seat) index.
    A player holds the best offer received so far under their own ranking and
    rejects seats of arms they do not rank. Returns the player-pessimal stable
    matching.
    """
    if validate:
        inst.validate()
    player_rank = {p: {a: r for r, a in enumerate(inst.player_prefs[p])} for p in inst.players}
    free: list[tuple[int, int]] = []
    next_choice: dict[tuple[int, int], int] = {}
    for a in inst.arms:
        for s in range(inst.capacities[a]):
            free.append((a, s))
            next_choice[(a, s)] = 0
    heapq.heapify(free)
    holding: dict[int, tuple[int, int]] = {}
    matching: Matching = {p: UNMATCHED for p in inst.players}
    while free:
        seat = heapq.heappop(free)
        a = seat[0]
        prefs = inst.arm_prefs[a]
        k = next_choice[seat]
        if k >= len(prefs):
            continue
        p = prefs[k]
        next_choice[seat] = k + 1
        rank = player_rank[p].get(a)
        if rank is None:
            heapq.heappush(free, seat)
            continue
        current = holding.get(p)
        if current is None:
            holding[p] = seat
            matching[p] = a
        elif rank < player_rank[p][current[0]]:
            holding[p] = seat
            matching[p] = a
            heapq.heappush(free, current)
        else:
            heapq.heappush(free, seat)
    return matching


def _blocking_pairs(inst: MatchInstance, matching: Matching, *, first_only: bool):
    arm_rank = {a: {p: r for r, p in enumerate(inst.arm_prefs[a])} for a in inst.arms}
    members: dict[int, list[int]] = {a: [] for a in inst.arms}
    for p, a in matching.items():
        if a is not UNMATCHED:
            members[a].append(p)
    worst: dict[int, int] = {
        a: max(arm_rank[a][p] for p in ps) for a, ps in members.items() if ps
    }
    pairs = []
    for p in inst.players:
        prefs = inst.player_prefs[p]
        current = matching.get(p, UNMATCHED)
        try:
            cutoff = prefs.index(current) if current is not UNMATCHED else len(prefs)
        except ValueError:
            cutoff = len(prefs)  # current arm unranked: every ranked arm is preferred
        for idx in range(cutoff):
            a = prefs[idx]
            if len(members[a]) < inst.capacities[a] or arm_rank[a][p] < worst[a]:
                pairs.append((p, a))
                if first_only:
                    return pairs
    return pairs


def find_blocking_pairs(
    inst: MatchInstance, matching: Matching, *, validate: bool = True
) -> list[tuple[int, int]]:
    """All pairs (player, arm) blocking ``matching``: the player strictly
    prefers the arm to their assignment, and the arm has a free seat or ranks
    the player above one of its current partners. Empty iff stable."""
    if validate:
        inst.validate()
        validate_matching(inst, matching)
    return sorted(_blocking_pairs(inst, matching, first_only=False))


def find_blocking_triplets(
    inst: MatchInstance, matching: Matching, *, validate: bool = True
) -> list[tuple[int, int, int | None]]:
    """Blocking pairs annotated with the player's current assignment
    (``None`` for the virtual unmatched arm)."""
    pairs = find_blocking_pairs(inst, matching, validate=validate)
    return [(p, a, matching.get(p, UNMATCHED)) for p, a in pairs]


def is_stable(inst: MatchInstance, matching: Matching) -> bool:
    return not _blocking_pairs(inst, matching, first_only=True)


def enumerate_stable_matchings(inst: MatchInstance) -> list[Matching]:
    """Brute-force oracle: every capacity-respecting assignment of players to
    ranked arms (or None) is generated, and the stable ones are returned in a
    deterministic order.

    Assignments that hand a player an arm outside their ranking are skipped
    (the player would rather stay unmatched). Guarded to at most
    ORACLE_MAX_PLAYERS x ORACLE_MAX_ARMS.
    """
    inst.validate()
    if len(inst.players) > ORACLE_MAX_PLAYERS or len(inst.arms) > ORACLE_MAX_ARMS:
        raise OracleSizeError(
            f"oracle limited to {ORACLE_MAX_PLAYERS} players x {ORACLE_MAX_ARMS} arms"
        )
    options = [(UNMATCHED,) + inst.player_prefs[p] for p in inst.players]
    sentinel = max(inst.arms, default=0) + 1
    stable = []
    for combo in itertools.product(*options):
        load: dict[int, int] = {}
        feasible = True
        for a in combo:
            if a is UNMATCHED:
                continue
            n = load.get(a, 0) + 1
            if n > inst.capacities[a]:
                feasible = False
                break
            load[a] = n
        if not feasible:
            continue
        matching = dict(zip(inst.players, combo))
        if not _blocking_pairs(inst, matching, first_only=True):
            stable.append(matching)
    stable.sort(
        key=lambda m: tuple(sentinel if m[p] is UNMATCHED else m[p] for p in inst.players)
    )
    return stable


def weakly_prefers(inst: MatchInstance, player: int, arm_a, arm_b) -> bool:
    """True if ``player`` likes ``arm_a`` at least as much as ``arm_b`` under
    their ranking (None ranks below every ranked arm)."""
    prefs = inst.player_prefs[player]

    def pos(a):
        if a is UNMATCHED:
            return len(prefs)
        try:
            return prefs.index(a)
        except ValueError:
            return len(prefs)

    return pos(arm_a) <= pos(arm_b)
