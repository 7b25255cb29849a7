"""Group evolution discovery: inclusion measure, event rules and lineages.

The inclusion of group G1 in group G2 multiplies the share of G1's members found
in G2 by the share of G1's total member importance those shared members carry.
Events between groups of consecutive frames are assigned from both inclusions,
the group sizes and the number of matches each group has in the adjacent frame.
"""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Collection, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .cpm import Group
from .errors import EmptyGroup, FrameMismatch
from .importance import ImportanceMap
from .temporal import NodeId, TemporalSocialNetwork

Members = Union[Group, Collection[NodeId]]
Importance = Union[ImportanceMap, Mapping[NodeId, float]]


class EventType(str, Enum):
    FORMING = "Forming"
    DISSOLVING = "Dissolving"
    CONTINUING = "Continuing"
    SHRINKING = "Shrinking"
    GROWING = "Growing"
    SPLITTING = "Splitting"
    MERGING = "Merging"


# Column order of the summary report.
REPORT_ORDER = (
    EventType.FORMING,
    EventType.DISSOLVING,
    EventType.SHRINKING,
    EventType.GROWING,
    EventType.CONTINUING,
    EventType.SPLITTING,
    EventType.MERGING,
)


@dataclass(frozen=True)
class GedParams:
    alpha: float = 0.5
    beta: float = 0.5
    form_dissolve_threshold: float = 0.10
    match_threshold: float = 0.10

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
            if value < 0.5:
                warnings.warn(f"{name}={value} is below the recommended range [0.5, 1.0]")


@dataclass(frozen=True)
class EvolutionEvent:
    from_frame: int
    to_frame: int
    from_group: Optional[int]
    to_group: Optional[int]
    event: EventType
    inclusion_fwd: float
    inclusion_bwd: float

    def __post_init__(self) -> None:
        if self.to_frame != self.from_frame + 1:
            raise ValueError("events link consecutive frames only")
        if self.event is EventType.FORMING:
            if self.from_group is not None or self.to_group is None:
                raise ValueError("Forming has a target group only")
        elif self.event is EventType.DISSOLVING:
            if self.to_group is not None or self.from_group is None:
                raise ValueError("Dissolving has a source group only")
        elif self.from_group is None or self.to_group is None:
            raise ValueError(f"{self.event.value} needs both groups")

    def sort_key(self) -> tuple:
        return (
            self.from_frame,
            -1 if self.from_group is None else self.from_group,
            -1 if self.to_group is None else self.to_group,
        )


def _members(g: Members) -> Collection[NodeId]:
    return g.members if isinstance(g, Group) else g


def _ni(ni: Importance, node: NodeId) -> float:
    return ni.get(node, 0.0)


def inclusion(g1: Members, g2: Members, ni: Importance) -> float:
    """Inclusion of ``g1`` in ``g2``, weighted by importance in ``g1``'s frame.

    When the members of ``g1`` carry no importance at all the quality factor
    falls back to the plain member ratio.
    """
    a, b = set(_members(g1)), set(_members(g2))
    if not a:
        raise EmptyGroup("inclusion of an empty group is undefined")
    shared = a & b
    if not shared:
        return 0.0
    if len(shared) == len(a):
        return 1.0
    quantity = len(shared) / len(a)
    total = math.fsum(_ni(ni, x) for x in a)
    if total <= 0.0:
        return quantity * quantity
    # fsum is exactly rounded, so the result does not depend on set order
    quality = math.fsum(_ni(ni, x) for x in shared) / total
    return min(1.0, quantity * quality)


def count_matches(
    g: Members,
    candidates: Iterable[Members],
    ni_own: Importance,
    ni_other: Importance,
    params: GedParams = GedParams(),
) -> int:
    """Number of ``candidates`` H with max(I(g, H), I(H, g)) >= match threshold."""
    count = 0
    for h in candidates:
        if max(inclusion(g, h, ni_own), inclusion(h, g, ni_other)) >= params.match_threshold:
            count += 1
    return count


def classify_pair(
    g1: Union[Members, int],
    g2: Union[Members, int],
    inc_fwd: float,
    inc_bwd: float,
    fwd_matches: int,
    bwd_matches: int,
    params: GedParams = GedParams(),
) -> Optional[EventType]:
    """Event between ``g1`` (frame i) and ``g2`` (frame i+1), or ``None``.

    ``g1``/``g2`` may be groups, member sets or plain sizes. Rules are tried in
    the order continuing, shrinking, growing, splitting, merging. Where a
    shrinking clause coincides with a splitting clause the forward match count
    decides (one match shrinks, more split); growing and merging are separated
    the same way by the backward match count.
    """
    s1 = g1 if isinstance(g1, int) else len(_members(g1))
    s2 = g2 if isinstance(g2, int) else len(_members(g2))
    f = inc_fwd >= params.alpha
    b = inc_bwd >= params.beta
    one_fwd, many_fwd = fwd_matches == 1, fwd_matches > 1
    one_bwd, many_bwd = bwd_matches == 1, bwd_matches > 1

    if f and b and s1 == s2:
        return EventType.CONTINUING
    if (
        (f and b and s1 > s2)
        or (not f and b and s1 >= s2 and one_fwd)
        or (f and not b and s1 >= s2 and one_fwd)
    ):
        return EventType.SHRINKING
    if (
        (f and b and s1 < s2)
        or (f and not b and s1 <= s2 and one_bwd)
        or (not f and b and s1 <= s2 and one_bwd)
    ):
        return EventType.GROWING
    if (not f and b and s1 >= s2 and many_fwd) or (f and not b and s1 >= s2 and many_fwd):
        return EventType.SPLITTING
    if (f and not b and s1 <= s2 and many_bwd) or (not f and b and s1 <= s2 and many_bwd):
        return EventType.MERGING
    return None


@dataclass
class FramePair:
    """Both inclusions for every group pair of two consecutive frames.

    Only pairs with a non-empty intersection are stored; all others have both
    inclusions equal to zero.
    """

    from_frame: int
    groups_from: List[Group]
    groups_to: List[Group]
    fwd: Dict[Tuple[int, int], float] = field(default_factory=dict)
    bwd: Dict[Tuple[int, int], float] = field(default_factory=dict)

    @property
    def to_frame(self) -> int:
        return self.from_frame + 1

    def get(self, a: int, b: int) -> Tuple[float, float]:
        return self.fwd.get((a, b), 0.0), self.bwd.get((a, b), 0.0)


def compare_frames(
    from_frame: int,
    groups_from: Sequence[Group],
    groups_to: Sequence[Group],
    ni_from: Importance,
    ni_to: Importance,
) -> FramePair:
    pair = FramePair(from_frame, list(groups_from), list(groups_to))
    by_node: Dict[NodeId, List[Group]] = defaultdict(list)
    for h in groups_to:
        for node in h.members:
            by_node[node].append(h)
    for g in groups_from:
        touched = {h.group_id: h for node in g.members for h in by_node.get(node, ())}
        for hid in sorted(touched):
            h = touched[hid]
            pair.fwd[(g.group_id, hid)] = inclusion(g, h, ni_from)
            pair.bwd[(g.group_id, hid)] = inclusion(h, g, ni_to)
    return pair


@dataclass
class GedResult:
    events: List[EvolutionEvent]
    unclassified: List[Tuple[int, int, int, float, float]]  # from_frame, g1, g2, fwd, bwd


def classify_frame_pair(pair: FramePair, params: GedParams) -> GedResult:
    """Forming/dissolving first, then the pairwise rules on what remains."""
    fd = params.form_dissolve_threshold
    mt = params.match_threshold
    i, j = pair.from_frame, pair.to_frame
    ids_from = [g.group_id for g in pair.groups_from]
    ids_to = [h.group_id for h in pair.groups_to]
    sizes_from = {g.group_id: len(g) for g in pair.groups_from}
    sizes_to = {h.group_id: len(h) for h in pair.groups_to}

    # strongest inclusions seen per group, and match counts
    max_from = {a: [0.0, 0.0] for a in ids_from}
    max_to = {b: [0.0, 0.0] for b in ids_to}
    matches_from = {a: 0 for a in ids_from}
    matches_to = {b: 0 for b in ids_to}
    for (a, b), fwd in pair.fwd.items():
        bwd = pair.bwd[(a, b)]
        max_from[a][0] = max(max_from[a][0], fwd)
        max_from[a][1] = max(max_from[a][1], bwd)
        max_to[b][0] = max(max_to[b][0], fwd)
        max_to[b][1] = max(max_to[b][1], bwd)
        if mt > 0.0 and max(fwd, bwd) >= mt:
            matches_from[a] += 1
            matches_to[b] += 1
    if mt <= 0.0:
        matches_from = {a: len(ids_to) for a in ids_from}
        matches_to = {b: len(ids_from) for b in ids_to}

    def vanishes(peaks: List[float], others: list) -> bool:
        if not others:
            return True
        if fd <= 0.0:
            return False
        return peaks[0] < fd and peaks[1] < fd

    dissolving = {a for a in ids_from if vanishes(max_from[a], ids_to)}
    forming = {b for b in ids_to if vanishes(max_to[b], ids_from)}

    events = [
        EvolutionEvent(i, j, a, None, EventType.DISSOLVING, *max_from[a])
        for a in sorted(dissolving)
    ]
    events += [
        EvolutionEvent(i, j, None, b, EventType.FORMING, *max_to[b]) for b in sorted(forming)
    ]

    if params.alpha > 0.0 and params.beta > 0.0:
        candidates = sorted(pair.fwd)
    else:
        candidates = [(a, b) for a in ids_from for b in ids_to]
    unclassified = []
    for a, b in candidates:
        if a in dissolving or b in forming:
            continue
        fwd, bwd = pair.get(a, b)
        kind = classify_pair(
            sizes_from[a], sizes_to[b], fwd, bwd, matches_from[a], matches_to[b], params
        )
        if kind is None:
            if (a, b) in pair.fwd:
                unclassified.append((i, a, b, fwd, bwd))
            continue
        events.append(EvolutionEvent(i, j, a, b, kind, fwd, bwd))
    events.sort(key=EvolutionEvent.sort_key)
    return GedResult(events, unclassified)


def detect_forming_dissolving(
    groups_i: Sequence[Group],
    groups_i1: Sequence[Group],
    ni_i: Importance,
    ni_i1: Importance,
    params: GedParams = GedParams(),
    from_frame: int = 1,
) -> List[EvolutionEvent]:
    """Forming and dissolving events only (both inclusions strictly below threshold)."""
    pair = compare_frames(from_frame, groups_i, groups_i1, ni_i, ni_i1)
    return [
        e
        for e in classify_frame_pair(pair, params).events
        if e.event in (EventType.FORMING, EventType.DISSOLVING)
    ]


def _frame_indices(tsn: Union[TemporalSocialNetwork, int, Sequence[int]]) -> List[int]:
    if isinstance(tsn, TemporalSocialNetwork):
        return [f.index for f in tsn]
    if isinstance(tsn, int):
        return list(range(1, tsn + 1))
    return list(tsn)


def compare_all(
    tsn: Union[TemporalSocialNetwork, int, Sequence[int]],
    groups: Mapping[int, Sequence[Group]],
    importance: Mapping[int, Importance],
) -> List[FramePair]:
    """Inclusion tables for every consecutive frame pair.

    ``tsn`` may also be a frame count or a list of frame indices. Frames
    without an entry in ``groups`` have no groups.

    Raises:
        FrameMismatch: groups refer to a frame that does not exist, or a frame
            with groups has no importance map.
    """
    frames = _frame_indices(tsn)
    known = set(frames)
    for idx, frame_groups in groups.items():
        if idx not in known:
            raise FrameMismatch(f"groups reference unknown frame {idx}")
        for g in frame_groups:
            if g.frame_index != idx:
                raise FrameMismatch(f"group {g.group_id} filed under frame {idx} belongs to frame {g.frame_index}")
        if frame_groups and idx not in importance:
            raise FrameMismatch(f"no importance values for frame {idx}")
    pairs = []
    for a, b in zip(frames, frames[1:]):
        pairs.append(
            compare_frames(
                a, groups.get(a, []), groups.get(b, []), importance.get(a, {}), importance.get(b, {})
            )
        )
    return pairs


def classify_all(pairs: Iterable[FramePair], params: GedParams) -> GedResult:
    events: List[EvolutionEvent] = []
    unclassified: list = []
    for pair in pairs:
        res = classify_frame_pair(pair, params)
        events.extend(res.events)
        unclassified.extend(res.unclassified)
    events.sort(key=EvolutionEvent.sort_key)
    return GedResult(events, unclassified)


def ged_run(
    tsn: Union[TemporalSocialNetwork, int, Sequence[int]],
    groups: Mapping[int, Sequence[Group]],
    importance: Mapping[int, Importance],
    params: GedParams = GedParams(),
) -> List[EvolutionEvent]:
    """All events between consecutive frames, sorted by (frame, from, to)."""
    return classify_all(compare_all(tsn, groups, importance), params).events


# --------------------------------------------------------------------------
# lineages


@dataclass
class EvolutionChain:
    """One path through a group's history.

    ``steps`` holds ``(frame, group_id, event entering this frame)``; the first
    step's event is ``None`` when the chain starts at a group with no Forming
    event (e.g. in the first frame). ``end`` is ``open``, ``dissolved`` or
    ``merged:<frame>:<group>`` when the chain was absorbed into another lineage.
    """

    lineage_id: int
    steps: List[Tuple[int, Optional[int], Optional[EventType]]]
    end: str = "open"
    chain_id: int = -1

    @property
    def frames(self) -> List[int]:
        return [s[0] for s in self.steps]


def build_chains(events: Sequence[EvolutionEvent]) -> List[EvolutionChain]:
    """Fold events into lineages.

    A group with several outgoing events forks its chains. A group with
    several incoming events continues the lineage of the predecessor with the
    largest forward inclusion (ties go to the smaller group id); the other
    predecessors' chains end with a ``merged`` marker.
    """
    by_frame: Dict[int, List[EvolutionEvent]] = defaultdict(list)
    for e in events:
        by_frame[e.from_frame].append(e)

    chains: List[EvolutionChain] = []
    tails: Dict[Tuple[int, int], List[EvolutionChain]] = defaultdict(list)
    lineages = 0

    def new_chain(lineage: int, steps: list) -> EvolutionChain:
        chain = EvolutionChain(lineage, steps)
        chains.append(chain)
        return chain

    for i in sorted(by_frame):
        evs = sorted(by_frame[i], key=EvolutionEvent.sort_key)
        linked = [e for e in evs if e.from_group is not None and e.to_group is not None]
        incoming: Dict[int, List[EvolutionEvent]] = defaultdict(list)
        outgoing: Dict[int, List[EvolutionEvent]] = defaultdict(list)
        for e in linked:
            incoming[e.to_group].append(e)
            outgoing[e.from_group].append(e)
        for e in evs:
            if e.event is EventType.DISSOLVING:
                outgoing[e.from_group].append(e)
        primary = {
            h: min(lst, key=lambda e: (-e.inclusion_fwd, e.from_group)).from_group
            for h, lst in incoming.items()
        }

        for g in sorted(outgoing):
            current = tails.pop((i, g), None)
            if not current:
                current = [new_chain(lineages, [(i, g, None)])]
                lineages += 1
            snapshot = [(c.lineage_id, list(c.steps)) for c in current]
            for n, e in enumerate(outgoing[g]):
                targets = current if n == 0 else [new_chain(lid, list(st)) for lid, st in snapshot]
                for chain in targets:
                    if e.event is EventType.DISSOLVING:
                        chain.steps.append((e.to_frame, None, e.event))
                        chain.end = "dissolved"
                    elif primary[e.to_group] == g:
                        chain.steps.append((e.to_frame, e.to_group, e.event))
                        tails[(e.to_frame, e.to_group)].append(chain)
                    else:
                        chain.end = f"merged:{e.to_frame}:{e.to_group}"

        for e in evs:
            if e.event is EventType.FORMING:
                chain = new_chain(lineages, [(e.to_frame, e.to_group, e.event)])
                lineages += 1
                tails[(e.to_frame, e.to_group)].append(chain)

    ordered = sorted(enumerate(chains), key=lambda t: (t[1].lineage_id, t[0]))
    result = []
    for cid, (_, chain) in enumerate(ordered):
        chain.chain_id = cid
        result.append(chain)
    return result


def count_events(events: Iterable[EvolutionEvent]) -> Dict[EventType, int]:
    counts = {t: 0 for t in EventType}
    for e in events:
        counts[e.event] += 1
    return counts
