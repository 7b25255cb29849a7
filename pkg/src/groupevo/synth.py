"""Synthetic interaction logs with planted, scripted group histories.

Each frame of a script lists planted groups. A planted group is realised as a
chain of k-cliques over its sorted members (consecutive cliques share k-1
nodes, so clique percolation recovers exactly the planted member set) plus
extra intra-group pairs drawn with probability ``density``. Noise pairs are
sampled among node pairs that do not sit inside a common planted group.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import List, Optional, Sequence, Tuple

from .errors import InfeasibleScript, InputError
from .ged import EventType
from .temporal import InteractionRecord, NodeId, TemporalEventLog, parse_node, sorted_nodes


@dataclass(frozen=True)
class PlantedGroup:
    label: str
    members: Tuple[NodeId, ...]
    density: float = 1.0

    def __post_init__(self) -> None:
        members = tuple(sorted_nodes(set(self.members)))
        if not members:
            raise InputError(f"planted group {self.label!r} has no members")
        if not 0.0 <= self.density <= 1.0:
            raise InputError(f"density of {self.label!r} must lie in [0, 1]")
        object.__setattr__(self, "members", members)


@dataclass
class FrameDirective:
    groups: List[PlantedGroup] = field(default_factory=list)
    noise_rate: float = 0.0


@dataclass(frozen=True)
class TruthEvent:
    """Expected event, with groups named by planted-group label."""

    from_frame: int
    to_frame: int
    from_group: Optional[str]
    to_group: Optional[str]
    event: EventType

    def as_tuple(self) -> tuple:
        return (self.from_frame, self.to_frame, self.from_group, self.to_group, self.event.value)


@dataclass
class ScenarioScript:
    frame_count: int
    frame_length_days: int
    frames: List[FrameDirective]
    ground_truth: List[TruthEvent] = field(default_factory=list)
    k: int = 5
    node_count: Optional[int] = None
    start_date: date = date(2010, 1, 1)
    name: str = "scenario"

    def __post_init__(self) -> None:
        if self.frame_count < 1 or self.frame_length_days < 1:
            raise InputError("frame_count and frame_length_days must be positive")
        if len(self.frames) != self.frame_count:
            raise InputError(f"expected {self.frame_count} frame directives, got {len(self.frames)}")
        for idx, directive in enumerate(self.frames, start=1):
            labels = [g.label for g in directive.groups]
            if len(labels) != len(set(labels)):
                raise InputError(f"duplicate group labels in frame {idx}")
            if not 0.0 <= directive.noise_rate <= 1.0:
                raise InputError(f"noise rate of frame {idx} must lie in [0, 1]")
        for ev in self.ground_truth:
            if not (1 <= ev.from_frame and ev.to_frame == ev.from_frame + 1 <= self.frame_count):
                raise InputError(f"ground truth event {ev.as_tuple()} is outside the script")
            for frame, label in ((ev.from_frame, ev.from_group), (ev.to_frame, ev.to_group)):
                if label is not None and label not in self.labels(frame):
                    raise InputError(f"ground truth names unknown group {label!r} in frame {frame}")

    def labels(self, frame: int) -> List[str]:
        return [g.label for g in self.frames[frame - 1].groups]

    @property
    def span_days(self) -> int:
        return self.frame_count * self.frame_length_days

    # -- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "frame_count": self.frame_count,
            "frame_length_days": self.frame_length_days,
            "k": self.k,
            "node_count": self.node_count,
            "start_date": self.start_date.isoformat(),
            "frames": [
                {
                    "index": i,
                    "noise_rate": d.noise_rate,
                    "groups": [
                        {"id": g.label, "members": list(g.members), "density": g.density}
                        for g in d.groups
                    ],
                }
                for i, d in enumerate(self.frames, start=1)
            ],
            "ground_truth": [truth_to_dict(e) for e in self.ground_truth],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioScript":
        try:
            frames = [
                FrameDirective(
                    [
                        PlantedGroup(
                            str(g["id"]),
                            tuple(_node(m) for m in g["members"]),
                            float(g.get("density", 1.0)),
                        )
                        for g in f.get("groups", [])
                    ],
                    float(f.get("noise_rate", 0.0)),
                )
                for f in sorted(data["frames"], key=lambda f: f["index"])
            ]
            return cls(
                frame_count=int(data["frame_count"]),
                frame_length_days=int(data["frame_length_days"]),
                frames=frames,
                ground_truth=[truth_from_dict(e) for e in data.get("ground_truth", [])],
                k=int(data.get("k", 5)),
                node_count=data.get("node_count"),
                start_date=date.fromisoformat(data.get("start_date", "2010-01-01")),
                name=data.get("name", "scenario"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed scenario script: {exc}") from exc

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ScenarioScript":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: {exc}") from exc


def _node(value) -> NodeId:
    return value if isinstance(value, int) else parse_node(str(value))


def truth_to_dict(e: TruthEvent) -> dict:
    return {
        "from_frame": e.from_frame,
        "to_frame": e.to_frame,
        "from_group": e.from_group,
        "to_group": e.to_group,
        "event": e.event.value,
    }


def truth_from_dict(d: dict) -> TruthEvent:
    return TruthEvent(
        int(d["from_frame"]),
        int(d["to_frame"]),
        None if d.get("from_group") in (None, "") else str(d["from_group"]),
        None if d.get("to_group") in (None, "") else str(d["to_group"]),
        EventType(d["event"]),
    )


# --------------------------------------------------------------------------
# generation


def planted_pairs(members: Sequence[NodeId], k: int) -> List[Tuple[NodeId, NodeId]]:
    """Pairs of the k-clique chain: members at most k-1 positions apart."""
    return [
        (members[i], members[j])
        for i in range(len(members))
        for j in range(i + 1, min(i + k, len(members)))
    ]


def generate(script: ScenarioScript, seed: int = 0) -> Tuple[TemporalEventLog, List[TruthEvent]]:
    """Emit a log realising ``script``; same seed, same log.

    Raises:
        InfeasibleScript: a planted group has fewer than ``k`` members.
    """
    k = script.k
    for idx, directive in enumerate(script.frames, start=1):
        for g in directive.groups:
            if len(g.members) < k:
                raise InfeasibleScript(
                    f"group {g.label!r} in frame {idx} has {len(g.members)} members, needs {k}"
                )

    universe = set()
    for directive in script.frames:
        for g in directive.groups:
            universe.update(g.members)
    if script.node_count:
        universe.update(range(script.node_count))
    universe = sorted_nodes(universe)

    rng = random.Random(seed)
    length = script.frame_length_days
    records = []

    def emit(x: NodeId, y: NodeId, lo: int, kind: str) -> None:
        day = script.start_date + timedelta(days=lo + rng.randrange(length))
        records.append(InteractionRecord(x, y, day, kind))

    for idx, directive in enumerate(script.frames, start=1):
        lo = (idx - 1) * length
        intra = set()
        for g in directive.groups:
            members = g.members
            chain = planted_pairs(members, k)
            extra = [
                (members[i], members[j])
                for i in range(len(members))
                for j in range(i + k, len(members))
            ]
            pairs = chain + [p for p in extra if rng.random() < g.density]
            for x, y in pairs:
                emit(x, y, lo, "message")
                emit(y, x, lo, "message")
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    intra.add((members[i], members[j]))
        if directive.noise_rate > 0.0 and len(universe) > 1:
            n = len(universe)
            available = n * (n - 1) // 2 - len(intra)
            wanted = int(round(directive.noise_rate * available))
            chosen = set()
            while len(chosen) < wanted:
                x, y = rng.sample(universe, 2)
                pair = (x, y) if sorted_nodes((x, y))[0] == x else (y, x)
                if pair in intra or pair in chosen:
                    continue
                chosen.add(pair)
                emit(x, y, lo, "noise")

    span_end = script.start_date + timedelta(days=script.span_days - 1)
    log = TemporalEventLog(records, script.start_date, span_end, 0)
    return log, list(script.ground_truth)


# --------------------------------------------------------------------------
# canned scripts


def _truth(i: int, a: Optional[str], b: Optional[str], kind: EventType) -> TruthEvent:
    return TruthEvent(i, i + 1, a, b, kind)


def figure1_scenario(k: int = 5, frame_length_days: int = 30) -> ScenarioScript:
    """Eight-frame history of one group.

    Nothing exists in frame 1. The group forms in frame 2, grows in 3, splits
    in two in 4, the larger part loses one member in 5 while the smaller one
    continues, both continue in 6 where an unrelated third group forms, all
    three merge in 7, and the merged group is gone in 8.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    span = lambda lo, hi: tuple(range(lo, hi))  # noqa: E731
    left_big, left, right = span(0, k + 1), span(0, k), span(k + 1, 2 * k + 1)
    third = span(2 * k + 1, 3 * k + 1)
    layout = [
        [],
        [("a", left_big)],
        [("b", span(0, 2 * k + 1))],
        [("c", left_big), ("d", right)],
        [("c5", left), ("d5", right)],
        [("c6", left), ("d6", right), ("e", third)],
        [("m", left + right + third)],
        [],
    ]
    frames = [FrameDirective([PlantedGroup(lbl, mem) for lbl, mem in f]) for f in layout]
    E = EventType
    truth = [
        _truth(1, None, "a", E.FORMING),
        _truth(2, "a", "b", E.GROWING),
        _truth(3, "b", "c", E.SPLITTING),
        _truth(3, "b", "d", E.SPLITTING),
        _truth(4, "c", "c5", E.SHRINKING),
        _truth(4, "d", "d5", E.CONTINUING),
        _truth(5, "c5", "c6", E.CONTINUING),
        _truth(5, "d5", "d6", E.CONTINUING),
        _truth(5, None, "e", E.FORMING),
        _truth(6, "c6", "m", E.MERGING),
        _truth(6, "d6", "m", E.MERGING),
        _truth(6, "e", "m", E.MERGING),
        _truth(7, "m", None, E.DISSOLVING),
    ]
    return ScenarioScript(8, frame_length_days, frames, truth, k=k, name="figure1")


def stable_scenario(
    frames: int = 3, size: int = 6, k: int = 5, frame_length_days: int = 30
) -> ScenarioScript:
    """One unchanging group present for ``frames`` frames after an empty lead frame."""
    members = tuple(range(size))
    directives = [FrameDirective()] + [
        FrameDirective([PlantedGroup(f"g{i}", members)]) for i in range(2, frames + 2)
    ]
    truth = [_truth(1, None, "g2", EventType.FORMING)] + [
        _truth(i, f"g{i}", f"g{i + 1}", EventType.CONTINUING) for i in range(2, frames + 1)
    ]
    return ScenarioScript(frames + 1, frame_length_days, directives, truth, k=k, name="stable")


def churn_scenario(
    frame_count: int = 6,
    groups_per_frame: int = 4,
    group_size: int = 6,
    k: int = 5,
    frame_length_days: int = 30,
) -> ScenarioScript:
    """Every frame uses an entirely fresh population (100% turnover)."""
    per_frame = groups_per_frame * group_size
    directives = []
    for f in range(frame_count):
        base = f * per_frame
        directives.append(
            FrameDirective(
                [
                    PlantedGroup(
                        f"f{f + 1}g{g}",
                        tuple(range(base + g * group_size, base + (g + 1) * group_size)),
                    )
                    for g in range(groups_per_frame)
                ]
            )
        )
    truth = []
    for i in range(1, frame_count):
        truth += [_truth(i, f"f{i}g{g}", None, EventType.DISSOLVING) for g in range(groups_per_frame)]
        truth += [_truth(i, None, f"f{i + 1}g{g}", EventType.FORMING) for g in range(groups_per_frame)]
    return ScenarioScript(frame_count, frame_length_days, directives, truth, k=k, name="churn")


def random_scenario(
    node_count: int = 200,
    frame_count: int = 6,
    groups_per_frame: int = 12,
    min_size: int = 5,
    max_size: int = 12,
    noise_rate: float = 0.001,
    k: int = 5,
    frame_length_days: int = 30,
    seed: int = 0,
) -> ScenarioScript:
    """Randomly evolving groups without ground truth.

    Groups persist with member turnover, split, merge, dissolve or appear from
    one frame to the next; membership may overlap between groups.
    """
    if min_size < k or max_size < min_size or node_count < max_size:
        raise InfeasibleScript("group sizes must satisfy k <= min_size <= max_size <= node_count")
    rng = random.Random(seed)
    nodes = list(range(node_count))
    counter = 0

    def fresh(members) -> Tuple[str, tuple]:
        nonlocal counter
        counter += 1
        return f"r{counter}", tuple(sorted(members))

    def random_group() -> tuple:
        return fresh(rng.sample(nodes, rng.randint(min_size, max_size)))

    current = [random_group() for _ in range(groups_per_frame)]
    directives = []
    for _ in range(frame_count):
        directives.append(
            FrameDirective([PlantedGroup(lbl, mem, 0.5) for lbl, mem in current], noise_rate)
        )
        nxt = []
        pool = list(current)
        rng.shuffle(pool)
        while pool:
            lbl, mem = pool.pop()
            roll = rng.random()
            if roll < 0.15:
                continue  # dissolves
            if roll < 0.25 and len(mem) >= 2 * min_size:
                cut = len(mem) // 2
                shuffled = rng.sample(mem, len(mem))
                nxt += [fresh(shuffled[:cut]), fresh(shuffled[cut:])]
            elif roll < 0.35 and pool:
                _, other = pool.pop()
                merged = sorted(set(mem) | set(other))
                nxt.append(fresh(merged[: max_size * 2]))
            else:
                keep = set(mem)
                for node in rng.sample(mem, rng.randint(0, 2)):
                    if len(keep) > min_size:
                        keep.discard(node)
                while len(keep) < max_size and rng.random() < 0.4:
                    keep.add(rng.choice(nodes))
                nxt.append(fresh(keep))
        while len(nxt) < groups_per_frame:
            nxt.append(random_group())
        current = nxt
    return ScenarioScript(
        frame_count,
        frame_length_days,
        directives,
        [],
        k=k,
        node_count=node_count,
        name=f"random-{seed}",
    )
