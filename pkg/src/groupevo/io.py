"""Readers and writers for the plain-text exchange formats.

All writers produce deterministic output: rows are sorted, floats are written
with ``repr`` and lines end in ``\\n``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, TextIO

from .cpm import Group
from .errors import FrameMismatch, InputError
from .ged import EventType, EvolutionChain, EvolutionEvent
from .importance import ImportanceMap
from .temporal import TemporalEventLog, TemporalSocialNetwork, node_key, parse_node, sorted_nodes

EVENT_FIELDS = [
    "from_frame",
    "to_frame",
    "from_group",
    "to_group",
    "event",
    "inclusion_fwd",
    "inclusion_bwd",
]


def _writer(fh: TextIO):
    return csv.writer(fh, lineterminator="\n")


def _opt(value) -> str:
    return "" if value is None else str(value)


# -- logs and frames -------------------------------------------------------


def write_event_log(log: TemporalEventLog, fh: TextIO) -> None:
    fh.write(f"# span: {log.span_start.isoformat()} {log.span_end.isoformat()}\n")
    w = _writer(fh)
    w.writerow(["source", "target", "timestamp", "kind"])
    for r in log.records:
        w.writerow([r.source, r.target, r.timestamp.isoformat(), _opt(r.kind)])


def write_frames(tsn: TemporalSocialNetwork, directory) -> None:
    """Edge list per frame (``x,y,weight``) plus ``manifest.csv``.

    Manifest ``end`` is exclusive.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(len(tsn))))
    with open(directory / "manifest.csv", "w", encoding="utf-8") as mf:
        mw = _writer(mf)
        mw.writerow(["index", "start", "end", "nodes", "edges", "file"])
        for frame in tsn:
            name = f"frame_{frame.index:0{width}d}.csv"
            net = frame.snapshot
            mw.writerow(
                [
                    frame.index,
                    frame.window_start.isoformat(),
                    frame.window_end.isoformat(),
                    net.node_count,
                    net.edge_count,
                    name,
                ]
            )
            with open(directory / name, "w", encoding="utf-8") as fh:
                w = _writer(fh)
                w.writerow(["x", "y", "weight"])
                for (x, y) in sorted(net.edges, key=lambda e: (node_key(e[0]), node_key(e[1]))):
                    w.writerow([x, y, net.edges[(x, y)]])


# -- groups ----------------------------------------------------------------


def write_groups(groups: Mapping[int, Sequence[Group]], fh: TextIO) -> None:
    w = _writer(fh)
    for frame in sorted(groups):
        for g in sorted(groups[frame], key=lambda g: g.group_id):
            w.writerow([frame, g.group_id, ";".join(str(m) for m in sorted_nodes(g.members))])


def read_groups(fh: TextIO) -> Dict[int, List[Group]]:
    groups: Dict[int, List[Group]] = {}
    for line_no, row in enumerate(csv.reader(fh), start=1):
        if not row or row[0].startswith("#") or row[0] == "frame_index":
            continue
        try:
            frame, gid = int(row[0]), int(row[1])
            members = frozenset(parse_node(m) for m in row[2].split(";") if m.strip())
            group = Group(frame, gid, members)
        except (IndexError, ValueError) as exc:
            raise InputError(f"groups line {line_no}: {exc}") from exc
        groups.setdefault(frame, []).append(group)
    for frame, lst in groups.items():
        lst.sort(key=lambda g: g.group_id)
        ids = [g.group_id for g in lst]
        if len(ids) != len(set(ids)):
            raise FrameMismatch(f"duplicate group ids in frame {frame}")
    return groups


# -- importance ------------------------------------------------------------


def write_importance(maps: Mapping[int, ImportanceMap], fh: TextIO) -> None:
    w = _writer(fh)
    for frame in sorted(maps):
        values = maps[frame].values
        for node in sorted_nodes(values):
            w.writerow([frame, node, repr(values[node])])


def read_importance(fh: TextIO) -> Dict[int, ImportanceMap]:
    maps: Dict[int, ImportanceMap] = {}
    for line_no, row in enumerate(csv.reader(fh), start=1):
        if not row or row[0].startswith("#") or row[0] == "frame_index":
            continue
        try:
            frame, node, value = int(row[0]), parse_node(row[1]), float(row[2])
        except (IndexError, ValueError) as exc:
            raise InputError(f"importance line {line_no}: {exc}") from exc
        maps.setdefault(frame, ImportanceMap(frame)).values[node] = value
        if value < 0:
            raise InputError(f"importance line {line_no}: negative value")
    return maps


# -- events and chains -----------------------------------------------------


def event_row(e: EvolutionEvent) -> list:
    return [
        e.from_frame,
        e.to_frame,
        _opt(e.from_group),
        _opt(e.to_group),
        e.event.value,
        repr(e.inclusion_fwd),
        repr(e.inclusion_bwd),
    ]


def write_events(events: Iterable[EvolutionEvent], fh: TextIO) -> None:
    w = _writer(fh)
    w.writerow(EVENT_FIELDS)
    for e in events:
        w.writerow(event_row(e))


def read_events(fh: TextIO) -> List[EvolutionEvent]:
    out = []
    for row in csv.DictReader(fh):
        out.append(
            EvolutionEvent(
                int(row["from_frame"]),
                int(row["to_frame"]),
                int(row["from_group"]) if row["from_group"] else None,
                int(row["to_group"]) if row["to_group"] else None,
                EventType(row["event"]),
                float(row["inclusion_fwd"]),
                float(row["inclusion_bwd"]),
            )
        )
    return out


def events_json(events: Iterable[EvolutionEvent]) -> str:
    docs = [
        {
            "from_frame": e.from_frame,
            "to_frame": e.to_frame,
            "from_group": e.from_group,
            "to_group": e.to_group,
            "event": e.event.value,
            "inclusion_fwd": e.inclusion_fwd,
            "inclusion_bwd": e.inclusion_bwd,
        }
        for e in events
    ]
    return json.dumps(docs, indent=1, sort_keys=True) + "\n"


def write_chains(chains: Iterable[EvolutionChain], fh: TextIO) -> None:
    w = _writer(fh)
    w.writerow(["lineage_id", "chain_id", "end", "steps"])
    for c in chains:
        steps = ";".join(
            f"{frame}:{_opt(group)}:{'' if ev is None else ev.value}" for frame, group, ev in c.steps
        )
        w.writerow([c.lineage_id, c.chain_id, c.end, steps])


def write_unclassified(rows: Iterable[tuple], fh: TextIO) -> None:
    w = _writer(fh)
    w.writerow(["from_frame", "from_group", "to_group", "inclusion_fwd", "inclusion_bwd"])
    for frame, a, b, fwd, bwd in rows:
        w.writerow([frame, a, b, repr(fwd), repr(bwd)])
