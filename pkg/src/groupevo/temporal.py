"""Interaction logs and their division into timeframe snapshot networks.

A log is a day-resolution, time-ordered list of directed interactions. It is
sliced into a sequence of timeframes under one of three windowing schemes:

* ``disjoint``    -- consecutive windows abut (offset == size),
* ``overlapping`` -- a window starts before the previous one ends (offset < size),
* ``increasing``  -- every window starts at the beginning of the span and grows
  by ``offset`` days per frame.

Windows are half-open ``[start, end)`` day intervals.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence, TextIO, Tuple, Union

from .errors import EmptyLog, InputError, UnparseableTimestamp, WindowLargerThanSpan

NodeId = Union[int, str]

_INT_RE = re.compile(r"^[+-]?\d+$")
_SPAN_RE = re.compile(r"^#\s*span\s*[:=]?\s*(\S+)\s+(\S+)\s*$", re.IGNORECASE)


def node_key(node: NodeId) -> tuple:
    """Sort key giving a total order over mixed int/str node ids (ints first)."""
    if isinstance(node, int):
        return (0, node, "")
    return (1, 0, str(node))


def sorted_nodes(nodes: Iterable[NodeId]) -> list:
    return sorted(nodes, key=node_key)


def parse_node(token: str) -> NodeId:
    token = token.strip()
    return int(token) if _INT_RE.match(token) else token


@dataclass(frozen=True)
class InteractionRecord:
    source: NodeId
    target: NodeId
    timestamp: date
    kind: Optional[str] = None

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"self-loop record {self.source!r} -> {self.target!r}")


@dataclass
class TemporalEventLog:
    """Validated interactions sorted by day, with the span they were declared over."""

    records: list
    span_start: date
    span_end: date
    rejected_count: int = 0

    def __post_init__(self) -> None:
        if self.span_end < self.span_start:
            raise InputError("span_end precedes span_start")
        if self.rejected_count < 0:
            raise ValueError("rejected_count must be non-negative")
        self.records = sorted(self.records, key=lambda r: r.timestamp)
        for rec in self.records:
            if not self.span_start <= rec.timestamp <= self.span_end:
                raise InputError(f"record at {rec.timestamp} outside span")

    @property
    def span_days(self) -> int:
        return (self.span_end - self.span_start).days + 1

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[InteractionRecord]:
        return iter(self.records)


class WindowScheme(str, Enum):
    DISJOINT = "disjoint"
    OVERLAPPING = "overlapping"
    INCREASING = "increasing"


_LABEL_RE = re.compile(r"^s(\d+|_)o(\d+)$")


@dataclass(frozen=True)
class WindowSpec:
    scheme: WindowScheme
    size_days: Optional[int]
    offset_days: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", WindowScheme(self.scheme))
        if self.offset_days < 1:
            raise InputError("offset_days must be a positive integer")
        if self.scheme is WindowScheme.INCREASING:
            object.__setattr__(self, "size_days", None)
            return
        if self.size_days is None or self.size_days < 1:
            raise InputError("size_days must be a positive integer")
        if self.scheme is WindowScheme.DISJOINT and self.offset_days != self.size_days:
            raise InputError("disjoint windows need offset_days == size_days")
        if self.scheme is WindowScheme.OVERLAPPING and self.offset_days >= self.size_days:
            raise InputError("overlapping windows need offset_days < size_days")

    @classmethod
    def disjoint(cls, size: int) -> "WindowSpec":
        return cls(WindowScheme.DISJOINT, size, size)

    @classmethod
    def overlapping(cls, size: int, offset: int) -> "WindowSpec":
        return cls(WindowScheme.OVERLAPPING, size, offset)

    @classmethod
    def increasing(cls, offset: int) -> "WindowSpec":
        return cls(WindowScheme.INCREASING, None, offset)

    @classmethod
    def from_label(cls, label: str) -> "WindowSpec":
        """Parse compact labels such as ``s90o90``, ``s60o30`` or ``s_o30``."""
        m = _LABEL_RE.match(label.strip())
        if not m:
            raise InputError(f"bad window label {label!r}")
        size, offset = m.group(1), int(m.group(2))
        if size == "_":
            return cls.increasing(offset)
        size = int(size)
        if size == offset:
            return cls.disjoint(size)
        return cls.overlapping(size, offset)

    @property
    def label(self) -> str:
        size = "_" if self.size_days is None else str(self.size_days)
        return f"s{size}o{self.offset_days}"


@dataclass
class SocialNetwork:
    """Directed snapshot graph; edge weight is the number of interactions."""

    nodes: set = field(default_factory=set)
    edges: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for x, y in self.edges:
            if x == y:
                raise ValueError(f"self-loop edge on {x!r}")
            if x not in self.nodes or y not in self.nodes:
                raise ValueError(f"edge ({x!r}, {y!r}) has an endpoint outside nodes")

    def add_interaction(self, source: NodeId, target: NodeId, count: int = 1) -> None:
        if source == target:
            raise ValueError(f"self-loop edge on {source!r}")
        self.nodes.add(source)
        self.nodes.add(target)
        self.edges[(source, target)] = self.edges.get((source, target), 0) + count

    def out_neighbors(self) -> dict:
        out = {n: set() for n in self.nodes}
        for x, y in self.edges:
            out[x].add(y)
        return out

    def in_neighbors(self) -> dict:
        inn = {n: set() for n in self.nodes}
        for x, y in self.edges:
            inn[y].add(x)
        return inn

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass
class Timeframe:
    index: int
    window_start: date
    window_end: date  # exclusive
    snapshot: SocialNetwork

    def __post_init__(self) -> None:
        if not self.window_start < self.window_end:
            raise ValueError("window_start must precede window_end")


@dataclass
class TemporalSocialNetwork:
    frames: list
    spec: WindowSpec

    def __post_init__(self) -> None:
        for pos, frame in enumerate(self.frames, start=1):
            if frame.index != pos:
                raise ValueError("frame indices must run consecutively from 1")

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[Timeframe]:
        return iter(self.frames)

    def frame(self, index: int) -> Timeframe:
        return self.frames[index - 1]


# --------------------------------------------------------------------------
# parsing


def parse_timestamp(value: str, fmt: str = "auto") -> date:
    """Turn an ISO-8601 date/datetime or integer epoch seconds into a day.

    Sub-day precision is truncated. Raises ``ValueError`` on failure.
    """
    value = value.strip()
    if fmt == "auto":
        fmt = "epoch" if _INT_RE.match(value) else "iso"
    if fmt == "epoch":
        return datetime.fromtimestamp(int(value), tz=timezone.utc).date()
    if fmt == "iso":
        if len(value) == 10:
            return date.fromisoformat(value)
        if value.endswith("Z"):
            value = value[:-1] + "+00:00"
        return datetime.fromisoformat(value).date()
    raise ValueError(f"unknown timestamp format {fmt!r}")


def parse_event_log(
    stream: Union[TextIO, Iterable[str]],
    delimiter: str = ",",
    timestamp_format: str = "auto",
    span_start: Optional[date] = None,
    span_end: Optional[date] = None,
) -> TemporalEventLog:
    """Read ``source,target,timestamp[,kind]`` lines into a validated log.

    Self-loops, lines with the wrong number of fields and records outside an
    explicitly declared span are counted in ``rejected_count``. A bad timestamp
    aborts parsing with :class:`UnparseableTimestamp`. Lines starting with
    ``#`` are comments, except ``# span: START END`` which declares the span
    (explicit arguments take precedence). A leading header row whose first
    field is ``source`` is skipped.
    """
    records = []
    rejected = 0
    declared: Tuple[Optional[date], Optional[date]] = (None, None)
    first_data = True
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _SPAN_RE.match(line)
            if m:
                try:
                    declared = (parse_timestamp(m.group(1)), parse_timestamp(m.group(2)))
                except ValueError:
                    raise UnparseableTimestamp(line_no, line) from None
            continue
        fields = [f.strip() for f in line.split(delimiter)]
        if first_data:
            first_data = False
            if fields[0].lower() == "source":
                continue
        if len(fields) not in (3, 4) or not fields[0] or not fields[1]:
            rejected += 1
            continue
        try:
            ts = parse_timestamp(fields[2], timestamp_format)
        except (ValueError, OverflowError, OSError):
            raise UnparseableTimestamp(line_no, fields[2]) from None
        source, target = parse_node(fields[0]), parse_node(fields[1])
        if source == target:
            rejected += 1
            continue
        kind = fields[3] if len(fields) == 4 and fields[3] else None
        records.append(InteractionRecord(source, target, ts, kind))

    start = span_start or declared[0]
    end = span_end or declared[1]
    if start is not None or end is not None:
        kept = [
            r
            for r in records
            if (start is None or r.timestamp >= start) and (end is None or r.timestamp <= end)
        ]
        rejected += len(records) - len(kept)
        records = kept
    if not records:
        raise EmptyLog("no valid interaction records")
    if start is None:
        start = min(r.timestamp for r in records)
    if end is None:
        end = max(r.timestamp for r in records)
    return TemporalEventLog(records, start, end, rejected)


def read_event_log(path, **kwargs) -> TemporalEventLog:
    with open(path, encoding="utf-8") as fh:
        return parse_event_log(fh, **kwargs)


# --------------------------------------------------------------------------
# slicing


def build_snapshot(records: Iterable[InteractionRecord], window: Tuple[date, date]) -> SocialNetwork:
    """Snapshot of the records falling in the half-open window ``[start, end)``."""
    start, end = window
    net = SocialNetwork()
    for rec in records:
        if start <= rec.timestamp < end:
            net.add_interaction(rec.source, rec.target)
    return net


def frame_windows(span_days: int, spec: WindowSpec, keep_partial: bool = False) -> list:
    """Day-offset windows ``(start, end)`` relative to the first day of the span."""
    offset = spec.offset_days
    windows = []
    if spec.scheme is WindowScheme.INCREASING:
        if offset > span_days and not keep_partial:
            raise WindowLargerThanSpan(f"offset {offset} exceeds span of {span_days} days")
        for i in range(span_days // offset):
            windows.append((0, (i + 1) * offset))
        if keep_partial and span_days % offset:
            windows.append((0, span_days))
        return windows

    size = spec.size_days
    if size > span_days and not keep_partial:
        raise WindowLargerThanSpan(f"window of {size} days exceeds span of {span_days} days")
    start = 0
    while start + size <= span_days:
        windows.append((start, start + size))
        start += offset
    if keep_partial:
        last_end = windows[-1][1] if windows else 0
        while start < span_days and last_end < span_days:
            windows.append((start, span_days))
            last_end = span_days
            start += offset
    return windows


def slice_log(log: TemporalEventLog, spec: WindowSpec, keep_partial: bool = False) -> TemporalSocialNetwork:
    """Divide ``log`` into a temporal social network under ``spec``.

    Trailing partial windows are dropped unless ``keep_partial`` is set.
    """
    if not log.records:
        raise EmptyLog("cannot slice an empty log")
    days = [(r.timestamp - log.span_start).days for r in log.records]
    frames = []
    for index, (lo, hi) in enumerate(frame_windows(log.span_days, spec, keep_partial), start=1):
        start = log.span_start + timedelta(days=lo)
        end = log.span_start + timedelta(days=hi)
        chunk = log.records[bisect.bisect_left(days, lo) : bisect.bisect_left(days, hi)]
        frames.append(Timeframe(index, start, end, build_snapshot(chunk, (start, end))))
    return TemporalSocialNetwork(frames, spec)


def frame_of_day(day: int, windows: Sequence[Tuple[int, int]]) -> list:
    """1-based indices of the windows containing day offset ``day``."""
    return [i for i, (lo, hi) in enumerate(windows, start=1) if lo <= day < hi]
