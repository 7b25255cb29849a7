"""Experiment orchestration: window sweeps, event-count reports, scenario checks."""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from io import StringIO
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import io
from .cpm import CPMDetector, Group, detect_groups
from .errors import GroupEvoError, InputError
from .ged import (
    REPORT_ORDER,
    EventType,
    EvolutionEvent,
    GedParams,
    build_chains,
    classify_all,
    compare_all,
    count_events,
)
from .importance import ImportanceMap, frame_importance
from .synth import ScenarioScript, TruthEvent, generate, truth_from_dict
from .temporal import (
    TemporalEventLog,
    TemporalSocialNetwork,
    WindowScheme,
    WindowSpec,
    read_event_log,
    slice_log,
)

log = logging.getLogger(__name__)

PERCENT_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

REPORT_HEADER = [
    "timeframe_type",
    "size",
    "offset",
    "no_of_timeframes",
    "no_of_groups",
    "avg_group_size",
    "form",
    "dissolve",
    "shrink",
    "growth",
    "continuation",
    "split",
    "merge",
    "total",
    "sweep_total",
]


@dataclass
class RunConfig:
    input_path: Optional[Path] = None
    windows: List[WindowSpec] = field(default_factory=lambda: [WindowSpec.disjoint(30)])
    k: int = 5
    importance: str = "social-position"
    epsilon: float = 0.9
    tol: float = 1e-9
    max_iter: int = 200
    alphas: Sequence[float] = PERCENT_GRID
    betas: Sequence[float] = PERCENT_GRID
    report_alpha: float = 0.7
    report_beta: float = 0.7
    form_dissolve_threshold: float = 0.10
    match_threshold: float = 0.10
    out_dir: Optional[Path] = None
    keep_partial: bool = False
    seed: int = 0
    timestamp_format: str = "auto"
    span_start: Optional[date] = None
    span_end: Optional[date] = None
    groups_path: Optional[Path] = None
    importance_path: Optional[Path] = None
    write_frames: bool = False

    def __post_init__(self) -> None:
        if not self.alphas or not self.betas:
            raise InputError("alpha and beta lists must be non-empty")
        for v in list(self.alphas) + list(self.betas) + [self.report_alpha, self.report_beta]:
            if not 0.0 <= v <= 1.0:
                raise InputError(f"threshold {v} outside [0, 1]")
        if not self.windows:
            raise InputError("at least one window spec is required")

    def params(self, alpha: float, beta: float) -> GedParams:
        return GedParams(alpha, beta, self.form_dissolve_threshold, self.match_threshold)

    def grid(self) -> List[Tuple[float, float]]:
        return [(a, b) for a in self.alphas for b in self.betas]


@dataclass
class ReportRow:
    timeframe_type: str
    size: str
    offset: int
    timeframes: int
    groups: int
    avg_group_size: float
    counts: Dict[EventType, int]
    sweep_total: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def cells(self, rounded: bool = False) -> list:
        avg = round(self.avg_group_size) if rounded else repr(self.avg_group_size)
        return (
            [self.timeframe_type, self.size, self.offset, self.timeframes, self.groups, avg]
            + [self.counts[t] for t in REPORT_ORDER]
            + [self.total, self.sweep_total]
        )

    def as_dict(self) -> dict:
        out = dict(zip(REPORT_HEADER, self.cells()))
        out["avg_group_size"] = self.avg_group_size
        return out


@dataclass
class SweepPoint:
    window: str
    alpha: float
    beta: float
    counts: Dict[EventType, int]
    unclassified: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class EventCountReport:
    rows: List[ReportRow] = field(default_factory=list)
    sweep: List[SweepPoint] = field(default_factory=list)
    report_alpha: float = 0.7
    report_beta: float = 0.7

    def to_csv(self) -> str:
        lines = [",".join(REPORT_HEADER)]
        lines += [",".join(str(c) for c in row.cells()) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "report_alpha": self.report_alpha,
            "report_beta": self.report_beta,
            "rows": [r.as_dict() for r in self.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def format_table(self) -> str:
        """Fixed-width table with the average group size rounded for display."""
        cells = [REPORT_HEADER] + [[str(c) for c in r.cells(rounded=True)] for r in self.rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(REPORT_HEADER))]
        return "\n".join(
            "  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells
        )


def _pct(value: float) -> str:
    return f"{round(value * 100):d}"


def window_size_label(spec: WindowSpec, frames: int) -> str:
    if spec.scheme is WindowScheme.INCREASING:
        return f"{spec.offset_days}-{spec.offset_days * frames}"
    return str(spec.size_days)


def load_input(config: RunConfig) -> TemporalEventLog:
    if config.input_path is None:
        raise InputError("no input path given")
    path = Path(config.input_path)
    if not path.exists():
        raise InputError(f"input {path} does not exist")
    if path.suffix == ".json":
        script = ScenarioScript.load(path)
        return generate(script, config.seed)[0]
    return read_event_log(
        path,
        timestamp_format=config.timestamp_format,
        span_start=config.span_start,
        span_end=config.span_end,
    )


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _render(writer, *args) -> str:
    buf = StringIO()
    writer(*args, buf)
    return buf.getvalue()


def run_experiment(config: RunConfig, event_log: Optional[TemporalEventLog] = None) -> EventCountReport:
    """Slice, detect, weigh and classify for every window spec and (alpha, beta).

    Groups, importance values and inclusions are computed once per window
    spec; only classification is repeated over the threshold grid. When
    ``config.out_dir`` is set, every artifact is written beneath it.
    """
    event_log = event_log if event_log is not None else load_input(config)
    external_groups = external_importance = None
    if config.groups_path:
        with open(config.groups_path, encoding="utf-8") as fh:
            external_groups = io.read_groups(fh)
    if config.importance_path:
        with open(config.importance_path, encoding="utf-8") as fh:
            external_importance = io.read_importance(fh)

    out = Path(config.out_dir) if config.out_dir else None
    report = EventCountReport(report_alpha=config.report_alpha, report_beta=config.report_beta)
    grid = config.grid()
    evaluated = list(grid)
    if (config.report_alpha, config.report_beta) not in grid:
        evaluated.append((config.report_alpha, config.report_beta))

    for spec in config.windows:
        label = spec.label
        try:
            tsn = slice_log(event_log, spec, config.keep_partial)
            groups = external_groups or detect_groups(tsn, CPMDetector(config.k))
            importance = external_importance or frame_importance(
                tsn, config.importance, config.epsilon, config.tol, config.max_iter
            )
            pairs = compare_all(tsn, groups, importance)
        except GroupEvoError as exc:
            exc.args = (f"[{label}] {exc}",)
            raise
        log.info("%s: %d frames", label, len(tsn))

        sub = out / label if out else None
        if sub:
            _write(sub / "groups.csv", _render(io.write_groups, groups))
            _write(sub / "importance.csv", _render(io.write_importance, importance))
            if config.write_frames:
                io.write_frames(tsn, sub / "frames")

        report_counts = None
        sweep_total = 0
        for alpha, beta in evaluated:
            result = classify_all(pairs, config.params(alpha, beta))
            counts = count_events(result.events)
            if (alpha, beta) in grid:
                report.sweep.append(
                    SweepPoint(label, alpha, beta, counts, len(result.unclassified))
                )
                sweep_total += len(result.events)
            if (alpha, beta) == (config.report_alpha, config.report_beta):
                report_counts = counts
            if sub:
                run_dir = sub / f"a{_pct(alpha)}_b{_pct(beta)}"
                chains = build_chains(result.events)
                _write(run_dir / "events.csv", _render(io.write_events, result.events))
                _write(run_dir / "events.json", io.events_json(result.events))
                _write(run_dir / "chains.csv", _render(io.write_chains, chains))
                _write(run_dir / "unclassified.csv", _render(io.write_unclassified, result.unclassified))

        all_groups = [g for frame_groups in groups.values() for g in frame_groups]
        n_groups = len(all_groups)
        avg = sum(len(g) for g in all_groups) / n_groups if n_groups else 0.0
        report.rows.append(
            ReportRow(
                spec.scheme.value,
                window_size_label(spec, len(tsn)),
                spec.offset_days,
                len(tsn),
                n_groups,
                avg,
                report_counts,
                sweep_total,
            )
        )

    if out:
        _write(out / "report.csv", report.to_csv())
        _write(out / "report.json", report.to_json())
        _write(out / "sweep.csv", sweep_csv(report.sweep))
    return report


def sweep_csv(points: Sequence[SweepPoint]) -> str:
    """Per-(window, alpha, beta) counts: the data behind the bar charts."""
    header = ["window", "alpha", "beta"] + [t.value for t in REPORT_ORDER] + ["total", "unclassified"]
    lines = [",".join(header)]
    for p in points:
        cells = [p.window, _pct(p.alpha), _pct(p.beta)]
        cells += [str(p.counts[t]) for t in REPORT_ORDER] + [str(p.total), str(p.unclassified)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# scenario verification


@dataclass
class VerificationResult:
    passed: bool
    expected: List[tuple]
    detected: List[tuple]
    missing: List[tuple]
    unexpected: List[tuple]
    precision: Dict[str, float]
    recall: Dict[str, float]
    events: List[EvolutionEvent] = field(default_factory=list)
    groups: Dict[int, List[Group]] = field(default_factory=dict)

    def summary(self) -> str:
        lines = [f"verdict: {'PASS' if self.passed else 'FAIL'}"]
        for t in EventType:
            lines.append(
                f"  {t.value:<11} precision={self.precision[t.value]:.3f} recall={self.recall[t.value]:.3f}"
            )
        for row in self.missing:
            lines.append(f"  missing    {row}")
        for row in self.unexpected:
            lines.append(f"  unexpected {row}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "precision": self.precision,
            "recall": self.recall,
            "missing": [list(r) for r in self.missing],
            "unexpected": [list(r) for r in self.unexpected],
        }


def map_groups(script: ScenarioScript, groups: Dict[int, List[Group]]) -> Dict[Tuple[int, int], str]:
    """Label each detected group with the planted group it overlaps most.

    Ties go to the planted group listed first; a group overlapping nothing
    planted is labelled ``?<group_id>``.
    """
    labels = {}
    for frame, frame_groups in groups.items():
        planted = script.frames[frame - 1].groups if frame <= script.frame_count else []
        for g in frame_groups:
            best, best_overlap = f"?{g.group_id}", 0
            for p in planted:
                overlap = len(g.members & set(p.members))
                if overlap > best_overlap:
                    best, best_overlap = p.label, overlap
            labels[(frame, g.group_id)] = best
    return labels


def read_truth(path) -> List[TruthEvent]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        if path.suffix == ".json":
            data = json.load(fh)
            if isinstance(data, dict):
                data = data.get("ground_truth", [])
            return [truth_from_dict(d) for d in data]
        return [truth_from_dict(row) for row in csv.DictReader(fh)]


def verify_scenario(
    script: ScenarioScript,
    seed: int = 0,
    params: GedParams = GedParams(0.5, 0.5),
    importance: str = "social-position",
    epsilon: float = 0.9,
    truth: Optional[Sequence[TruthEvent]] = None,
    max_iter: int = 200,
) -> VerificationResult:
    """Generate, run the full pipeline and compare with the planted history.

    Frames are sliced disjointly at the script's frame length, so detected
    frame indices line up with scripted ones.
    """
    event_log, expected_events = generate(script, seed)
    if truth is not None:
        expected_events = list(truth)
    tsn = slice_log(event_log, WindowSpec.disjoint(script.frame_length_days))
    groups = detect_groups(tsn, CPMDetector(script.k))
    ni = frame_importance(tsn, importance, epsilon, max_iter=max_iter)
    result = classify_all(compare_all(tsn, groups, ni), params)
    labels = map_groups(script, groups)

    detected = [
        (
            e.from_frame,
            e.to_frame,
            None if e.from_group is None else labels[(e.from_frame, e.from_group)],
            None if e.to_group is None else labels[(e.to_frame, e.to_group)],
            e.event.value,
        )
        for e in result.events
    ]
    expected = [e.as_tuple() for e in expected_events]
    want, got = Counter(expected), Counter(detected)
    missing = sorted((want - got).elements(), key=repr)
    unexpected = sorted((got - want).elements(), key=repr)

    precision, recall = {}, {}
    for t in EventType:
        w = Counter({k: v for k, v in want.items() if k[4] == t.value})
        g = Counter({k: v for k, v in got.items() if k[4] == t.value})
        hits = sum((w & g).values())
        precision[t.value] = hits / sum(g.values()) if g else 1.0
        recall[t.value] = hits / sum(w.values()) if w else 1.0

    return VerificationResult(
        passed=not missing and not unexpected,
        expected=expected,
        detected=detected,
        missing=missing,
        unexpected=unexpected,
        precision=precision,
        recall=recall,
        events=result.events,
        groups=groups,
    )
