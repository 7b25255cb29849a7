import io
import random
from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupevo.errors import EmptyLog, InputError, UnparseableTimestamp, WindowLargerThanSpan
from groupevo.temporal import (
    InteractionRecord,
    SocialNetwork,
    TemporalEventLog,
    WindowScheme,
    WindowSpec,
    build_snapshot,
    frame_of_day,
    frame_windows,
    parse_event_log,
    parse_timestamp,
    slice_log,
)

D0 = date(2010, 1, 1)


def day(n: int) -> date:
    return D0 + timedelta(days=n)


def log_over(span_days: int, records=()) -> TemporalEventLog:
    records = list(records) or [InteractionRecord(1, 2, D0)]
    return TemporalEventLog(records, D0, day(span_days - 1))


def random_log(seed: int, span_days: int = 120, n_records: int = 300, n_nodes: int = 30):
    rng = random.Random(seed)
    recs = []
    while len(recs) < n_records:
        x, y = rng.randrange(n_nodes), rng.randrange(n_nodes)
        if x != y:
            recs.append(InteractionRecord(x, y, day(rng.randrange(span_days))))
    return TemporalEventLog(recs, D0, day(span_days - 1))


class TestParse:
    def test_single_line(self):
        log = parse_event_log(io.StringIO("1,2,2010-01-05\n"))
        assert len(log) == 1
        rec = log.records[0]
        assert (rec.source, rec.target, rec.timestamp) == (1, 2, date(2010, 1, 5))
        assert rec.kind is None
        assert log.rejected_count == 0

    def test_self_loop_rejected(self):
        log = parse_event_log(io.StringIO("1,2,2010-01-05\n7,7,2010-01-05\n"))
        assert len(log) == 1
        assert log.rejected_count == 1

    def test_malformed_counted(self):
        log = parse_event_log(io.StringIO("1,2,2010-01-05,post\n1,2\n,3,2010-01-02\n"))
        assert len(log) == 1
        assert log.records[0].kind == "post"
        assert log.rejected_count == 2

    def test_empty_input(self):
        with pytest.raises(EmptyLog):
            parse_event_log(io.StringIO(""))

    def test_only_rejected_lines_is_empty(self):
        with pytest.raises(EmptyLog):
            parse_event_log(io.StringIO("3,3,2010-01-01\n"))

    def test_bad_timestamp_reports_line(self):
        with pytest.raises(UnparseableTimestamp) as info:
            parse_event_log(io.StringIO("1,2,2010-01-05\n1,3,yesterday\n"))
        assert info.value.line_no == 2

    def test_sorted_and_span(self):
        text = "a,b,2010-03-01\nb,c,2010-01-10\nc,a,2010-02-01\n"
        log = parse_event_log(io.StringIO(text))
        assert [r.timestamp for r in log.records] == sorted(r.timestamp for r in log.records)
        assert log.span_start == date(2010, 1, 10)
        assert log.span_end == date(2010, 3, 1)

    def test_epoch_seconds_truncated_to_day(self):
        # 2010-01-05 13:20:00 UTC
        log = parse_event_log(io.StringIO("1,2,1262697600\n"))
        assert log.records[0].timestamp == date(2010, 1, 5)

    def test_forced_format(self):
        with pytest.raises(UnparseableTimestamp):
            parse_event_log(io.StringIO("1,2,2010-01-05\n"), timestamp_format="epoch")

    def test_iso_datetime_truncated(self):
        assert parse_timestamp("2010-01-05T23:59:59Z") == date(2010, 1, 5)

    def test_header_comment_and_declared_span(self):
        text = "# span: 2010-01-01 2010-12-31\nsource,target,timestamp,kind\n1,2,2010-02-01,msg\n"
        log = parse_event_log(io.StringIO(text))
        assert (log.span_start, log.span_end) == (date(2010, 1, 1), date(2010, 12, 31))
        assert log.span_days == 365

    def test_out_of_span_rejected(self):
        log = parse_event_log(
            io.StringIO("1,2,2009-12-31\n1,2,2010-01-02\n"), span_start=date(2010, 1, 1)
        )
        assert len(log) == 1 and log.rejected_count == 1

    def test_string_ids_and_delimiter(self):
        log = parse_event_log(io.StringIO("alice;bob;2010-01-01\n"), delimiter=";")
        assert log.records[0].source == "alice"


class TestWindowSpec:
    def test_invariants(self):
        with pytest.raises(InputError):
            WindowSpec(WindowScheme.DISJOINT, 30, 15)
        with pytest.raises(InputError):
            WindowSpec(WindowScheme.OVERLAPPING, 30, 30)
        with pytest.raises(InputError):
            WindowSpec.increasing(0)

    @pytest.mark.parametrize(
        "label, scheme, size, offset",
        [
            ("s90o90", WindowScheme.DISJOINT, 90, 90),
            ("s180o30", WindowScheme.OVERLAPPING, 180, 30),
            ("s_o30", WindowScheme.INCREASING, None, 30),
        ],
    )
    def test_labels(self, label, scheme, size, offset):
        spec = WindowSpec.from_label(label)
        assert (spec.scheme, spec.size_days, spec.offset_days) == (scheme, size, offset)
        assert spec.label == label


class TestSlice:
    @pytest.mark.parametrize(
        "label, frames",
        [("s90o90", 5), ("s60o60", 8), ("s30o30", 17), ("s30o15", 33), ("s60o30", 16)],
    )
    def test_frame_counts_510_days(self, label, frames):
        # floor((span - size) / offset) + 1
        assert len(slice_log(log_over(510), WindowSpec.from_label(label))) == frames

    def test_increasing_windows(self):
        tsn = slice_log(log_over(90), WindowSpec.increasing(30))
        assert [(f.window_start, f.window_end) for f in tsn] == [
            (day(0), day(30)),
            (day(0), day(60)),
            (day(0), day(90)),
        ]

    def test_trailing_partial_dropped(self):
        tsn = slice_log(log_over(100), WindowSpec.disjoint(30))
        assert [((f.window_start - D0).days, (f.window_end - D0).days) for f in tsn] == [
            (0, 30),
            (30, 60),
            (60, 90),
        ]

    def test_keep_partial(self):
        tsn = slice_log(log_over(100), WindowSpec.disjoint(30), keep_partial=True)
        assert len(tsn) == 4
        assert tsn.frame(4).window_end == day(100)
        inc = slice_log(log_over(100), WindowSpec.increasing(30), keep_partial=True)
        assert len(inc) == 4 and inc.frame(4).window_end == day(100)

    def test_window_larger_than_span(self):
        with pytest.raises(WindowLargerThanSpan):
            slice_log(log_over(20), WindowSpec.disjoint(30))

    def test_boundary_day_goes_to_later_frame(self):
        recs = [InteractionRecord(1, 2, day(29)), InteractionRecord(3, 4, day(30))]
        tsn = slice_log(log_over(60, recs), WindowSpec.disjoint(30))
        assert set(tsn.frame(1).snapshot.edges) == {(1, 2)}
        assert set(tsn.frame(2).snapshot.edges) == {(3, 4)}

    def test_frame_structure(self):
        tsn = slice_log(log_over(300), WindowSpec.overlapping(90, 30))
        assert [f.index for f in tsn] == list(range(1, len(tsn) + 1))
        for a, b in zip(tsn.frames, tsn.frames[1:]):
            assert (b.window_start - a.window_start).days == 30

    @given(st.integers(0, 10_000), st.sampled_from([10, 15, 30]))
    @settings(max_examples=30, deadline=None)
    def test_disjoint_exactly_one_frame(self, seed, size):
        windows = frame_windows(120, WindowSpec.disjoint(size))
        for d in range(0, len(windows) * size):
            assert len(frame_of_day(d, windows)) == 1
        log = random_log(seed)
        tsn = slice_log(log, WindowSpec.disjoint(size))
        covered = [r for r in log.records if (r.timestamp - D0).days < len(tsn) * size]
        assert sum(sum(f.snapshot.edges.values()) for f in tsn) == len(covered)

    def test_overlapping_half_offset_two_frames(self):
        windows = frame_windows(120, WindowSpec.overlapping(30, 15))
        last = windows[-1][1]
        for d in range(15, last - 15):
            assert len(frame_of_day(d, windows)) == 2

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_increasing_monotone(self, seed):
        tsn = slice_log(random_log(seed), WindowSpec.increasing(20))
        for a, b in zip(tsn.frames, tsn.frames[1:]):
            assert a.snapshot.nodes <= b.snapshot.nodes
            assert set(a.snapshot.edges) <= set(b.snapshot.edges)

    def test_reslice_identical(self):
        log = random_log(3)
        a = slice_log(log, WindowSpec.overlapping(40, 20))
        b = slice_log(log, WindowSpec.overlapping(40, 20))
        assert [(f.window_start, f.snapshot.edges) for f in a] == [
            (f.window_start, f.snapshot.edges) for f in b
        ]


class TestSnapshot:
    def test_counts_weight(self):
        recs = [InteractionRecord("a", "b", day(1))] * 3
        net = build_snapshot(recs, (day(0), day(10)))
        assert net.edges == {("a", "b"): 3}
        assert net.nodes == {"a", "b"}

    def test_excludes_after_window(self):
        recs = [InteractionRecord("a", "b", day(1)), InteractionRecord("c", "d", day(10))]
        net = build_snapshot(recs, (day(0), day(10)))
        assert set(net.edges) == {("a", "b")}

    def test_empty_window(self):
        net = build_snapshot([], (day(0), day(10)))
        assert net.nodes == set() and net.edges == {}

    def test_no_self_loop(self):
        with pytest.raises(ValueError):
            SocialNetwork({1}, {(1, 1): 1})
        with pytest.raises(ValueError):
            InteractionRecord(1, 1, D0)
