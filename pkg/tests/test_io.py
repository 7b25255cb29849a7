import io as stdio

import pytest

from groupevo.cpm import Group
from groupevo.errors import FrameMismatch, InputError
from groupevo.ged import EventType, EvolutionEvent, build_chains
from groupevo.importance import ImportanceMap
from groupevo.io import (
    read_events,
    read_groups,
    read_importance,
    write_chains,
    write_event_log,
    write_events,
    write_frames,
    write_groups,
    write_importance,
)
from groupevo.synth import figure1_scenario, generate
from groupevo.temporal import WindowSpec, parse_event_log, slice_log


def render(writer, obj) -> str:
    buf = stdio.StringIO()
    writer(obj, buf)
    return buf.getvalue()


def test_groups_round_trip_mixed_ids():
    groups = {1: [Group(1, 0, frozenset({1, 2, "ann"})), Group(1, 1, frozenset({3}))], 3: []}
    text = render(write_groups, groups)
    assert text.splitlines()[0] == "1,0,1;2;ann"
    back = read_groups(stdio.StringIO(text))
    assert back[1] == groups[1]


def test_groups_duplicate_ids():
    with pytest.raises(FrameMismatch):
        read_groups(stdio.StringIO("1,0,1;2\n1,0,3;4\n"))


def test_groups_bad_line():
    with pytest.raises(InputError):
        read_groups(stdio.StringIO("x,0,1;2\n"))


def test_importance_round_trip_exact():
    maps = {2: ImportanceMap(2, {1: 0.1 + 0.2, "b": 1e-17})}
    back = read_importance(stdio.StringIO(render(write_importance, maps)))
    assert back[2].values == maps[2].values


def test_importance_negative_rejected():
    with pytest.raises(InputError):
        read_importance(stdio.StringIO("1,5,-0.5\n"))


def test_events_round_trip():
    events = [
        EvolutionEvent(1, 2, None, 0, EventType.FORMING, 0.0, 0.0),
        EvolutionEvent(2, 3, 0, 1, EventType.GROWING, 1.0, 0.3333333333333333),
    ]
    assert read_events(stdio.StringIO(render(write_events, events))) == events


def test_chains_format():
    events = [
        EvolutionEvent(1, 2, None, 0, EventType.FORMING, 0.0, 0.0),
        EvolutionEvent(2, 3, 0, None, EventType.DISSOLVING, 0.0, 0.0),
    ]
    lines = render(write_chains, build_chains(events)).splitlines()
    assert lines[0] == "lineage_id,chain_id,end,steps"
    assert lines[1].endswith("dissolved,2:0:Forming;3::Dissolving")


def test_event_log_round_trip():
    log, _ = generate(figure1_scenario(), 3)
    text = render(write_event_log, log)
    assert render(write_event_log, parse_event_log(stdio.StringIO(text))) == text


def test_frames_manifest(tmp_path):
    log, _ = generate(figure1_scenario(), 0)
    tsn = slice_log(log, WindowSpec.disjoint(30))
    write_frames(tsn, tmp_path)
    manifest = (tmp_path / "manifest.csv").read_text().splitlines()
    assert manifest[0] == "index,start,end,nodes,edges,file"
    assert len(manifest) == len(tsn) + 1
    first = manifest[1].split(",")
    assert first[1] == "2010-01-01" and first[2] == "2010-01-31"
    for row in manifest[1:]:
        cells = row.split(",")
        lines = (tmp_path / cells[5]).read_text().splitlines()
        assert lines[0] == "x,y,weight"
        assert len(lines) - 1 == int(cells[4])
