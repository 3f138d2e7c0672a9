"""End-to-end engine behavior on small scripted scenarios."""

import copy

import pytest

from helpers import line_scenario, per_stream, req
from oracles import pipeline_times, round_trip_emission_cycle

import nocsim
from nocsim.engine import Engine, run
from nocsim.fabric import TransportMode
from nocsim.link import LinkParams
from nocsim.niu import SocketFamily
from nocsim.oracle import sequential_oracle
from nocsim.scenario import random_scenario
from nocsim.trace import (
    PKT_DELIVERED,
    PKT_INJECTED,
    REQ_ISSUED,
    RESP_EMITTED,
    TraceEvent,
    check_invariants,
    compare_projections,
    projection_text,
    transaction_projection,
)
from nocsim.transaction import Opcode, SocketOrderKey, Status


def test_empty_workload_is_vacuous():
    scenario = line_scenario(programs=[[]])
    result = run(scenario)
    assert result.stats.cycles == 0
    assert len(result.trace) == 0
    assert not result.timed_out


def test_single_load_timing_matches_pipeline_oracle():
    # one load over a two-switch path, both transport modes; the oracle is an
    # independent pipeline recurrence over the three channels of the path
    params = LinkParams(flit_payload_width=4, latency=2, rate_ratio=1)
    hops = [(2, 1)] * 3  # niu->sw0, sw0->sw1, sw1->target
    load = req(0, Opcode.LOAD, 0x40, beats=4, beat_size=4)
    req_flits = 1  # loads carry no payload
    resp_flits = 1 + 4  # header plus 16 payload bytes at width 4
    for mode, saf in (
        (TransportMode.WORMHOLE, False),
        (TransportMode.STORE_AND_FORWARD, True),
    ):
        scenario = line_scenario(
            programs=[[(load, True)]], n_switches=2, mode=mode, params=params
        )
        result = run(scenario)
        emitted = [e for e in result.trace if e.kind == RESP_EMITTED]
        assert len(emitted) == 1
        expected = round_trip_emission_cycle(req_flits, resp_flits, hops, saf)
        assert emitted[0].cycle == expected


def test_wormhole_head_exits_earlier_than_store_and_forward():
    # 4-flit packet over a 2-hop path through one switch: the hand-computed
    # pipeline oracle says store-and-forward delivers (flits - 1) = 3 cycles
    # later, independent of link latency
    params = LinkParams(flit_payload_width=4, latency=1, rate_ratio=1)
    store = req(0, Opcode.STORE, 0x40, beats=3, beat_size=4)
    delivered = {}
    for mode, saf in (
        (TransportMode.WORMHOLE, False),
        (TransportMode.STORE_AND_FORWARD, True),
    ):
        scenario = line_scenario(
            programs=[[(store, True)]], n_switches=1, mode=mode, params=params
        )
        result = run(scenario)
        at_target = [
            e for e in result.trace if e.kind == PKT_DELIVERED and e.site == "niu100"
        ]
        _, arrive = pipeline_times(4, [(1, 1), (1, 1)], saf)
        assert at_target[0].cycle == arrive[-1][3]
        delivered[mode] = at_target[0].cycle
    diff = delivered[TransportMode.STORE_AND_FORWARD] - delivered[TransportMode.WORMHOLE]
    assert diff == 3
    assert delivered[TransportMode.WORMHOLE] == 7
    assert delivered[TransportMode.STORE_AND_FORWARD] == 10


def test_rate_ratio_throttles_but_preserves_content():
    store = req(0, Opcode.STORE, 0x40, beats=4, beat_size=4)
    fast = run(line_scenario(programs=[[(store, True)]], params=LinkParams(4, 1, 1)))
    slow = run(line_scenario(programs=[[(store, True)]], params=LinkParams(4, 1, 3)))
    assert slow.stats.cycles > fast.stats.cycles
    assert fast.memories == slow.memories


def test_determinism_identical_trace_bytes():
    scenario = random_scenario(11, n_masters=3, n_switches=3, total_transactions=120)
    a = run(copy.deepcopy(scenario))
    b = run(copy.deepcopy(scenario))
    assert a.trace.to_csv() == b.trace.to_csv()
    assert a.stats.to_text() == b.stats.to_text()
    c = run(scenario.with_seed(12))
    assert c.trace.to_csv() != a.trace.to_csv()


def test_posted_write_invisible_at_socket_but_lands():
    steps = [
        (req(0, Opcode.STORE_POSTED, 0x40, beats=1, data=b"\xca\xfe\xba\xbe"), False),
        (req(0, Opcode.LOAD, 0x40, beats=1), True),
    ]
    result = run(line_scenario(programs=[steps]))
    assert not result.timed_out
    emitted = [e for e in result.trace if e.kind == RESP_EMITTED]
    assert len(emitted) == 1  # only the load responds at the socket
    assert emitted[0].op == "OKAY"
    assert result.memories[100][0x40:0x44] == b"\xca\xfe\xba\xbe"
    assert check_invariants(result.trace) == []


def test_decode_miss_yields_local_error_without_packets():
    scenario = line_scenario(programs=[[(req(0, Opcode.LOAD, 0x8000), True)]])
    result = run(scenario)
    emitted = [e for e in result.trace if e.kind == RESP_EMITTED]
    assert [e.op for e in emitted] == ["ERROR_DECODE"]
    assert not [e for e in result.trace if e.kind == PKT_INJECTED]
    assert not result.timed_out


def test_slave_error_for_out_of_bounds_offset():
    scenario = line_scenario(
        programs=[[(req(0, Opcode.LOAD, 0x800, beats=4), True)]],
        memory_size=128,  # region is 4096 but the device only backs 128 bytes
    )
    result = run(scenario)
    emitted = [e for e in result.trace if e.kind == RESP_EMITTED]
    assert [e.op for e in emitted] == ["ERROR_SLAVE"]


def test_scripted_memory_matches_sequential_oracle():
    steps = [
        (req(0, Opcode.STORE, 0x10, beats=2, data=b"\x01\x02\x03\x04\x05\x06\x07\x08"), False),
        (req(0, Opcode.STORE, 0x10, beats=1, data=b"\xff\xee\xdd\xcc"), False),
        (req(0, Opcode.STORE_POSTED, 0x20, beats=1, data=b"\x11\x22\x33\x44"), False),
        (req(0, Opcode.LOAD, 0x10, beats=2), True),
    ]
    scenario = line_scenario(programs=[steps])
    result = run(scenario)
    assert result.memories == sequential_oracle(scenario)
    # last writer wins on the overlap
    assert result.memories[100][0x10:0x14] == b"\xff\xee\xdd\xcc"


def test_random_disjoint_masters_match_oracle():
    scenario = random_scenario(23, n_masters=4, total_transactions=160)
    result = run(scenario)
    assert not result.timed_out
    assert result.memories == sequential_oracle(scenario)


def test_projection_single_load_shape():
    scenario = line_scenario(programs=[[(req(0, Opcode.LOAD, 0x40), True)]])
    result = run(scenario)
    projection = transaction_projection(result.trace)
    assert projection == {
        0: {"single": [("single", "LOAD", 0x40, "OKAY")]}
    }
    text = projection_text(projection)
    assert text == "0,single,0,LOAD,64,OKAY\n"


def test_projection_comparator_reports_first_divergence():
    a = {0: {"single": [("single", "LOAD", 64, "OKAY")]}}
    b = {0: {"single": [("single", "LOAD", 64, "ERROR_SLAVE")]}}
    message = compare_projections(a, b)
    assert message is not None and "row 0" in message
    assert compare_projections(a, a) is None


def test_check_invariants_clean_run():
    scenario = random_scenario(31, n_masters=3, total_transactions=90, trace_level="full")
    result = run(scenario)
    assert check_invariants(result.trace, scenario, result.stats) == []


def _swap_same_stream_responses(trace):
    events = list(trace.events)
    idxs = [
        i for i, e in enumerate(events)
        if e.kind == RESP_EMITTED and e.master == 0 and e.key == "single"
    ]
    assert len(idxs) >= 2
    i, j = idxs[0], idxs[1]
    a, b = events[i], events[j]
    events[i] = TraceEvent(a.cycle, a.site, a.kind, a.master, a.key, b.tag, b.op, b.address)
    events[j] = TraceEvent(b.cycle, b.site, b.kind, b.master, b.key, a.tag, a.op, a.address)
    trace.events = events
    return trace


def test_check_invariants_detects_swapped_stream_responses():
    steps = [
        (req(0, Opcode.LOAD, 0x10, beats=1), False),
        (req(0, Opcode.LOAD, 0x20, beats=2), False),
    ]
    result = run(line_scenario(programs=[steps]))
    violations = check_invariants(_swap_same_stream_responses(result.trace))
    assert any("stream order violation" in v for v in violations)


def test_check_invariants_detects_conservation_break():
    result = run(line_scenario(programs=[[(req(0, Opcode.LOAD, 0x10), True)]]))
    orphan = TraceEvent(99, "niu0", RESP_EMITTED, 0, "thread:7", 3, "OKAY", 0x10)
    result.trace.events.append(orphan)
    violations = check_invariants(result.trace)
    assert any("response without request" in v for v in violations)
    # and a request that never got its response
    result2 = run(line_scenario(programs=[[(req(0, Opcode.LOAD, 0x10), True)]]))
    result2.trace.events = [
        e for e in result2.trace.events if e.kind != RESP_EMITTED
    ]
    violations2 = check_invariants(result2.trace)
    assert any("without response" in v for v in violations2)


def test_stats_text_shape():
    result = run(line_scenario(programs=[[(req(0, Opcode.LOAD, 0x40), True)]]))
    text = result.stats.to_text()
    assert "cycles = " in text
    assert "master.0.latency_mean = " in text
    assert "workload_rng = python-random-mt19937" in text
    assert any(line.startswith("link.") for line in text.splitlines())


def test_trace_csv_header_and_shape():
    result = run(line_scenario(programs=[[(req(0, Opcode.LOAD, 0x40), True)]]))
    lines = result.trace.to_csv().splitlines()
    assert lines[0] == "cycle,site,kind,master,order_key,tag,op,address"
    issue = [l for l in lines if ",REQ_ISSUED," in l]
    assert issue and issue[0].split(",")[1] == "niu0"


def test_trace_cycles_non_decreasing():
    scenario = random_scenario(3, n_masters=3, total_transactions=60, trace_level="full")
    result = run(scenario)
    cycles = [e.cycle for e in result.trace]
    assert cycles == sorted(cycles)


def test_per_stream_multi_target_stall_preserves_order():
    # thread 0 first goes to the far target, then the same thread to the same
    # target again (pipelines on one tag), responses in issue order
    steps = [
        (req(0, Opcode.LOAD, 0x40, key=SocketOrderKey.thread(0)), False),
        (req(0, Opcode.LOAD, 0x80, key=SocketOrderKey.thread(0)), False),
        (req(0, Opcode.LOAD, 0xC0, key=SocketOrderKey.thread(1)), False),
    ]
    scenario = line_scenario(
        programs=[steps],
        families=[SocketFamily.THREADED],
        policies=[per_stream(4)],
    )
    result = run(scenario)
    assert not result.timed_out
    emitted = [e for e in result.trace if e.kind == RESP_EMITTED and e.key == "thread:0"]
    assert [e.address for e in emitted] == [0x40, 0x80]
    assert check_invariants(result.trace) == []


def test_engine_rejects_invalid_scenario():
    bad = line_scenario(programs=[[]])
    bad.masters[0].niu.priority = 12
    with pytest.raises(nocsim.ScenarioError):
        Engine(bad)
