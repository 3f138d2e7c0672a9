"""Independent reference oracles for the test suite.

Everything here re-derives expected behavior from first principles
(recurrences, exhaustive enumeration, reference state machines) and shares
no code with the simulator, so a test passing means two independent
derivations agree.
"""

from __future__ import annotations

import itertools


# ---------------------------------------------------------------------------
# Flit pipeline timing
# ---------------------------------------------------------------------------

def pipeline_times(n_flits: int, hops: list[tuple[int, int]], saf: bool, start: int = 0):
    """Send/arrival cycles for one packet crossing a chain of hops.

    hops: (latency, rate_ratio) per channel, source first. Stage 0 is the
    injecting NIU (all flits available at `start`); every later stage is a
    switch that may forward a flit the same cycle it arrives. Wormhole
    forwards per flit; store-and-forward waits for the whole packet at each
    intermediate stage. Returns (send, arrive) matrices indexed [hop][flit].
    """
    n_hops = len(hops)
    send = [[0] * n_flits for _ in range(n_hops)]
    arrive = [[0] * n_flits for _ in range(n_hops)]
    for j, (latency, rate) in enumerate(hops):
        for k in range(n_flits):
            if j == 0:
                ready = start
            elif saf:
                ready = arrive[j - 1][n_flits - 1]
            else:
                ready = arrive[j - 1][k]
            if k > 0:
                ready = max(ready, send[j][k - 1] + rate)
            send[j][k] = ready
            arrive[j][k] = ready + 1 + latency
    return send, arrive


def round_trip_emission_cycle(
    req_flits: int, resp_flits: int, hops: list[tuple[int, int]], saf: bool
) -> int:
    """Cycle a single transaction's response is emitted at the socket.

    The target turns the request around the cycle its tail arrives; the
    initiator emits the cycle the response tail arrives.
    """
    _, arrive = pipeline_times(req_flits, hops, saf, start=0)
    request_done = arrive[-1][req_flits - 1]
    _, arrive = pipeline_times(resp_flits, list(reversed(hops)), saf, start=request_done)
    return arrive[-1][resp_flits - 1]


# ---------------------------------------------------------------------------
# Exclusive-monitor reference machine
# ---------------------------------------------------------------------------

def interleavings(*sequences):
    """Every merge of the given sequences that preserves each one's order."""
    if all(not s for s in sequences):
        yield []
        return
    for i, seq in enumerate(sequences):
        if not seq:
            continue
        rest = sequences[:i] + (seq[1:],) + sequences[i + 1 :]
        for tail in interleavings(*rest):
            yield [seq[0]] + tail


def run_exclusive_reference(ops: list[tuple[int, str]]) -> tuple[int, int]:
    """Replay (master, 'ldex'|'stex') ops against reference monitor semantics.

    Returns (final counter, successful stores). The atomicity property under
    test: the counter equals the number of successes, i.e. no lost updates,
    for every interleaving.
    """
    counter = 0
    loaded: dict[int, int] = {}
    armed: set[int] = set()
    successes = 0
    for master, op in ops:
        if op == "ldex":
            loaded[master] = counter
            armed.add(master)
        elif op == "stex":
            if master in armed:
                counter = loaded[master] + 1
                armed.clear()  # own success consumes; others' granule overlaps
                successes += 1
        else:
            raise ValueError(op)
    return counter, successes


# ---------------------------------------------------------------------------
# Release-order reference
# ---------------------------------------------------------------------------

def emission_reference(issued: list[tuple[int, object]], completion_order: list[int]) -> list[int]:
    """Expected emission order: streams release their completed prefix.

    `issued` pairs (seq, stream identity) in issue order. Only the stream of
    the transaction that just completed can release anything new, so the
    emission order is fully determined.
    """
    queues: dict[object, list[int]] = {}
    stream_of: dict[int, object] = {}
    for seq, stream in issued:
        queues.setdefault(stream, []).append(seq)
        stream_of[seq] = stream
    done: set[int] = set()
    out: list[int] = []
    for completed in completion_order:
        done.add(completed)
        q = queues[stream_of[completed]]
        while q and q[0] in done:
            out.append(q.pop(0))
    return out


def all_completion_orders(seqs: list[int]):
    return itertools.permutations(seqs)


# ---------------------------------------------------------------------------
# Graph distances (for route checking)
# ---------------------------------------------------------------------------

def bfs_distances(adjacency: dict[int, list[int]], start: int) -> dict[int, int]:
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for node in frontier:
            for other in adjacency[node]:
                if other not in dist:
                    dist[other] = dist[node] + 1
                    nxt.append(other)
        frontier = nxt
    return dist
