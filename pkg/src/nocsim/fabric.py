"""Transport layer: switches, static routing, arbitration, flow control.

The fabric moves flits between NIUs and knows nothing about transactions.
Routing looks only at the packet destination, arbitration only at priority
and source, flow control only at buffer space. The single exception the
design allows is lock-marked packets: an output port captured by a lock
acquire admits only its owner's packets until the matching release passes.

Requests and responses travel on physically separate channel planes so a
backed-up request path can never block responses (and vice versa), which
removes request/response protocol deadlock by construction.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum, auto
from typing import Callable, Optional

from .errors import CreditError, FramingError, LockProtocolError, ScenarioError
from .link import Flit, FlitKind, LinkParams
from .packet import LockMarker, PacketKind

# Header tuple field indices (see Packet.header_tuple).
_HDR_DEST = 0
_HDR_SRC = 1
_HDR_PRIORITY = 5
_HDR_LOCK = 7


class TransportMode(Enum):
    STORE_AND_FORWARD = auto()
    WORMHOLE = auto()


# ---------------------------------------------------------------------------
# Topology description
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class SwitchSpec:
    switch_id: int
    ports: int


@dataclass(frozen=True, slots=True)
class LinkSpec:
    """Bidirectional switch-to-switch connection."""

    a_switch: int
    a_port: int
    b_switch: int
    b_port: int
    params: LinkParams = LinkParams()
    buffer_depth: int = 16


@dataclass(frozen=True, slots=True)
class AttachmentSpec:
    """NIU hanging off one switch port; physically a link like any other."""

    niu_id: int
    switch_id: int
    port: int
    params: LinkParams = LinkParams()
    buffer_depth: int = 16


@dataclass(slots=True)
class Topology:
    switches: list[SwitchSpec]
    links: list[LinkSpec]
    attachments: list[AttachmentSpec]

    def switch_ids(self) -> list[int]:
        return sorted(s.switch_id for s in self.switches)

    def ports_of(self, switch_id: int) -> int:
        for s in self.switches:
            if s.switch_id == switch_id:
                return s.ports
        raise ScenarioError(f"unknown switch {switch_id}")

    def neighbors(self, switch_id: int) -> list[tuple[int, int, int]]:
        """Adjacent switches as (other_switch, my_port, other_port), sorted."""
        out = []
        for ln in self.links:
            if ln.a_switch == switch_id:
                out.append((ln.b_switch, ln.a_port, ln.b_port))
            if ln.b_switch == switch_id:
                out.append((ln.a_switch, ln.b_port, ln.a_port))
        out.sort()
        return out

    def validate(self) -> None:
        ids = [s.switch_id for s in self.switches]
        if len(ids) != len(set(ids)):
            raise ScenarioError("duplicate switch ids")
        used: set[tuple[int, int]] = set()
        for ln in self.links:
            for sw, port in ((ln.a_switch, ln.a_port), (ln.b_switch, ln.b_port)):
                if sw not in ids:
                    raise ScenarioError(f"link references unknown switch {sw}")
                if not 0 <= port < self.ports_of(sw):
                    raise ScenarioError(f"switch {sw} has no port {port}")
                if (sw, port) in used:
                    raise ScenarioError(f"switch {sw} port {port} used twice")
                used.add((sw, port))
            ln.params.validate()
        niu_ids = [a.niu_id for a in self.attachments]
        if len(niu_ids) != len(set(niu_ids)):
            raise ScenarioError("an NIU attaches to more than one switch port")
        for at in self.attachments:
            if at.switch_id not in ids:
                raise ScenarioError(f"attachment references unknown switch {at.switch_id}")
            if not 0 <= at.port < self.ports_of(at.switch_id):
                raise ScenarioError(f"switch {at.switch_id} has no port {at.port}")
            if (at.switch_id, at.port) in used:
                raise ScenarioError(
                    f"switch {at.switch_id} port {at.port} used twice"
                )
            used.add((at.switch_id, at.port))
            at.params.validate()
        self._check_connected()

    def _check_connected(self) -> None:
        if not self.switches:
            raise ScenarioError("topology has no switches")
        seen = {self.switches[0].switch_id}
        frontier = deque(seen)
        while frontier:
            cur = frontier.popleft()
            for other, _, _ in self.neighbors(cur):
                if other not in seen:
                    seen.add(other)
                    frontier.append(other)
        missing = set(s.switch_id for s in self.switches) - seen
        if missing:
            raise ScenarioError(f"topology is not connected; unreachable switches {sorted(missing)}")


# ---------------------------------------------------------------------------
# Routing
# ---------------------------------------------------------------------------

class RoutingTable:
    """Static per-switch map from target NIU id to output port."""

    def __init__(self, ports: dict[int, dict[int, int]]):
        self.ports = ports

    def lookup(self, switch_id: int, target_id: int) -> int:
        try:
            return self.ports[switch_id][target_id]
        except KeyError:
            raise ScenarioError(
                f"unroutable packet: switch {switch_id} has no route to NIU {target_id}"
            ) from None


def route(table: RoutingTable, switch_id: int, target_id: int) -> int:
    """Pure route lookup; depends on nothing but the destination."""
    return table.lookup(switch_id, target_id)


def build_routing(topology: Topology, explicit: Optional[dict[int, dict[int, int]]] = None) -> RoutingTable:
    """Derive shortest-path routes per target, or validate explicit tables.

    Either way the result is checked for completeness and loop freedom at
    load time so the fabric never faces an unroutable packet at runtime.
    """
    if explicit is None:
        ports: dict[int, dict[int, int]] = {s: {} for s in topology.switch_ids()}
        for at in sorted(topology.attachments, key=lambda a: a.niu_id):
            ports[at.switch_id][at.niu_id] = at.port
            # breadth-first from the attach switch; first-found parent wins,
            # neighbor order is sorted so derivation is deterministic
            seen = {at.switch_id}
            frontier = deque([at.switch_id])
            while frontier:
                cur = frontier.popleft()
                for other, _my_port, other_port in topology.neighbors(cur):
                    if other not in seen:
                        seen.add(other)
                        ports[other][at.niu_id] = other_port
                        frontier.append(other)
        table = RoutingTable(ports)
    else:
        table = RoutingTable(explicit)
    validate_routing(topology, table)
    return table


def validate_routing(topology: Topology, table: RoutingTable) -> None:
    """Walk every (switch, target) pair; reject loops, gaps, and bad ports."""
    port_owner: dict[tuple[int, int], tuple[str, int]] = {}
    for ln in topology.links:
        port_owner[(ln.a_switch, ln.a_port)] = ("switch", ln.b_switch)
        port_owner[(ln.b_switch, ln.b_port)] = ("switch", ln.a_switch)
    for at in topology.attachments:
        port_owner[(at.switch_id, at.port)] = ("niu", at.niu_id)
    for at in topology.attachments:
        target = at.niu_id
        for start in topology.switch_ids():
            cur = start
            visited = set()
            while True:
                if cur in visited:
                    raise ScenarioError(
                        f"routing loop for target NIU {target} at switch {cur}"
                    )
                visited.add(cur)
                if cur not in table.ports or target not in table.ports[cur]:
                    raise ScenarioError(
                        f"unroutable packet: switch {cur} has no route to NIU {target}"
                    )
                port = table.ports[cur][target]
                owner = port_owner.get((cur, port))
                if owner is None:
                    raise ScenarioError(
                        f"route for NIU {target} at switch {cur} uses unconnected port {port}"
                    )
                kind, other = owner
                if kind == "niu":
                    if other != target:
                        raise ScenarioError(
                            f"route for NIU {target} at switch {cur} ends at NIU {other}"
                        )
                    break
                cur = other


# ---------------------------------------------------------------------------
# Flow control
# ---------------------------------------------------------------------------

class CreditCounter:
    """Per-channel credit counter initialized to the receiver buffer depth.

    Faults on misuse: these exceptions fire only on internal accounting
    bugs, never on legitimate backpressure.
    """

    __slots__ = ("depth", "credits", "min_seen")

    def __init__(self, depth: int):
        if depth < 1:
            raise ScenarioError("buffer depth must be at least 1")
        self.depth = depth
        self.credits = depth
        self.min_seen = depth

    def can_send(self) -> bool:
        return self.credits > 0

    def consume(self) -> None:
        if self.credits <= 0:
            raise CreditError("credit accounting: consume at zero")
        self.credits -= 1
        if self.credits < self.min_seen:
            self.min_seen = self.credits

    def give_back(self) -> None:
        if self.credits >= self.depth:
            raise CreditError("credit accounting: return beyond buffer depth")
        self.credits += 1


class Assembly:
    """A packet materializing at a channel's receive side.

    Holds the header, the payload bytes received so far, and bookkeeping for
    forwarding progress and per-flit credit release.
    """

    __slots__ = ("header", "buf", "complete", "unreleased", "fwd_head_sent", "fwd_bytes")

    def __init__(self, header: tuple):
        self.header = header
        self.buf = bytearray()
        self.complete = False
        # byte-end offset per retained inbound flit; -1 marks the head flit
        self.unreleased: deque[int] = deque((-1,))
        self.fwd_head_sent = False
        self.fwd_bytes = 0

    @property
    def target_id(self) -> int:
        return self.header[_HDR_DEST].target_id

    @property
    def src(self) -> int:
        return self.header[_HDR_SRC]

    @property
    def priority(self) -> int:
        return self.header[_HDR_PRIORITY]

    @property
    def lock_marker(self) -> LockMarker:
        return self.header[_HDR_LOCK]


class ChannelStream:
    """One directed flit pipe: credits, latency/rate pipeline, receive queue."""

    __slots__ = ("name", "params", "plane", "credits", "in_flight", "next_send", "flits_sent", "rx")

    def __init__(self, name: str, params: LinkParams, depth: int, plane: PacketKind):
        self.name = name
        self.params = params
        self.plane = plane
        self.credits = CreditCounter(depth)
        self.in_flight: deque[tuple[int, Flit]] = deque()
        self.next_send = 0
        self.flits_sent = 0
        self.rx: deque[Assembly] = deque()

    def can_send(self, cycle: int) -> bool:
        return cycle >= self.next_send and self.credits.can_send()

    def send(self, cycle: int, flit: Flit) -> None:
        self.credits.consume()
        self.in_flight.append((cycle + 1 + self.params.latency, flit))
        self.next_send = cycle + self.params.rate_ratio
        self.flits_sent += 1

    def deliver(self, cycle: int) -> None:
        """Move flits whose arrival cycle has come into the receive queue."""
        q = self.in_flight
        while q and q[0][0] <= cycle:
            _, flit = q.popleft()
            self._rx_push(flit)

    def _rx_push(self, flit: Flit) -> None:
        if flit.is_head:
            if self.rx and not self.rx[-1].complete:
                raise FramingError(
                    f"framing violation on {self.name}: head flit interrupts a packet"
                )
            asm = Assembly(flit.header)
            if flit.kind is FlitKind.HEAD_TAIL:
                asm.complete = True
            self.rx.append(asm)
            return
        if not self.rx or self.rx[-1].complete:
            raise FramingError(
                f"framing violation on {self.name}: stray continuation flit"
            )
        asm = self.rx[-1]
        asm.buf.extend(flit.data)
        asm.unreleased.append(len(asm.buf))
        if flit.is_tail:
            asm.complete = True

    def release_forwarded(self, asm: Assembly) -> None:
        """Return credits for inbound flits whose bytes have been forwarded."""
        pend = asm.unreleased
        while pend:
            end = pend[0]
            if end < 0:
                if not asm.fwd_head_sent:
                    break
            elif end > asm.fwd_bytes:
                break
            pend.popleft()
            self.credits.give_back()

    def pop_complete_packet(self) -> Optional[tuple]:
        """Consume the head assembly whole, as an NIU receive side does.

        Returns (header, payload bytes) and frees all its buffer credits.
        """
        if not self.rx or not self.rx[0].complete:
            return None
        asm = self.rx.popleft()
        for _ in range(len(asm.unreleased)):
            self.credits.give_back()
        return asm.header, bytes(asm.buf)


# ---------------------------------------------------------------------------
# Arbitration
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class ArbiterState:
    """Round-robin cursor plus optional lock capture for one output port."""

    nports: int
    cursor: int = 0
    lock_owner: Optional[int] = None


@dataclass(frozen=True, slots=True)
class Candidate:
    input_port: int
    priority: int
    src: int


def arbitrate(candidates: list[Candidate], state: ArbiterState) -> Optional[int]:
    """Pick the winning input port for one output port this cycle.

    A lock owner, when set, filters out every other source first. Among
    eligible candidates the highest priority wins; ties go round-robin
    starting at the cursor, and the cursor advances past the winner. Returns
    None when the lock leaves no eligible candidate (a stall, not a fault).
    """
    if state.lock_owner is not None:
        eligible = [c for c in candidates if c.src == state.lock_owner]
    else:
        eligible = candidates
    if not eligible:
        return None
    top = max(c.priority for c in eligible)
    contenders = {c.input_port for c in eligible if c.priority == top}
    winner = -1
    for i in range(state.nports):
        p = (state.cursor + i) % state.nports
        if p in contenders:
            winner = p
            break
    state.cursor = (winner + 1) % state.nports
    return winner


def lock_capture(state: ArbiterState, src: int) -> None:
    """A lock-acquire packet captures this output port for its source."""
    state.lock_owner = src


def lock_release(state: ArbiterState, src: int, where: str = "") -> None:
    """The matching lock-release frees the port; ownership must line up."""
    if state.lock_owner != src:
        raise LockProtocolError(
            f"lock protocol violation{where}: release by {src}, "
            f"owner {state.lock_owner}"
        )
    state.lock_owner = None


class OutPort:
    """Per-(output port, plane) switch state: arbiter, lock, active stream."""

    __slots__ = (
        "channel", "arbiter", "active_in", "active_asm",
        "grants_by_input", "lock_stall_cycles", "credit_stall_cycles",
    )

    def __init__(self, channel: ChannelStream, nports: int):
        self.channel = channel
        self.arbiter = ArbiterState(nports)
        self.active_in: Optional[int] = None
        self.active_asm: Optional[Assembly] = None
        self.grants_by_input: dict[int, int] = {}
        self.lock_stall_cycles = 0
        self.credit_stall_cycles = 0


# ---------------------------------------------------------------------------
# Switch
# ---------------------------------------------------------------------------

class Switch:
    """One fabric switch; stepped once per cycle by the engine.

    Inputs and outputs are ChannelStream objects per (port, plane); a port
    with no connection simply has no channel. Event reporting goes through a
    recorder callback supplied by the engine.
    """

    def __init__(self, switch_id: int, nports: int, table: RoutingTable):
        self.switch_id = switch_id
        self.nports = nports
        self.table = table
        self.inputs: dict[PacketKind, dict[int, ChannelStream]] = {
            PacketKind.REQUEST: {},
            PacketKind.RESPONSE: {},
        }
        self.outputs: dict[PacketKind, dict[int, OutPort]] = {
            PacketKind.REQUEST: {},
            PacketKind.RESPONSE: {},
        }
        # flat iteration orders, rebuilt on attach; the per-cycle loop is hot
        self._scan: list[tuple[PacketKind, list, list]] = []

    def attach_input(self, plane: PacketKind, port: int, channel: ChannelStream) -> None:
        self.inputs[plane][port] = channel
        self._rebuild_scan()

    def attach_output(self, plane: PacketKind, port: int, channel: ChannelStream) -> None:
        self.outputs[plane][port] = OutPort(channel, self.nports)
        self._rebuild_scan()

    def _rebuild_scan(self) -> None:
        self._scan = [
            (
                plane,
                sorted(self.inputs[plane].items()),
                sorted(self.outputs[plane].items()),
            )
            for plane in (PacketKind.REQUEST, PacketKind.RESPONSE)
        ]

    def port_site(self, plane: PacketKind, port: int) -> str:
        suffix = "" if plane is PacketKind.REQUEST else ".rsp"
        return f"sw{self.switch_id}.out{port}{suffix}"

    def step(self, cycle: int, mode: TransportMode, recorder: Optional[Callable] = None) -> None:
        saf = mode is TransportMode.STORE_AND_FORWARD
        for plane, in_list, out_list in self._scan:
            for _, ch in in_list:
                if ch.in_flight:
                    ch.deliver(cycle)
            for port, out in out_list:
                if out.active_asm is not None:
                    self._continue_stream(cycle, plane, port, out, recorder)
                else:
                    self._try_grant(cycle, plane, port, out, in_list, saf, recorder)

    # -- grant ---------------------------------------------------------------

    def _try_grant(self, cycle, plane, port, out: OutPort,
                   in_list, saf: bool, recorder) -> None:
        candidates = None
        routes = self.table.ports[self.switch_id]
        for in_port, ch in in_list:
            rx = ch.rx
            if not rx:
                continue
            asm = rx[0]
            if saf and not asm.complete:
                continue
            if routes[asm.target_id] != port:
                continue
            if candidates is None:
                candidates = []
            candidates.append(Candidate(in_port, asm.priority, asm.src))
        if candidates is None:
            return
        winner = arbitrate(candidates, out.arbiter)
        if winner is None:
            out.lock_stall_cycles += 1
            return
        asm = self.inputs[plane][winner].rx[0]
        out.active_in = winner
        out.active_asm = asm
        out.grants_by_input[winner] = out.grants_by_input.get(winner, 0) + 1
        if plane is PacketKind.REQUEST and asm.lock_marker is LockMarker.LOCK_ACQUIRE:
            lock_capture(out.arbiter, asm.src)
            if recorder is not None:
                recorder("LOCK_SET", self.port_site(plane, port), asm.header, cycle)
        self._continue_stream(cycle, plane, port, out, recorder)

    # -- streaming -----------------------------------------------------------

    def _continue_stream(self, cycle, plane, port, out: OutPort, recorder) -> None:
        asm = out.active_asm
        ch = out.channel
        if not ch.can_send(cycle):
            out.credit_stall_cycles += 1
            return
        flit = self._next_flit(asm, ch.params.flit_payload_width)
        if flit is None:
            return  # wormhole: payload bytes not yet arrived
        ch.send(cycle, flit)
        in_ch = self.inputs[plane][out.active_in]
        in_ch.release_forwarded(asm)
        if flit.is_tail:
            self._finish_stream(cycle, plane, port, out, in_ch, recorder)

    @staticmethod
    def _next_flit(asm: Assembly, width: int) -> Optional[Flit]:
        if not asm.fwd_head_sent:
            asm.fwd_head_sent = True
            if asm.complete and not asm.buf:
                return Flit(FlitKind.HEAD_TAIL, header=asm.header)
            return Flit(FlitKind.HEAD, header=asm.header)
        avail = len(asm.buf) - asm.fwd_bytes
        if avail <= 0:
            return None
        if asm.complete and avail <= width:
            data = bytes(asm.buf[asm.fwd_bytes :])
            asm.fwd_bytes += avail
            return Flit(FlitKind.TAIL, data=data)
        if avail >= width:
            data = bytes(asm.buf[asm.fwd_bytes : asm.fwd_bytes + width])
            asm.fwd_bytes += width
            return Flit(FlitKind.BODY, data=data)
        return None  # partial slice buffered; wait for more bytes or the tail

    def _finish_stream(self, cycle, plane, port, out: OutPort,
                       in_ch: ChannelStream, recorder) -> None:
        asm = out.active_asm
        popped = in_ch.rx.popleft()
        assert popped is asm and not asm.unreleased
        out.active_in = None
        out.active_asm = None
        if plane is PacketKind.REQUEST and asm.lock_marker is LockMarker.LOCK_RELEASE:
            lock_release(out.arbiter, asm.src, f" at sw{self.switch_id} port {port}")
            if recorder is not None:
                recorder("LOCK_CLEARED", self.port_site(plane, port), asm.header, cycle)
        if recorder is not None:
            recorder("PKT_DELIVERED", self.port_site(plane, port), asm.header, cycle)
