"""Network Interface Units.

An initiator NIU converts socket transactions into request packets (address
decode, tag assignment, burst chopping, byte-lane conversion) and converts
response packets back, holding them as needed so the socket sees responses
in the order its family requires. A target NIU owns a byte-addressable
memory and the exclusive monitors for masters that use load-exclusive /
store-exclusive synchronization.

Feature state deliberately lives in exactly two places: per-NIU lookup
tables (pending transactions, monitors) and packet bits (the exclusive
marker, the lock markers). Nothing else in the fabric changes when a socket
family gains a feature.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Callable, Optional

from .errors import (
    LockProtocolError,
    OrphanResponseError,
    RaggedBeatError,
    ScenarioError,
)
from .fabric import ChannelStream
from .link import serialize, packet_from_header
from .packet import LockMarker, Packet, PacketDest, PacketKind, USER_BIT_EXCLUSIVE
from .transaction import (
    Channel,
    Opcode,
    OrderVariant,
    SocketOrderKey,
    Status,
    TransactionRequest,
    TransactionResponse,
    needs_response,
    validate_request,
)

# Tag field width; bounds every tag policy.
TAG_BITS = 4
MAX_TAGS = 1 << TAG_BITS


class SocketFamily(Enum):
    FULLY_ORDERED = auto()
    THREADED = auto()
    ID_BASED = auto()


_FAMILY_VARIANT = {
    SocketFamily.FULLY_ORDERED: OrderVariant.SINGLE,
    SocketFamily.THREADED: OrderVariant.THREAD,
    SocketFamily.ID_BASED: OrderVariant.TXN_ID,
}


class Endianness(Enum):
    LITTLE = auto()
    BIG = auto()


# The fabric carries payloads in a fixed canonical byte order; initiator
# NIUs convert on the way in and out.
FABRIC_ENDIANNESS = Endianness.LITTLE


# ---------------------------------------------------------------------------
# Address decode
# ---------------------------------------------------------------------------

class AddressMap:
    """Non-overlapping [base, base+size) regions, each owned by one target."""

    def __init__(self, regions: list[tuple[int, int, int]]):
        """regions: list of (base, size, target_niu_id)."""
        regions = sorted(regions)
        for (b0, s0, t0), (b1, s1, t1) in zip(regions, regions[1:]):
            if b0 + s0 > b1:
                raise ScenarioError(
                    f"address regions overlap: NIU {t0} [{b0:#x},{b0+s0:#x}) and "
                    f"NIU {t1} [{b1:#x},{b1+s1:#x})"
                )
        self.regions = regions
        self._bases = [r[0] for r in regions]

    def decode(self, address: int) -> Optional[tuple[int, int]]:
        """Return (target_niu_id, offset) or None on a decode miss."""
        i = bisect_right(self._bases, address) - 1
        if i < 0:
            return None
        base, size, target = self.regions[i]
        if address < base + size:
            return target, address - base
        return None


def address_decode(address: int, address_map: AddressMap) -> Optional[tuple[int, int]]:
    return address_map.decode(address)


# ---------------------------------------------------------------------------
# Tag assignment
# ---------------------------------------------------------------------------

class TagPolicyKind(Enum):
    SINGLE_OUTSTANDING = auto()
    PER_STREAM = auto()
    POOLED = auto()


@dataclass(frozen=True, slots=True)
class TagPolicy:
    """How an initiator NIU maps ordering streams onto packet tags.

    SINGLE_OUTSTANDING allows one transaction in flight, ever. PER_STREAM
    dedicates one tag per ordering stream; a stream may pipeline several
    transactions on its tag only while they all address one target, because
    one target behind one static route returns responses in order. POOLED
    hands out the lowest free tag from a pool, relying on the release gate
    for socket ordering.
    """

    kind: TagPolicyKind
    streams: int = 1
    capacity: int = 1

    def validate(self) -> None:
        if self.kind is TagPolicyKind.PER_STREAM and not 1 <= self.streams <= MAX_TAGS:
            raise ScenarioError(f"per-stream policy needs 1..{MAX_TAGS} streams")
        if self.kind is TagPolicyKind.POOLED and not 1 <= self.capacity <= MAX_TAGS:
            raise ScenarioError(f"pooled policy needs 1..{MAX_TAGS} tags")

    def max_outstanding(self) -> int:
        if self.kind is TagPolicyKind.SINGLE_OUTSTANDING:
            return 1
        if self.kind is TagPolicyKind.POOLED:
            return self.capacity
        return MAX_TAGS


def stream_tag(key: SocketOrderKey) -> int:
    """Dedicated tag index of a key's stream under the per-stream policy."""
    if key.variant is OrderVariant.SINGLE:
        return 0
    if key.variant is OrderVariant.THREAD:
        return key.thread_id
    return key.txn_id * 2 + (0 if key.channel is Channel.READ else 1)


@dataclass(slots=True)
class PendingEntry:
    """One accepted transaction waiting for its response fragments."""

    seq: int
    request: TransactionRequest
    order_key: SocketOrderKey
    issue_cycle: int
    target_id: int
    tag: int
    frags_expected: int
    frags: dict[int, tuple[Status, bytes]] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return len(self.frags) == self.frags_expected


class PendingTable:
    """Live transactions of one initiator, keyed by tag.

    Tags normally identify a single live entry; under the per-stream policy
    several same-stream, same-target transactions may share the stream's
    tag, in which case responses match entries in FIFO order (one target,
    one route, so fragments come back oldest-first).
    """

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.entries: dict[int, deque[PendingEntry]] = {}
        self.count = 0

    def is_full(self) -> bool:
        return self.count >= self.capacity

    def live_tags(self) -> list[int]:
        return sorted(self.entries)

    def insert(self, tag: int, entry: PendingEntry) -> None:
        if self.count >= self.capacity:
            raise ScenarioError("pending table overflow")
        self.entries.setdefault(tag, deque()).append(entry)
        self.count += 1

    def head(self, tag: int) -> Optional[PendingEntry]:
        q = self.entries.get(tag)
        return q[0] if q else None

    def pop(self, tag: int) -> PendingEntry:
        q = self.entries[tag]
        entry = q.popleft()
        if not q:
            del self.entries[tag]
        self.count -= 1
        return entry

    def all_entries(self) -> list[PendingEntry]:
        out = []
        for tag in sorted(self.entries):
            out.extend(self.entries[tag])
        return out


def assign_tag(
    policy: TagPolicy,
    key: SocketOrderKey,
    pending: PendingTable,
    target_id: int,
) -> Optional[int]:
    """Pick a tag for a new transaction, or None to stall this cycle.

    A stall is ordinary flow control; the NIU retries on a later cycle.
    """
    if pending.is_full():
        return None
    if policy.kind is TagPolicyKind.SINGLE_OUTSTANDING:
        return 0 if pending.count == 0 else None
    if policy.kind is TagPolicyKind.PER_STREAM:
        tag = stream_tag(key)
        if tag >= policy.streams:
            raise ScenarioError(
                f"order key {key.short()} maps to tag {tag}, beyond {policy.streams} streams"
            )
        q = pending.entries.get(tag)
        if not q:
            return tag
        if all(e.target_id == target_id for e in q):
            return tag
        return None
    for tag in range(policy.capacity):
        if tag not in pending.entries:
            return tag
    return None


# ---------------------------------------------------------------------------
# Burst chopping and byte lanes
# ---------------------------------------------------------------------------

def chop_spans(total_bytes: int, beat_size: int, max_payload: int) -> list[tuple[int, int]]:
    """Split a burst into packet-sized (offset, length) spans.

    Chops fall on beat boundaries so byte-lane conversion never splits a
    beat across packets.
    """
    if beat_size > max_payload:
        raise ScenarioError(f"beat size {beat_size} exceeds max payload {max_payload}")
    step = (max_payload // beat_size) * beat_size
    if total_bytes == 0:
        return [(0, 0)]
    return [(off, min(step, total_bytes - off)) for off in range(0, total_bytes, step)]


def endianness_convert(
    data: bytes,
    beat_size: int,
    from_endianness: Endianness,
    to_endianness: Endianness,
) -> bytes:
    """Per-beat byte-lane reversal between differing byte orders.

    Identity when the orders match; its own inverse in all cases.
    """
    if len(data) % beat_size != 0:
        raise RaggedBeatError(
            f"ragged beat: {len(data)} bytes not divisible by beat size {beat_size}"
        )
    if from_endianness is to_endianness or beat_size == 1:
        return data
    out = bytearray(len(data))
    for start in range(0, len(data), beat_size):
        out[start : start + beat_size] = data[start : start + beat_size][::-1]
    return bytes(out)


# ---------------------------------------------------------------------------
# Exclusive monitors (target side)
# ---------------------------------------------------------------------------

class ExclusiveMonitorSet:
    """Per-master reservation state at one target.

    A load-exclusive arms (master -> address granule). Any successful store
    to that granule disarms every other master's reservation there; a
    master's own successful store-exclusive also consumes its own. A failed
    store-exclusive changes nothing.
    """

    def __init__(self, granule: int = 8):
        if granule < 1 or granule & (granule - 1):
            raise ScenarioError("monitor granule must be a power of two")
        self.granule = granule
        self.monitors: dict[int, int] = {}

    def _base(self, offset: int) -> int:
        return offset & ~(self.granule - 1)

    def arm(self, master_id: int, offset: int) -> None:
        self.monitors[master_id] = self._base(offset)

    def is_armed(self, master_id: int, offset: int) -> bool:
        return self.monitors.get(master_id) == self._base(offset)

    def observe_store(
        self, master_id: int, offset: int, nbytes: int, exclusive: bool
    ) -> list[int]:
        """Apply a successful store; returns the masters whose monitors cleared."""
        first = self._base(offset)
        last = self._base(offset + max(nbytes, 1) - 1)
        cleared = sorted(
            m
            for m, base in self.monitors.items()
            if first <= base <= last and (m != master_id or exclusive)
        )
        for m in cleared:
            del self.monitors[m]
        return cleared


# ---------------------------------------------------------------------------
# Response release ordering
# ---------------------------------------------------------------------------

class ReleaseGate:
    """Holds completed responses until older same-stream responses go out.

    Responses within one ordering stream leave in issue order; responses of
    independent streams leave as they complete.
    """

    def __init__(self):
        self._streams: dict[tuple, deque[int]] = {}
        self._done: dict[int, object] = {}

    def register(self, seq: int, key: SocketOrderKey) -> None:
        self._streams.setdefault(key.stream_id(), deque()).append(seq)

    def complete(self, seq: int, key: SocketOrderKey, payload) -> list[tuple[int, object]]:
        """Mark seq complete; return every (seq, payload) now free to emit."""
        self._done[seq] = payload
        out = []
        q = self._streams[key.stream_id()]
        while q and q[0] in self._done:
            s = q.popleft()
            out.append((s, self._done.pop(s)))
        return out

    def held(self) -> int:
        return len(self._done)


def response_release_order(
    issued: list[tuple[int, SocketOrderKey]],
    completion_order: list[int],
) -> list[int]:
    """Emission order for a set of transactions given their completion order.

    `issued` lists (seq, order key) in socket issue order; `completion_order`
    lists the same seqs in the order their responses became ready.
    """
    key_of = dict(issued)
    gate = ReleaseGate()
    for seq, key in issued:
        gate.register(seq, key)
    emitted: list[int] = []
    for seq in completion_order:
        emitted.extend(s for s, _ in gate.complete(seq, key_of[seq], None))
    return emitted


# ---------------------------------------------------------------------------
# Initiator NIU
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class InitiatorConfig:
    niu_id: int
    family: SocketFamily
    tag_policy: TagPolicy
    capacity: int = MAX_TAGS
    max_payload: int = 32
    endianness: Endianness = Endianness.LITTLE
    priority: int = 0

    def validate(self) -> None:
        self.tag_policy.validate()
        if not 1 <= self.capacity <= MAX_TAGS:
            raise ScenarioError(f"capacity must be 1..{MAX_TAGS}")
        if self.max_payload < 1:
            raise ScenarioError("max payload must be positive")
        if not 0 <= self.priority <= 7:
            raise ScenarioError("priority must be 0..7")


class InitiatorNiu:
    """Socket-side adapter for one master."""

    def __init__(self, config: InitiatorConfig, address_map: AddressMap):
        config.validate()
        self.config = config
        self.niu_id = config.niu_id
        self.address_map = address_map
        self.pending = PendingTable(min(config.capacity, config.tag_policy.max_outstanding()))
        self.gate = ReleaseGate()
        self.next_seq = 0
        self.inject_queue: deque[Packet] = deque()
        self.current_flits: deque = deque()
        self._current_packet: Optional[Packet] = None
        self.emit_buffer: list[tuple[PendingEntry, TransactionResponse]] = []
        self.lock_held_address: Optional[int] = None
        # wired by the engine
        self.tx_req: Optional[ChannelStream] = None
        self.rx_resp: Optional[ChannelStream] = None
        # stats
        self.tag_stall_cycles = 0
        self.packets_injected = 0
        self.accepted = 0
        self.completed = 0

    # -- socket side ----------------------------------------------------------

    def _check_key(self, req: TransactionRequest) -> None:
        want = _FAMILY_VARIANT[self.config.family]
        if req.order_key.variant is not want:
            raise ScenarioError(
                f"NIU {self.niu_id} speaks {self.config.family.name}, "
                f"got {req.order_key.variant.name} order key"
            )

    def _check_lock_protocol(self, req: TransactionRequest) -> None:
        if req.opcode is Opcode.READEX:
            if self.lock_held_address is not None:
                raise LockProtocolError(
                    f"master {req.master_id} issued READEX while one is outstanding"
                )
        elif req.opcode is Opcode.STORE_LOCKED_RELEASE:
            if self.lock_held_address is None:
                raise LockProtocolError(
                    f"master {req.master_id} released a lock it does not hold"
                )
            if self.lock_held_address != req.address:
                raise LockProtocolError(
                    f"lock release address {req.address:#x} does not match "
                    f"READEX address {self.lock_held_address:#x}"
                )

    def try_accept(self, req: TransactionRequest, cycle: int) -> Optional[PendingEntry]:
        """Ingress path: returns the pending entry, or None on a tag stall.

        A decode miss consumes the request and produces a local error
        response without injecting anything into the fabric.
        """
        decoded = self.address_map.decode(req.address)
        if decoded is not None and self.pending.is_full():
            return None  # guaranteed tag stall; full checks run once a slot frees
        violations = validate_request(req)
        if violations:
            raise ScenarioError(f"invalid request reached NIU {self.niu_id}: {violations}")
        self._check_key(req)
        self._check_lock_protocol(req)

        if decoded is None:
            return self._local_error(req, cycle, Status.ERROR_DECODE)
        target_id, offset = decoded

        spans = chop_spans(req.byte_length, req.beat_size, self.config.max_payload)
        if len(spans) > 1 and (req.opcode.is_exclusive or req.opcode in (Opcode.READEX, Opcode.STORE_LOCKED_RELEASE)):
            raise ScenarioError(
                f"{req.opcode.name} burst of {req.byte_length} bytes does not fit "
                f"one packet (max payload {self.config.max_payload})"
            )

        tag = assign_tag(self.config.tag_policy, req.order_key, self.pending, target_id)
        if tag is None:
            return None

        entry = PendingEntry(
            seq=self.next_seq,
            request=req,
            order_key=req.order_key,
            issue_cycle=cycle,
            target_id=target_id,
            tag=tag,
            frags_expected=len(spans),
        )
        self.next_seq += 1
        self.pending.insert(tag, entry)
        if needs_response(req.opcode):
            self.gate.register(entry.seq, req.order_key)

        data = b""
        if req.opcode.is_store:
            data = endianness_convert(
                req.data, req.beat_size, self.config.endianness, FABRIC_ENDIANNESS
            )
        user_bits = USER_BIT_EXCLUSIVE if req.exclusive_flag else 0
        lock_marker = LockMarker.NONE
        if req.opcode is Opcode.READEX:
            lock_marker = LockMarker.LOCK_ACQUIRE
            self.lock_held_address = req.address
        elif req.opcode is Opcode.STORE_LOCKED_RELEASE:
            lock_marker = LockMarker.LOCK_RELEASE
            self.lock_held_address = None

        last = len(spans) - 1
        for i, (span_off, span_len) in enumerate(spans):
            self.inject_queue.append(
                Packet(
                    dest=PacketDest(target_id, offset + span_off),
                    src=self.niu_id,
                    tag=tag,
                    kind=PacketKind.REQUEST,
                    op=req.opcode,
                    priority=self.config.priority,
                    user_bits=user_bits,
                    lock_marker=lock_marker,
                    payload=data[span_off : span_off + span_len],
                    payload_len=span_len,
                    frag_index=i,
                    frag_last=(i == last),
                )
            )
        self.accepted += 1
        return entry

    def _local_error(self, req: TransactionRequest, cycle: int, status: Status) -> PendingEntry:
        entry = PendingEntry(
            seq=self.next_seq,
            request=req,
            order_key=req.order_key,
            issue_cycle=cycle,
            target_id=-1,
            tag=-1,
            frags_expected=0,
        )
        self.next_seq += 1
        self.accepted += 1
        if needs_response(req.opcode):
            self.gate.register(entry.seq, req.order_key)
            data = bytes(req.byte_length) if req.opcode.is_load else b""
            response = TransactionResponse(req.master_id, req.order_key, status, data)
            released = self.gate.complete(entry.seq, req.order_key, (entry, response))
            self.emit_buffer.extend(payload for _, payload in released)
        return entry

    # -- fabric side ------------------------------------------------------------

    def step_inject(self, cycle: int) -> Optional[Packet]:
        """Send at most one request flit; returns the packet when its head goes out."""
        if not self.current_flits:
            if not self.inject_queue:
                return None
            packet = self.inject_queue.popleft()
            self.current_flits.extend(serialize(packet, self.tx_req.params))
            self._current_packet = packet
        if not self.tx_req.can_send(cycle):
            return None
        flit = self.current_flits.popleft()
        self.tx_req.send(cycle, flit)
        if flit.is_head:
            self.packets_injected += 1
            return self._current_packet
        return None

    def egress_unpack(self, packet: Packet) -> Optional[tuple[PendingEntry, TransactionResponse]]:
        """Fold one response packet into its pending entry.

        Returns the reconstructed transaction response once the last fragment
        arrives; None while fragments are still outstanding.
        """
        entry = self.pending.head(packet.tag)
        if entry is None:
            raise OrphanResponseError(
                f"orphan response at NIU {self.niu_id}: tag {packet.tag} not live"
            )
        if packet.frag_index in entry.frags:
            raise OrphanResponseError(
                f"duplicate response fragment {packet.frag_index} for tag {packet.tag}"
            )
        entry.frags[packet.frag_index] = (packet.op, packet.payload)
        if not entry.complete:
            return None
        self.pending.pop(packet.tag)
        req = entry.request
        status = Status.OKAY
        for i in range(entry.frags_expected):
            frag_status, _ = entry.frags[i]
            if frag_status is not Status.OKAY:
                status = frag_status
                break
        data = b""
        if req.opcode.is_load:
            raw = b"".join(entry.frags[i][1] for i in range(entry.frags_expected))
            data = endianness_convert(
                raw, req.beat_size, FABRIC_ENDIANNESS, self.config.endianness
            )
        response = TransactionResponse(req.master_id, req.order_key, status, data)
        self.completed += 1
        return entry, response

    def step_egress(self, cycle: int) -> list[tuple[PendingEntry, TransactionResponse, bool]]:
        """Drain response packets; return (entry, response, socket_visible) emissions."""
        self.rx_resp.deliver(cycle)
        emissions: list[tuple[PendingEntry, TransactionResponse, bool]] = []
        while True:
            popped = self.rx_resp.pop_complete_packet()
            if popped is None:
                break
            header, payload = popped
            packet = packet_from_header(header, payload)
            done = self.egress_unpack(packet)
            if done is None:
                continue
            entry, response = done
            if needs_response(entry.request.opcode):
                released = self.gate.complete(entry.seq, entry.order_key, (entry, response))
                emissions.extend((e, r, True) for _, (e, r) in released)
            else:
                emissions.append((entry, response, False))
        if self.emit_buffer:
            emissions.extend((e, r, True) for e, r in self.emit_buffer)
            self.emit_buffer.clear()
        return emissions

    def idle(self) -> bool:
        return (
            self.pending.count == 0
            and not self.inject_queue
            and not self.current_flits
            and not self.emit_buffer
            and self.gate.held() == 0
        )


# ---------------------------------------------------------------------------
# Target NIU
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class TargetConfig:
    niu_id: int
    region_base: int
    region_size: int
    memory_size: Optional[int] = None
    monitor_granule: int = 8

    def validate(self) -> None:
        if self.region_size < 1:
            raise ScenarioError("target region must not be empty")
        if self.memory_size is None:
            self.memory_size = self.region_size


class TargetNiu:
    """Memory-backed slave with exclusive monitors."""

    def __init__(self, config: TargetConfig, monitor_event: Optional[Callable] = None):
        config.validate()
        self.config = config
        self.niu_id = config.niu_id
        self.memory = bytearray(config.memory_size)
        self.monitors = ExclusiveMonitorSet(config.monitor_granule)
        self.response_queue: deque[Packet] = deque()
        self.current_flits: deque = deque()
        # wired by the engine
        self.rx_req: Optional[ChannelStream] = None
        self.tx_resp: Optional[ChannelStream] = None
        self.requests_handled = 0
        # monitor_event(cycle, kind, owner, actor, opcode, granule)
        self.monitor_event = monitor_event

    def handle_request(self, pkt: Packet, cycle: int = 0) -> Packet:
        """Execute one request packet against memory and the monitors."""
        off = pkt.dest.offset
        length = pkt.payload_len
        opcode = pkt.op
        status = Status.OKAY
        data = b""
        granule = self.monitors._base(off)
        if off < 0 or off + length > len(self.memory):
            status = Status.ERROR_SLAVE
            if opcode.is_load:
                data = bytes(length)
        elif opcode in (Opcode.LOAD, Opcode.READEX):
            data = bytes(self.memory[off : off + length])
        elif opcode is Opcode.LOAD_EXCLUSIVE:
            data = bytes(self.memory[off : off + length])
            self.monitors.arm(pkt.src, off)
            self._emit_monitor(cycle, "MONITOR_ARMED", pkt.src, pkt.src, opcode, granule)
            status = Status.EXOKAY
        elif opcode is Opcode.STORE_EXCLUSIVE:
            if self.monitors.is_armed(pkt.src, off):
                self.memory[off : off + length] = pkt.payload
                for m in self.monitors.observe_store(pkt.src, off, length, exclusive=True):
                    self._emit_monitor(cycle, "MONITOR_CLEARED", m, pkt.src, opcode, granule)
                status = Status.EXOKAY
            else:
                status = Status.EXFAIL
        else:  # STORE, STORE_POSTED, STORE_LOCKED_RELEASE
            self.memory[off : off + length] = pkt.payload
            for m in self.monitors.observe_store(pkt.src, off, length, exclusive=False):
                self._emit_monitor(cycle, "MONITOR_CLEARED", m, pkt.src, opcode, granule)

        user_bits = USER_BIT_EXCLUSIVE if status in (Status.EXOKAY, Status.EXFAIL) else 0
        self.requests_handled += 1
        return Packet(
            dest=PacketDest(pkt.src, 0),
            src=pkt.src,
            tag=pkt.tag,
            kind=PacketKind.RESPONSE,
            op=status,
            priority=pkt.priority,
            user_bits=user_bits,
            payload=data,
            payload_len=len(data),
            frag_index=pkt.frag_index,
            frag_last=pkt.frag_last,
        )

    def _emit_monitor(self, cycle, kind, owner, actor, opcode, granule) -> None:
        if self.monitor_event is not None:
            self.monitor_event(cycle, kind, owner, actor, opcode, granule)

    def step(self, cycle: int) -> list[Packet]:
        """Consume arrived request packets, then push at most one response flit.

        Returns the request packets handled this cycle (for tracing).
        """
        self.rx_req.deliver(cycle)
        handled = []
        while True:
            popped = self.rx_req.pop_complete_packet()
            if popped is None:
                break
            header, payload = popped
            packet = packet_from_header(header, payload)
            handled.append(packet)
            self.response_queue.append(self.handle_request(packet, cycle))
        if not self.current_flits and self.response_queue:
            self.current_flits.extend(
                serialize(self.response_queue.popleft(), self.tx_resp.params)
            )
        if self.current_flits and self.tx_resp.can_send(cycle):
            self.tx_resp.send(cycle, self.current_flits.popleft())
        return handled

    def idle(self) -> bool:
        return not self.response_queue and not self.current_flits
