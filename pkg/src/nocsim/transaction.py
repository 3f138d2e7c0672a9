"""Socket-neutral transaction vocabulary.

Every socket family an IP block may speak (fully-ordered bus, threaded,
ID-based with split read/write channels) reduces to the request/response
primitives defined here. The rest of the simulator never looks at
socket-specific signals, only at these values.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from .errors import OrderKeyError

# Simulated address space width. A single constant so desk-scale scenarios
# stay readable; nothing else in the package assumes a particular width.
ADDRESS_BITS = 32
ADDRESS_LIMIT = 1 << ADDRESS_BITS


class Opcode(Enum):
    """Transaction kinds available to masters."""

    LOAD = auto()
    STORE = auto()
    STORE_POSTED = auto()
    READEX = auto()
    STORE_LOCKED_RELEASE = auto()
    LOAD_EXCLUSIVE = auto()
    STORE_EXCLUSIVE = auto()

    @property
    def is_store(self) -> bool:
        return self in _STORE_OPS

    @property
    def is_load(self) -> bool:
        return self not in _STORE_OPS

    @property
    def is_exclusive(self) -> bool:
        return self in (Opcode.LOAD_EXCLUSIVE, Opcode.STORE_EXCLUSIVE)


_STORE_OPS = frozenset(
    {Opcode.STORE, Opcode.STORE_POSTED, Opcode.STORE_LOCKED_RELEASE, Opcode.STORE_EXCLUSIVE}
)


def needs_response(opcode: Opcode) -> bool:
    """Posted writes are the only fire-and-forget transactions."""
    return opcode is not Opcode.STORE_POSTED


class Status(Enum):
    """Response status taxonomy."""

    OKAY = auto()
    EXOKAY = auto()
    EXFAIL = auto()
    ERROR_DECODE = auto()
    ERROR_SLAVE = auto()


class Channel(Enum):
    """Read/write channel split of ID-based sockets."""

    READ = auto()
    WRITE = auto()


class OrderVariant(Enum):
    SINGLE = auto()
    THREAD = auto()
    TXN_ID = auto()


@dataclass(frozen=True, slots=True)
class SocketOrderKey:
    """Ordering sub-key a socket attaches to each transaction.

    SINGLE is used by fully-ordered sockets (one stream per master),
    THREAD by threaded sockets (one stream per thread id), TXN_ID by
    ID-based sockets (one stream per (transaction id, channel) pair).
    """

    variant: OrderVariant
    thread_id: int = 0
    txn_id: int = 0
    channel: Channel = Channel.READ

    @classmethod
    def single(cls) -> "SocketOrderKey":
        return cls(OrderVariant.SINGLE)

    @classmethod
    def thread(cls, thread_id: int) -> "SocketOrderKey":
        return cls(OrderVariant.THREAD, thread_id=thread_id)

    @classmethod
    def txn(cls, txn_id: int, channel: Channel) -> "SocketOrderKey":
        return cls(OrderVariant.TXN_ID, txn_id=txn_id, channel=channel)

    def stream_id(self) -> tuple:
        """Canonical identity of the ordering stream this key belongs to."""
        if self.variant is OrderVariant.SINGLE:
            return (OrderVariant.SINGLE,)
        if self.variant is OrderVariant.THREAD:
            return (OrderVariant.THREAD, self.thread_id)
        return (OrderVariant.TXN_ID, self.txn_id, self.channel)

    def short(self) -> str:
        """Compact text form used in traces."""
        if self.variant is OrderVariant.SINGLE:
            return "single"
        if self.variant is OrderVariant.THREAD:
            return f"thread:{self.thread_id}"
        return f"txnid:{self.txn_id}:{self.channel.name}"


class OrderClass(Enum):
    SAME_STREAM = auto()
    INDEPENDENT = auto()


def order_class(a: SocketOrderKey, b: SocketOrderKey) -> OrderClass:
    """Decide whether responses for two transactions must preserve issue order.

    Both keys must come from the same socket family; comparing keys of
    different variants is a programming error, not a data condition.
    """
    if a.variant is not b.variant:
        raise OrderKeyError(f"heterogeneous order keys: {a.variant.name} vs {b.variant.name}")
    if a.stream_id() == b.stream_id():
        return OrderClass.SAME_STREAM
    return OrderClass.INDEPENDENT


@dataclass(slots=True)
class TransactionRequest:
    """A master-issued request, before any packetization.

    data is the full store payload in socket byte order; loads carry an
    empty payload and describe their size via burst_len and beat_size.
    """

    master_id: int
    opcode: Opcode
    address: int
    burst_len: int
    beat_size: int
    order_key: SocketOrderKey
    data: bytes = b""
    exclusive_flag: bool = False

    @property
    def byte_length(self) -> int:
        return self.burst_len * self.beat_size


@dataclass(slots=True)
class TransactionResponse:
    """What the socket eventually sees for a response-bearing request."""

    master_id: int
    order_key: SocketOrderKey
    status: Status
    data: bytes = b""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate_request(req: TransactionRequest) -> list[str]:
    """Return the list of invariant violations (empty means the request is ok).

    Violations are data for the caller to act on, not exceptions: scenario
    loaders report them, NIUs refuse to pack invalid requests.
    """
    violations: list[str] = []
    if req.burst_len < 1:
        violations.append("burst length must be at least 1")
    if not _is_pow2(req.beat_size):
        violations.append("beat size must be a power of two")
    if req.opcode.is_store:
        if len(req.data) != req.byte_length:
            violations.append(
                f"data length mismatch: {len(req.data)} != {req.byte_length}"
            )
    elif req.data:
        violations.append("loads must carry no data")
    if req.exclusive_flag != req.opcode.is_exclusive:
        violations.append("exclusive flag inconsistent with opcode")
    if _is_pow2(req.beat_size) and req.address % req.beat_size != 0:
        violations.append("address not aligned to beat size")
    if not 0 <= req.address < ADDRESS_LIMIT:
        violations.append("address outside simulated address space")
    return violations
