"""Uniform transport-layer packet.

The switch fabric sees nothing but these fields. Whatever socket a master
speaks, its NIU reduces every transaction to packets carrying a destination,
a source, a tag, and a small set of service bits; the fabric routes on the
destination and arbitrates on priority, and is otherwise unaware of what the
packet means.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto
from typing import Union

from .transaction import Opcode, Status

# user_bits bit 0 marks exclusive-access requests and their responses.
USER_BIT_EXCLUSIVE = 1 << 0


class PacketKind(Enum):
    REQUEST = auto()
    RESPONSE = auto()


class LockMarker(Enum):
    NONE = auto()
    LOCK_ACQUIRE = auto()
    LOCK_RELEASE = auto()


@dataclass(frozen=True, slots=True)
class PacketDest:
    """Routing address: owning NIU plus byte offset inside it."""

    target_id: int
    offset: int


@dataclass(slots=True)
class Packet:
    """One transport-layer packet.

    For requests `op` is an Opcode and `payload_len` is the number of bytes
    addressed at the target (loads carry no payload but still state how many
    bytes they want back). For responses `op` is a Status. `frag_index` and
    `frag_last` tie burst chops back together at the initiator; the fabric
    never reads them.
    """

    dest: PacketDest
    src: int
    tag: int
    kind: PacketKind
    op: Union[Opcode, Status]
    priority: int = 0
    user_bits: int = 0
    lock_marker: LockMarker = LockMarker.NONE
    payload: bytes = b""
    payload_len: int = 0
    frag_index: int = 0
    frag_last: bool = True

    @property
    def exclusive(self) -> bool:
        return bool(self.user_bits & USER_BIT_EXCLUSIVE)

    def header_tuple(self) -> tuple:
        """All non-payload fields, used for flit framing and equality checks."""
        return (
            self.dest,
            self.src,
            self.tag,
            self.kind,
            self.op,
            self.priority,
            self.user_bits,
            self.lock_marker,
            self.payload_len,
            self.frag_index,
            self.frag_last,
        )
