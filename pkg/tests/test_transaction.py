"""Transaction layer: opcodes, validation, ordering classification."""

import pytest
from hypothesis import given, settings, strategies as st

from nocsim.errors import OrderKeyError
from nocsim.transaction import (
    Channel,
    Opcode,
    OrderClass,
    SocketOrderKey,
    TransactionRequest,
    needs_response,
    order_class,
    validate_request,
)


def test_needs_response():
    assert needs_response(Opcode.STORE_POSTED) is False
    assert needs_response(Opcode.LOAD) is True
    assert needs_response(Opcode.STORE_EXCLUSIVE) is True
    # the posted write is the only fire-and-forget opcode
    assert [op for op in Opcode if not needs_response(op)] == [Opcode.STORE_POSTED]


def _req(**kw):
    base = dict(
        master_id=0,
        opcode=Opcode.LOAD,
        address=0x100,
        burst_len=4,
        beat_size=4,
        order_key=SocketOrderKey.single(),
        data=b"",
        exclusive_flag=False,
    )
    base.update(kw)
    return TransactionRequest(**base)


class TestValidateRequest:
    def test_clean_load(self):
        assert validate_request(_req()) == []

    def test_store_data_length_mismatch(self):
        bad = _req(opcode=Opcode.STORE, burst_len=2, beat_size=4, data=bytes(7))
        assert any("data length mismatch" in v for v in validate_request(bad))

    def test_exclusive_flag_inconsistent(self):
        bad = _req(opcode=Opcode.LOAD_EXCLUSIVE, exclusive_flag=False)
        assert any("exclusive flag" in v for v in validate_request(bad))

    def test_misaligned_address(self):
        bad = _req(address=0x102, beat_size=8)
        assert any("aligned" in v for v in validate_request(bad))

    def test_load_with_data(self):
        bad = _req(data=b"\x01")
        assert any("no data" in v for v in validate_request(bad))

    def test_non_pow2_beat(self):
        bad = _req(beat_size=3, address=0x99)
        assert any("power of two" in v for v in validate_request(bad))

    def test_address_out_of_space(self):
        bad = _req(address=1 << 33)
        assert any("address space" in v for v in validate_request(bad))


class TestOrderClass:
    def test_single_same_stream(self):
        assert (
            order_class(SocketOrderKey.single(), SocketOrderKey.single())
            is OrderClass.SAME_STREAM
        )

    def test_threads_independent(self):
        assert (
            order_class(SocketOrderKey.thread(0), SocketOrderKey.thread(1))
            is OrderClass.INDEPENDENT
        )

    def test_txn_channels_independent(self):
        a = SocketOrderKey.txn(3, Channel.READ)
        b = SocketOrderKey.txn(3, Channel.WRITE)
        assert order_class(a, b) is OrderClass.INDEPENDENT

    def test_same_txn_same_channel(self):
        a = SocketOrderKey.txn(5, Channel.WRITE)
        b = SocketOrderKey.txn(5, Channel.WRITE)
        assert order_class(a, b) is OrderClass.SAME_STREAM

    def test_heterogeneous_keys_fault(self):
        with pytest.raises(OrderKeyError):
            order_class(SocketOrderKey.single(), SocketOrderKey.thread(0))


def _keys(variant):
    if variant == "single":
        return st.just(SocketOrderKey.single())
    if variant == "thread":
        return st.builds(SocketOrderKey.thread, st.integers(0, 7))
    return st.builds(
        SocketOrderKey.txn, st.integers(0, 7), st.sampled_from(list(Channel))
    )


@settings(max_examples=200, derandomize=True)
@given(
    variant=st.sampled_from(["single", "thread", "txn"]),
    data=st.data(),
)
def test_order_class_symmetric_and_reflexive(variant, data):
    a = data.draw(_keys(variant))
    b = data.draw(_keys(variant))
    assert order_class(a, a) is OrderClass.SAME_STREAM
    assert order_class(a, b) is order_class(b, a)
