"""ERC-20 ``Transfer`` event encoding and decoding."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Optional

from ..address import Address, keccak256
from ..errors import MalformedLog, NotTransferEvent
from ..transfers import LegitTokenRegistry, Token, TransferRecord

logger = logging.getLogger(__name__)

TRANSFER_SIGNATURE = "Transfer(address,address,uint256)"
TRANSFER_TOPIC = keccak256(TRANSFER_SIGNATURE.encode("ascii"))
UNKNOWN_SYMBOL = "UNKNOWN"
DEFAULT_DECIMALS = 18


@dataclass(frozen=True)
class RawLog:
    contract: Address
    topics: tuple
    data: bytes
    tx_hash: bytes
    block: int
    log_index: int


def address_topic(addr: Address) -> bytes:
    return bytes(12) + addr.raw


def encode_transfer_log(contract: Address, sender: Address, recipient: Address, amount: int,
                        tx_hash: bytes, block: int, log_index: int) -> RawLog:
    if not 0 <= amount < 2**256:
        raise ValueError("amount must fit in uint256")
    return RawLog(
        contract=contract,
        topics=(TRANSFER_TOPIC, address_topic(sender), address_topic(recipient)),
        data=amount.to_bytes(32, "big"),
        tx_hash=tx_hash,
        block=block,
        log_index=log_index,
    )


def decode_transfer_log(log: RawLog, registry: LegitTokenRegistry,
                        metadata: Optional[Mapping[Address, tuple[str, int]]] = None) -> TransferRecord:
    """Decode a ``Transfer(address,address,uint256)`` log into a token transfer.

    The asset symbol and decimals come from the registry when the emitting
    contract is listed, then from ``metadata`` (contract -> (claimed symbol,
    decimals), e.g. what the token's own ``symbol()`` reports). Otherwise the
    symbol is ``UNKNOWN`` and decimals default to 18.
    """
    if not log.topics:
        raise MalformedLog("log has no topics")
    if bytes(log.topics[0]) != TRANSFER_TOPIC:
        raise NotTransferEvent(f"topic0 0x{bytes(log.topics[0]).hex()} is not Transfer")
    if len(log.topics) != 3:
        raise MalformedLog(f"expected 3 topics, got {len(log.topics)}")
    for word in log.topics[1:]:
        if len(word) != 32:
            raise MalformedLog("topic words must be 32 bytes")
        if any(word[:12]):
            raise MalformedLog("address topic has non-zero upper bytes")
    if len(log.data) != 32:
        raise MalformedLog(f"expected 32 data bytes, got {len(log.data)}")
    symbol = registry.symbol_of(log.contract)
    decimals = registry.decimals_of(log.contract)
    if symbol is None and metadata and log.contract in metadata:
        symbol, decimals = metadata[log.contract]
    if decimals is None:
        logger.warning("decimals unknown for %s, assuming %d", log.contract, DEFAULT_DECIMALS)
        decimals = DEFAULT_DECIMALS
    return TransferRecord(
        tx_hash=log.tx_hash,
        block=log.block,
        log_index=log.log_index,
        sender=Address(bytes(log.topics[1][12:])),
        recipient=Address(bytes(log.topics[2][12:])),
        asset=Token(log.contract, symbol or UNKNOWN_SYMBOL, decimals),
        amount=int.from_bytes(log.data, "big"),
    )
