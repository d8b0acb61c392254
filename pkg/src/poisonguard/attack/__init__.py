"""Offensive half: look-alike key generation and the poisoning scenario."""

from .keys import KeyPair, KeyStream, address_raw
from .scenario import (
    BENIGN,
    FAKE_ETH_CONTRACT,
    FAKE_USDT_CONTRACT,
    PHISHING,
    VICTIM,
    build_scenario,
    fake_token_metadata,
    fake_transfer_event,
)
from .search import SearchStats, pair_search, targeted_search

__all__ = [
    "BENIGN",
    "FAKE_ETH_CONTRACT",
    "FAKE_USDT_CONTRACT",
    "KeyPair",
    "KeyStream",
    "PHISHING",
    "SearchStats",
    "VICTIM",
    "address_raw",
    "build_scenario",
    "fake_token_metadata",
    "fake_transfer_event",
    "pair_search",
    "targeted_search",
]
